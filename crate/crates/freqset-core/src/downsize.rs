//! Demand-support reduction with a certified loss bound.
//!
//! Two reductions:
//!
//! * **positive-support** — dropping flows whose demand is exactly zero never
//!   changes the optimum (their variables are fixed at zero anyway);
//! * **threshold** — dropping flows whose mean is at most ε changes the
//!   optimum by at most `Λ(ε) = 2 · M · ℓ · f(ε)`, where `f(ε)` counts the
//!   dropped flows and `ℓ` is the largest `mean + std` over the support
//!   *before* reduction.
//!
//! [`certify_loss`] solves the robust counterpart on the full and the
//! reduced support and checks the realized objective gap against the bound.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::demand::FlowStats;
use crate::formulate::BuildError;
use crate::instance::TransitInstance;
use crate::line::PassengerFlow;
use crate::milp::{solve, SolveError, SolveLimits};
use crate::robust::{build_robust_counterpart, BudgetUncertaintySet, UncertaintyError};

/// Drops flows with zero demand; keeps everything else untouched.
pub fn reduce_positive(demand: &BTreeMap<PassengerFlow, f64>) -> BTreeMap<PassengerFlow, f64> {
    demand.iter().filter(|&(_, &u)| u > 0.0).map(|(f, &u)| (f.clone(), u)).collect()
}

/// Invalid reduction parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum DownsizeError {
    BadEpsilon { value: f64 },
    BadPenalty { value: f64 },
}

impl fmt::Display for DownsizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DownsizeError::BadEpsilon { value } => {
                write!(f, "threshold must be finite and >= 0, got {value}")
            }
            DownsizeError::BadPenalty { value } => {
                write!(f, "penalty must be finite and > 0, got {value}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DownsizeError {}

/// The conventional threshold for statistics estimated from `m` scenarios:
/// `1/m`, so a flow must appear at least once on average to survive.
pub fn default_epsilon(num_scenarios: usize) -> f64 {
    1.0 / num_scenarios.max(1) as f64
}

/// A threshold reduction together with its certified loss bound.
#[derive(Clone, Debug)]
pub struct ReductionReport {
    pub epsilon: f64,
    /// Flows with mean strictly above ε.
    pub kept: FlowStats,
    /// `f(ε)`: flows dropped.
    pub dropped: usize,
    /// `ℓ`: the demand ceiling `max(mean + std)` over the pre-reduction
    /// support.
    pub ceiling: f64,
    /// `Λ(ε) = 2 · M · ℓ · f(ε)`.
    pub loss_bound: f64,
}

/// Keeps flows with mean strictly above ε and certifies the worst-case
/// objective loss `Λ(ε)`.
pub fn reduce_heuristic(
    stats: &FlowStats,
    epsilon: f64,
    big_m: f64,
) -> Result<ReductionReport, DownsizeError> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(DownsizeError::BadEpsilon { value: epsilon });
    }
    if !big_m.is_finite() || big_m <= 0.0 {
        return Err(DownsizeError::BadPenalty { value: big_m });
    }
    let kept = stats.filtered(|_, stat| stat.mean > epsilon);
    let dropped = stats.len() - kept.len();
    let ceiling = stats.max_mean_plus_std();
    Ok(ReductionReport {
        epsilon,
        kept,
        dropped,
        ceiling,
        loss_bound: 2.0 * big_m * ceiling * dropped as f64,
    })
}

/// One grid point of [`reduction_curve`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReductionPoint {
    pub epsilon: f64,
    pub kept: usize,
    pub dropped: usize,
    pub loss_bound: f64,
}

/// Evaluates the reduction at each threshold (sorted output follows the
/// input order).
pub fn reduction_curve(
    stats: &FlowStats,
    epsilons: &[f64],
    big_m: f64,
) -> Result<Vec<ReductionPoint>, DownsizeError> {
    let mut out = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let rep = reduce_heuristic(stats, eps, big_m)?;
        out.push(ReductionPoint {
            epsilon: eps,
            kept: rep.kept.len(),
            dropped: rep.dropped,
            loss_bound: rep.loss_bound,
        });
    }
    Ok(out)
}

/// Why a loss certification could not run.
#[derive(Clone, Debug)]
pub enum CertifyError {
    Downsize(DownsizeError),
    Uncertainty(UncertaintyError),
    Build(BuildError),
    Solve(SolveError),
    /// A certification needs both solves to finish proven-optimal.
    NotOptimal { which: &'static str, detail: String },
}

impl fmt::Display for CertifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyError::Downsize(e) => write!(f, "{e}"),
            CertifyError::Uncertainty(e) => write!(f, "{e}"),
            CertifyError::Build(e) => write!(f, "{e}"),
            CertifyError::Solve(e) => write!(f, "{e}"),
            CertifyError::NotOptimal { which, detail } => {
                write!(f, "{which} model did not solve to optimality: {detail}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CertifyError {}

impl From<DownsizeError> for CertifyError {
    fn from(e: DownsizeError) -> Self {
        CertifyError::Downsize(e)
    }
}
impl From<UncertaintyError> for CertifyError {
    fn from(e: UncertaintyError) -> Self {
        CertifyError::Uncertainty(e)
    }
}
impl From<BuildError> for CertifyError {
    fn from(e: BuildError) -> Self {
        CertifyError::Build(e)
    }
}
impl From<SolveError> for CertifyError {
    fn from(e: SolveError) -> Self {
        CertifyError::Solve(e)
    }
}

/// Outcome of [`certify_loss`]: the realized objective gap between the full
/// and the reduced robust model, and the bound it must respect.
#[derive(Clone, Debug)]
pub struct CertifiedLoss {
    pub epsilon: f64,
    pub full_objective: f64,
    pub reduced_objective: f64,
    /// `full - reduced`; guaranteed inside `[0, loss_bound]` up to solver
    /// tolerance.
    pub gap: f64,
    pub loss_bound: f64,
    pub dropped: usize,
}

/// Solves the robust counterpart on the full statistics and on the
/// ε-reduced statistics and reports the realized loss against `Λ(ε)`.
pub fn certify_loss(
    instance: &TransitInstance,
    stats: &FlowStats,
    gamma_budget: f64,
    epsilon: f64,
    limits: &SolveLimits,
) -> Result<CertifiedLoss, CertifyError> {
    let big_m = instance.params().big_m;
    let report = reduce_heuristic(stats, epsilon, big_m)?;

    let solve_rc = |stats: &FlowStats, which: &'static str| -> Result<f64, CertifyError> {
        let uset = BudgetUncertaintySet::from_stats(stats, gamma_budget)?;
        let built = build_robust_counterpart(instance, &uset)?;
        let sol = solve(&built.model, limits)?;
        if sol.status != crate::milp::SolveStatus::Optimal {
            return Err(CertifyError::NotOptimal {
                which,
                detail: format!("{:?}", sol.status),
            });
        }
        Ok(sol.objective)
    };

    let full = solve_rc(stats, "full")?;
    let reduced = solve_rc(&report.kept, "reduced")?;
    Ok(CertifiedLoss {
        epsilon,
        full_objective: full,
        reduced_objective: reduced,
        gap: full - reduced,
        loss_bound: report.loss_bound,
        dropped: report.dropped,
    })
}
