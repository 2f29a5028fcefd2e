//! Robust counterpart against budgeted demand uncertainty.
//!
//! Demand for flow `i` is `μ_i + ζ_i σ_i` where the deviation vector ζ lives
//! in the budget set `Z = { ‖ζ‖∞ ≤ 1, ‖ζ‖₁ ≤ Γ }`. The counterpart guards
//! both places demand enters the model:
//!
//! * the **objective**: the worst-case penalty term is dualized into an
//!   epigraph row with multipliers `ν¹` (per flow) and `ν²` (budget), so the
//!   model minimizes an upper bound `α` on the realized cost;
//! * the **availability** of each flow: boardings must stay below the lowest
//!   demand any ζ allows, dualized per flow with multipliers `ν³` (a full
//!   row per flow) and `ν⁴`.
//!
//! Both dualizations spell out the absolute-value rows even where one side
//! is vacuous, so the added variable/row counts depend only on the support
//! size `n`: exactly `n² + 2n + 1` multipliers and `n² + 2n` rows on top of
//! the nominal block. Because the uncertainty never touches the constraint
//! matrix, the counterpart also collapses to a closed form — boardings capped
//! at `μ - min(1, Γ)·σ` plus a constant protection premium — which the tests
//! use as an independent check on the dualized model.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_core::{RngCore, SeedableRng};

use crate::demand::FlowStats;
use crate::formulate::{
    add_capacity_rows, add_dispatch_block, flow_options, BuildError, BuiltModel, LambdaVar,
    ModelManifest, RobustManifest, VarCatalog,
};
use crate::instance::TransitInstance;
use crate::line::{wait_time, PassengerFlow};
use crate::math;
use crate::milp::{Sense, VarId};

/// Budgeted uncertainty around per-flow demand statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetUncertaintySet {
    flows: Vec<PassengerFlow>,
    mu: Vec<f64>,
    sigma: Vec<f64>,
    gamma: f64,
}

/// Invalid uncertainty-set inputs or queries.
#[derive(Clone, Debug, PartialEq)]
pub enum UncertaintyError {
    BadGamma { value: f64 },
    WrongLength { expected: usize, got: usize },
}

impl fmt::Display for UncertaintyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UncertaintyError::BadGamma { value } => {
                write!(f, "uncertainty budget must be finite and >= 0, got {value}")
            }
            UncertaintyError::WrongLength { expected, got } => {
                write!(f, "deviation vector has {got} entries, support has {expected}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for UncertaintyError {}

impl BudgetUncertaintySet {
    /// Builds the set from flow statistics (the support is the stats' key
    /// set, in flow order) and an uncertainty budget Γ. Budgets beyond the
    /// support size simply saturate at the box.
    pub fn from_stats(stats: &FlowStats, gamma: f64) -> Result<Self, UncertaintyError> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(UncertaintyError::BadGamma { value: gamma });
        }
        let mut flows = Vec::new();
        let mut mu = Vec::new();
        let mut sigma = Vec::new();
        for (flow, stat) in stats.iter() {
            flows.push(flow.clone());
            mu.push(stat.mean);
            sigma.push(stat.std);
        }
        Ok(BudgetUncertaintySet { flows, mu, sigma, gamma })
    }

    pub fn len(&self) -> usize {
        self.flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    pub fn flows(&self) -> &[PassengerFlow] {
        &self.flows
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn flow_index(&self, flow: &PassengerFlow) -> Option<usize> {
        self.flows.iter().position(|f| f == flow)
    }

    /// The center of the set as a demand map.
    pub fn nominal_demand(&self) -> BTreeMap<PassengerFlow, f64> {
        self.flows.iter().cloned().zip(self.mu.iter().copied()).collect()
    }

    /// Demand realized by a deviation vector: `μ + σ ∘ ζ`.
    pub fn realize(&self, zeta: &[f64]) -> Result<Vec<f64>, UncertaintyError> {
        if zeta.len() != self.flows.len() {
            return Err(UncertaintyError::WrongLength {
                expected: self.flows.len(),
                got: zeta.len(),
            });
        }
        Ok(zeta
            .iter()
            .zip(self.mu.iter().zip(&self.sigma))
            .map(|(&z, (&m, &s))| m + z * s)
            .collect())
    }

    /// Whether ζ lies in the budget set, up to `tol` on both norms.
    pub fn contains(&self, zeta: &[f64], tol: f64) -> bool {
        zeta.len() == self.flows.len()
            && zeta.iter().all(|&z| math::abs(z) <= 1.0 + tol)
            && zeta.iter().map(|&z| math::abs(z)).sum::<f64>() <= self.gamma + tol
    }

    /// Worst-case total upward deviation: `max { σᵀζ : ζ ∈ Z }`.
    pub fn protection(&self) -> f64 {
        box_budget_max(&self.sigma, 1.0, self.gamma)
    }

    /// Lowest demand any ζ in the set allows for flow `i`.
    pub fn availability(&self, i: usize) -> f64 {
        self.mu[i] - self.gamma.min(1.0) * self.sigma[i]
    }

    /// Deterministic enumeration of every candidate maximizer of a linear
    /// function over the set: all sign vectors with at most ⌊Γ⌋ entries at
    /// ±1, plus (for fractional Γ) those extended by one entry at ±(Γ-⌊Γ⌋).
    /// Exponential in the support size — intended for small supports.
    pub fn budget_vertices(&self) -> Vec<Vec<f64>> {
        let n = self.flows.len();
        let whole = math::floor(self.gamma);
        let k = if whole >= n as f64 { n } else { whole as usize };
        let frac = if k < n { self.gamma - whole } else { 0.0 };
        let mut out = Vec::new();
        let mut subset = Vec::new();
        enumerate_subsets(n, k, 0, &mut subset, &mut |chosen| {
            for mask in 0u32..(1u32 << chosen.len()) {
                let mut base = vec![0.0; n];
                for (b, &idx) in chosen.iter().enumerate() {
                    base[idx] = if mask >> b & 1 == 0 { 1.0 } else { -1.0 };
                }
                if chosen.len() == k && frac > 1e-12 {
                    for j in 0..n {
                        if chosen.contains(&j) {
                            continue;
                        }
                        for sign in [1.0, -1.0] {
                            let mut v = base.clone();
                            v[j] = sign * frac;
                            out.push(v);
                        }
                    }
                }
                // The whole-entry vector itself is always a candidate.
                out.push(base);
            }
        });
        out
    }
}

/// Calls `visit` on every subset of `{0..n}` with at most `k` elements, in
/// lexicographic order (including the empty set).
fn enumerate_subsets(
    n: usize,
    k: usize,
    from: usize,
    current: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    visit(current);
    if current.len() == k {
        return;
    }
    for i in from..n {
        current.push(i);
        enumerate_subsets(n, k, i + 1, current, visit);
        current.pop();
    }
}

/// Closed-form `max { cᵀζ : ‖ζ‖∞ ≤ rho, ‖ζ‖₁ ≤ gamma }`: greedily spend the
/// mass budget on the largest `|c_i|` first.
pub fn box_budget_max(c: &[f64], rho: f64, gamma: f64) -> f64 {
    let mut mags: Vec<f64> = c.iter().map(|&v| math::abs(v)).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut remaining = gamma;
    let mut total = 0.0;
    for m in mags {
        if remaining <= 0.0 {
            break;
        }
        let mass = rho.min(remaining);
        total += mass * m;
        remaining -= mass;
    }
    total
}

/// Auxiliary sizes the counterpart adds for a support of `n` flows:
/// `(n² + 2n + 1)` dual multipliers and `(n² + 2n)` dual rows. (The epigraph
/// variable and the availability rows replace nominal pieces and are not
/// counted as additions.)
pub fn rc_aux_counts(n: u64) -> (u64, u64) {
    (n * n + 2 * n + 1, n * n + 2 * n)
}

/// Builds the dualized robust counterpart. Solutions minimize the epigraph
/// variable `alpha`, an exact upper bound on the worst-case realized cost.
pub fn build_robust_counterpart(
    instance: &TransitInstance,
    uset: &BudgetUncertaintySet,
) -> Result<BuiltModel, BuildError> {
    let line = instance.line();
    let grid = instance.grid();
    let params = instance.params();
    let nv = instance.vehicle_types().len();
    let n = uset.len();
    let gamma_b = uset.gamma();
    let big_m = params.big_m;

    let mut model = crate::milp::MilpModel::new();
    let block = add_dispatch_block(&mut model, instance)?;

    // Boarding variables over the support, exactly as in the nominal model.
    let mut lambdas: Vec<LambdaVar> = Vec::new();
    let mut loads: BTreeMap<(usize, usize, usize, usize), Vec<(VarId, f64)>> = BTreeMap::new();
    // Per flow: its boarding variables and their journey costs.
    let mut flow_lambda: Vec<Vec<(VarId, f64)>> = Vec::with_capacity(n);
    for (i, flow) in uset.flows().iter().enumerate() {
        let mu_i = uset.mu()[i];
        let options = flow_options(line, grid, flow)?;
        let o = line.stop_position(&flow.origin).expect("validated");
        let d = line.stop_position(&flow.destination).expect("validated");
        let t = flow.period;
        let mut mine = Vec::new();
        for opt in &options {
            let p = opt.pattern;
            for v in 0..nv {
                for tau in opt.earliest..=grid.num_periods() {
                    let name = format!("lam_o{o}_d{d}_t{t}_p{p}_v{v}_tau{tau}");
                    let id = model.add_continuous(name, 0.0, mu_i.max(0.0))?;
                    let wait = wait_time(grid, opt.access, t, tau)
                        .expect("departures start at the earliest boardable period")
                        .as_f64();
                    let travel = opt.travel.as_f64();
                    mine.push((id, wait + params.gamma * travel));
                    for s in opt.seg_start..opt.seg_end {
                        loads.entry((p, v, s, tau)).or_default().push((id, 1.0));
                    }
                    lambdas.push(LambdaVar {
                        id,
                        scenario: 0,
                        flow: flow.clone(),
                        pattern: p,
                        vehicle_type: v,
                        departure: tau,
                        wait,
                        travel,
                    });
                }
            }
        }
        flow_lambda.push(mine);
    }

    // Dual multipliers. Finite upper bounds provably containing an optimum
    // keep the search space compact for the solver.
    let sum_mu: f64 = uset.mu().iter().sum();
    let sum_sigma: f64 = uset.sigma().iter().sum();
    let max_sigma = uset.sigma().iter().copied().fold(0.0f64, f64::max);
    let mut nu1 = Vec::with_capacity(n);
    for (i, &s) in uset.sigma().iter().enumerate() {
        nu1.push(model.add_continuous(format!("nu1_{i}"), 0.0, big_m * s)?);
    }
    let nu2 = model.add_continuous("nu2", 0.0, big_m * max_sigma)?;
    let mut nu3 = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            nu3.insert(
                (i, j),
                model.add_continuous(format!("nu3_{i}_{j}"), 0.0, uset.sigma()[i])?,
            );
        }
    }
    let mut nu4 = Vec::with_capacity(n);
    for (i, &s) in uset.sigma().iter().enumerate() {
        nu4.push(model.add_continuous(format!("nu4_{i}"), 0.0, s)?);
    }
    let alpha =
        model.add_continuous("alpha", 0.0, big_m * (sum_mu + sum_sigma) + 1.0)?;

    add_capacity_rows(&mut model, instance, None, &block.x, &loads)?;

    // Availability per flow: boardings plus the dualized worst-case dip stay
    // below the nominal demand.
    for i in 0..n {
        let mut terms: Vec<(VarId, f64)> = (0..n).map(|j| (nu3[&(i, j)], 1.0)).collect();
        terms.push((nu4[i], gamma_b));
        for &(id, _) in &flow_lambda[i] {
            terms.push((id, 1.0));
        }
        model.add_constraint(format!("avail_{i}"), terms, Sense::Le, uset.mu()[i])?;
    }

    // Epigraph: journey costs minus the penalty credit for served demand,
    // plus the dualized worst-case penalty, at most alpha.
    let mut epi: Vec<(VarId, f64)> = Vec::new();
    for mine in &flow_lambda {
        for &(id, journey) in mine {
            epi.push((id, journey - big_m));
        }
    }
    for &id in &nu1 {
        epi.push((id, 1.0));
    }
    epi.push((nu2, gamma_b));
    epi.push((alpha, -1.0));
    model.add_constraint("epigraph", epi, Sense::Le, -big_m * sum_mu)?;

    // Objective-side duals must cover ±M·σ per flow (the negative side is
    // vacuous for σ ≥ 0 but emitted so counts depend only on the shape).
    for i in 0..n {
        model.add_constraint(
            format!("sigma_pos_{i}"),
            [(nu1[i], 1.0), (nu2, 1.0)],
            Sense::Ge,
            big_m * uset.sigma()[i],
        )?;
        model.add_constraint(
            format!("sigma_neg_{i}"),
            [(nu1[i], 1.0), (nu2, 1.0)],
            Sense::Ge,
            -big_m * uset.sigma()[i],
        )?;
    }
    // Availability-side duals: row i's multipliers must cover σ_i on its own
    // coordinate and 0 elsewhere (again emitted in full).
    for i in 0..n {
        for j in 0..n {
            let rhs = if i == j { uset.sigma()[i] } else { 0.0 };
            model.add_constraint(
                format!("guard_{i}_{j}"),
                [(nu3[&(i, j)], 1.0), (nu4[i], 1.0)],
                Sense::Ge,
                rhs,
            )?;
        }
    }

    model.set_objective([(alpha, 1.0)])?;

    let (aux_vars, aux_rows) = rc_aux_counts(n as u64);
    let eta = BTreeMap::new();
    let manifest = ModelManifest {
        variables: model.num_vars(),
        constraints: model.num_constraints(),
        binaries: model.num_binaries(),
        x_vars: block.x.len(),
        y_vars: block.y.len(),
        z_vars: 0,
        lambda_vars: lambdas.len(),
        eta_vars: 0,
        budget_mode: block.budget_mode,
        scenarios: 1,
        flow_count: n,
        robust: Some(RobustManifest {
            support_size: n,
            gamma_budget: gamma_b,
            aux_vars,
            aux_rows,
            eta_eliminated: true,
        }),
    };
    Ok(BuiltModel {
        model,
        catalog: VarCatalog { x: block.x, y: block.y, z: BTreeMap::new(), lambdas, eta },
        manifest,
    })
}

/// Worst case over the uncertainty set for a *fixed* boarding plan.
#[derive(Clone, Debug, PartialEq)]
pub enum WorstCase {
    /// Worst realized cost and a deviation attaining it.
    Feasible { objective: f64, zeta: Vec<f64> },
    /// Some deviation makes the plan board more than the realized demand.
    Infeasible { flow: usize, zeta: Vec<f64>, deficit: f64 },
}

/// Evaluates a fixed plan (`journey_cost` = total journey minutes of the
/// boardings, `served[i]` = boardings of flow `i`) against the set: either
/// the worst-case objective `journey + M·(Σμ + protection - Σ served)` with
/// its attaining ζ, or the first availability violation found.
pub fn worst_case_oracle(
    uset: &BudgetUncertaintySet,
    journey_cost: f64,
    served: &[f64],
    big_m: f64,
    tol: f64,
) -> Result<WorstCase, UncertaintyError> {
    let n = uset.len();
    if served.len() != n {
        return Err(UncertaintyError::WrongLength { expected: n, got: served.len() });
    }
    let dip = uset.gamma().min(1.0);
    for i in 0..n {
        let worst_u = uset.mu()[i] - dip * uset.sigma()[i];
        if served[i] > worst_u + tol {
            let mut zeta = vec![0.0; n];
            zeta[i] = -dip;
            return Ok(WorstCase::Infeasible { flow: i, zeta, deficit: served[i] - worst_u });
        }
    }
    // The objective worst case pushes demand up on the largest σ first.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        uset.sigma()[b].total_cmp(&uset.sigma()[a]).then_with(|| a.cmp(&b))
    });
    let mut zeta = vec![0.0; n];
    let mut remaining = uset.gamma();
    for &i in &order {
        if remaining <= 0.0 {
            break;
        }
        let mass = remaining.min(1.0);
        zeta[i] = mass;
        remaining -= mass;
    }
    let unserved: f64 =
        uset.mu().iter().zip(served).map(|(&m, &s)| m - s).sum::<f64>() + uset.protection();
    Ok(WorstCase::Feasible { objective: journey_cost + big_m * unserved, zeta })
}

/// One feasibility/bound breach found while validating a robust solution.
#[derive(Clone, Debug, PartialEq)]
pub enum RobustViolation {
    /// Boardings of `flow` exceed the demand realized by `zeta`.
    Availability { flow: usize, zeta: Vec<f64>, amount: f64 },
    /// The realized cost under `zeta` exceeds the epigraph bound.
    Epigraph { zeta: Vec<f64>, amount: f64 },
}

/// Outcome of [`validate_robust_solution`].
#[derive(Clone, Debug)]
pub struct RobustCheck {
    /// Deviation vectors tested (samples plus enumerated vertices).
    pub candidates: usize,
    pub violations: Vec<RobustViolation>,
    /// Largest realized cost over all candidates.
    pub worst_objective: f64,
    /// The epigraph bound the solution claims (its objective value).
    pub objective_bound: f64,
}

/// Stress-tests a solved robust counterpart: draws `samples` deviations
/// uniformly from the box rescaled into the ℓ₁ ball (seeded, reproducible),
/// adds every budget vertex when the support has at most 12 flows, and
/// checks that boardings stay within realized demand and the realized cost
/// stays below the epigraph bound, within `tol`.
pub fn validate_robust_solution(
    instance: &TransitInstance,
    built: &BuiltModel,
    uset: &BudgetUncertaintySet,
    values: &[f64],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<RobustCheck, UncertaintyError> {
    let n = uset.len();
    let gamma = instance.params().gamma;
    let big_m = instance.params().big_m;

    let mut served = vec![0.0; n];
    let mut journey = 0.0;
    for lam in &built.catalog.lambdas {
        let i = uset
            .flow_index(&lam.flow)
            .ok_or(UncertaintyError::WrongLength { expected: n, got: n + 1 })?;
        let v = values[lam.id.index()];
        served[i] += v;
        journey += v * (lam.wait + gamma * lam.travel);
    }
    let alpha = built
        .model
        .var_by_name("alpha")
        .map(|id| values[id.index()])
        .unwrap_or(f64::NAN);

    let mut candidates: Vec<Vec<f64>> = Vec::new();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut zeta: Vec<f64> = (0..n)
            .map(|_| {
                let u = (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0);
                2.0 * u - 1.0
            })
            .collect();
        let l1: f64 = zeta.iter().map(|&z| math::abs(z)).sum();
        if l1 > uset.gamma() {
            let scale = if l1 > 0.0 { uset.gamma() / l1 } else { 0.0 };
            for z in &mut zeta {
                *z *= scale;
            }
        }
        candidates.push(zeta);
    }
    if n <= 12 {
        candidates.extend(uset.budget_vertices());
    }

    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for zeta in &candidates {
        let u = uset.realize(zeta)?;
        let mut realized = journey;
        for i in 0..n {
            let slack = u[i] - served[i];
            if slack < -tol {
                violations.push(RobustViolation::Availability {
                    flow: i,
                    zeta: zeta.clone(),
                    amount: -slack,
                });
            }
            realized += big_m * slack;
        }
        if realized > worst {
            worst = realized;
        }
        if realized > alpha + tol {
            violations.push(RobustViolation::Epigraph {
                zeta: zeta.clone(),
                amount: realized - alpha,
            });
        }
    }

    Ok(RobustCheck {
        candidates: candidates.len(),
        violations,
        worst_objective: worst,
        objective_bound: alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::{FlowStat, FlowStats};
    use crate::formulate::build_nominal;
    use crate::milp::{solve, SolveLimits};
    use crate::testkit::{flow, tiny_instance};

    fn tiny_stats() -> FlowStats {
        FlowStats::new([
            (flow("A", "C", 1), FlowStat { mean: 8.0, std: 2.0 }),
            (flow("A", "B", 2), FlowStat { mean: 5.0, std: 1.0 }),
        ])
        .unwrap()
    }

    #[test]
    fn protection_is_the_sorted_budget_sum() {
        assert_eq!(box_budget_max(&[3.0, 1.0, 2.0], 1.0, 1.5), 3.0 + 0.5 * 2.0);
        assert_eq!(box_budget_max(&[3.0, 1.0, 2.0], 1.0, 0.0), 0.0);
        assert_eq!(box_budget_max(&[3.0, 1.0, 2.0], 1.0, 10.0), 6.0);
        // rho scales the per-coordinate cap.
        assert_eq!(box_budget_max(&[4.0, 2.0], 0.5, 0.75), 0.5 * 4.0 + 0.25 * 2.0);
        // Signs do not matter.
        assert_eq!(box_budget_max(&[-3.0, 1.0], 1.0, 1.0), 3.0);
    }

    #[test]
    fn vertex_counts_match_the_combinatorics() {
        let mk = |n: usize, gamma: f64| {
            let stats = FlowStats::new((0..n).map(|i| {
                (PassengerFlow::new("A", "B", i + 1), FlowStat { mean: 1.0, std: 1.0 })
            }))
            .unwrap();
            BudgetUncertaintySet::from_stats(&stats, gamma).unwrap()
        };
        // n=12, Γ=2: 1 + 12·2 + 66·4 = 289 candidates.
        assert_eq!(mk(12, 2.0).budget_vertices().len(), 289);
        // n=2, Γ=1.5: 5 whole-entry vectors + 8 fractional extensions.
        assert_eq!(mk(2, 1.5).budget_vertices().len(), 13);
        // Γ=0: only the origin.
        assert_eq!(mk(3, 0.0).budget_vertices().len(), 1);
        // Γ beyond the dimension saturates at the full box corners and their
        // faces.
        let all = mk(2, 5.0).budget_vertices();
        assert_eq!(all.len(), 9); // subsets of size ≤ 2 with signs
        for z in &all {
            assert!(mk(2, 5.0).contains(z, 1e-12));
        }
    }

    #[test]
    fn vertices_attain_the_closed_form_maximum() {
        let mut state = 0x2458_71ae_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / 9007199254740992.0
        };
        for trial in 0..40 {
            let n = 2 + (trial % 5);
            let gamma = 3.0 * next();
            let stats = FlowStats::new((0..n).map(|i| {
                (PassengerFlow::new("A", "B", i + 1), FlowStat { mean: 1.0, std: next().max(1e-3) })
            }))
            .unwrap();
            let uset = BudgetUncertaintySet::from_stats(&stats, gamma).unwrap();
            let c: Vec<f64> = (0..n).map(|_| 2.0 * next() - 1.0).collect();
            let best_vertex = uset
                .budget_vertices()
                .iter()
                .map(|z| z.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            let closed = box_budget_max(&c, 1.0, gamma);
            assert!((best_vertex - closed).abs() < 1e-9, "{best_vertex} vs {closed}");
        }
    }

    #[test]
    fn aux_count_formula() {
        assert_eq!(rc_aux_counts(0), (1, 0));
        assert_eq!(rc_aux_counts(2), (9, 8));
        // The published case-study size: 6,336 flows.
        assert_eq!(rc_aux_counts(6_336), (40_157_569, 40_157_568));
    }

    #[test]
    fn built_counterpart_matches_the_count_identity() {
        let inst = tiny_instance();
        let uset = BudgetUncertaintySet::from_stats(&tiny_stats(), 1.0).unwrap();
        let built = build_robust_counterpart(&inst, &uset).unwrap();
        let m = &built.manifest;
        let rc = m.robust.as_ref().unwrap();
        assert_eq!(rc.support_size, 2);
        assert_eq!((rc.aux_vars, rc.aux_rows), rc_aux_counts(2));
        // variables: skeleton x/y + boardings + duals + alpha
        assert_eq!(
            m.variables as u64,
            (m.x_vars + m.y_vars + m.lambda_vars) as u64 + rc.aux_vars + 1
        );
        // rows: skeleton (budget 1 + single 6 + sparsity 12 + cap 1) +
        // capacity 18 + availability n + epigraph 1 + dual rows
        let skeleton = 1 + 6 + 12 + 1 + 18;
        assert_eq!(
            m.constraints as u64,
            skeleton + rc.support_size as u64 + 1 + rc.aux_rows
        );
        assert!(rc.eta_eliminated);
    }

    #[test]
    fn gamma_zero_equals_nominal_at_the_mean() {
        let inst = tiny_instance();
        let stats = tiny_stats();
        let uset = BudgetUncertaintySet::from_stats(&stats, 0.0).unwrap();
        let rc = build_robust_counterpart(&inst, &uset).unwrap();
        let nm = build_nominal(&inst, &uset.nominal_demand()).unwrap();
        let ro = solve(&rc.model, &SolveLimits::default()).unwrap();
        let no = solve(&nm.model, &SolveLimits::default()).unwrap();
        assert!(ro.is_feasible() && no.is_feasible());
        assert!(
            (ro.objective - no.objective).abs() < 1e-6,
            "robust {} vs nominal {}",
            ro.objective,
            no.objective
        );
    }

    #[test]
    fn objective_is_monotone_in_gamma_and_matches_the_separable_form() {
        let inst = tiny_instance();
        let stats = tiny_stats();
        let mut last = f64::NEG_INFINITY;
        for gamma_b in [0.0, 0.5, 1.0, 2.0] {
            let uset = BudgetUncertaintySet::from_stats(&stats, gamma_b).unwrap();
            let rc = build_robust_counterpart(&inst, &uset).unwrap();
            let ro = solve(&rc.model, &SolveLimits::default()).unwrap();
            assert!(ro.is_feasible());
            assert!(
                ro.objective >= last - 1e-7,
                "objective decreased: {} after {}",
                ro.objective,
                last
            );
            last = ro.objective;

            // Separable form: cap boardings at μ - min(1,Γ)σ, then add the
            // constant worst-case penalty premium.
            let dip = gamma_b.min(1.0);
            let capped: BTreeMap<PassengerFlow, f64> = uset
                .flows()
                .iter()
                .cloned()
                .zip(uset.mu().iter().zip(uset.sigma()).map(|(&m, &s)| m - dip * s))
                .collect();
            let nm = build_nominal(&inst, &capped).unwrap();
            let no = solve(&nm.model, &SolveLimits::default()).unwrap();
            let premium = inst.params().big_m
                * (dip * uset.sigma().iter().sum::<f64>() + uset.protection());
            assert!(
                (ro.objective - (no.objective + premium)).abs() < 1e-6,
                "Γ={gamma_b}: robust {} vs separable {}",
                ro.objective,
                no.objective + premium
            );
        }
    }

    #[test]
    fn oracle_flags_overcommitted_plans() {
        let uset = BudgetUncertaintySet::from_stats(&tiny_stats(), 1.0).unwrap();
        // Flow 0 is A→B@2 (BTreeMap order: destination B < C): μ=5, σ=1.
        assert_eq!(uset.flows()[0], flow("A", "B", 2));
        let bad = worst_case_oracle(&uset, 0.0, &[4.7, 6.0], 1000.0, 1e-9).unwrap();
        match bad {
            WorstCase::Infeasible { flow: f, deficit, ref zeta } => {
                assert_eq!(f, 0); // 4.7 > 5 - 1 = 4
                assert!((deficit - 0.7).abs() < 1e-9);
                assert_eq!(zeta[0], -1.0);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
        let ok = worst_case_oracle(&uset, 10.0, &[4.0, 6.0], 1000.0, 1e-9).unwrap();
        match ok {
            WorstCase::Feasible { objective, ref zeta } => {
                // unserved = (5-4)+(8-6) = 3, protection = max σ = 2.
                assert!((objective - (10.0 + 1000.0 * 5.0)).abs() < 1e-9);
                // Worst ζ rides the larger σ (flow 1, A→C).
                assert_eq!(zeta, &vec![0.0, 1.0]);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn solved_counterpart_survives_sampling() {
        let inst = tiny_instance();
        let uset = BudgetUncertaintySet::from_stats(&tiny_stats(), 1.5).unwrap();
        let built = build_robust_counterpart(&inst, &uset).unwrap();
        let sol = solve(&built.model, &SolveLimits::default()).unwrap();
        assert!(sol.is_feasible());
        let check =
            validate_robust_solution(&inst, &built, &uset, &sol.values, 500, 7, 1e-6).unwrap();
        assert!(check.violations.is_empty(), "violations: {:?}", check.violations);
        assert!(check.candidates >= 500);
        assert!(check.worst_objective <= check.objective_bound + 1e-6);

        // Corrupt the plan: push one boarding far above any availability.
        let mut bad = sol.values.clone();
        let lam = &built.catalog.lambdas[0];
        bad[lam.id.index()] += 100.0;
        let check =
            validate_robust_solution(&inst, &built, &uset, &bad, 100, 7, 1e-6).unwrap();
        assert!(check
            .violations
            .iter()
            .any(|v| matches!(v, RobustViolation::Availability { .. })));
    }

    #[test]
    fn realize_and_contains_round_trip() {
        let uset = BudgetUncertaintySet::from_stats(&tiny_stats(), 1.0).unwrap();
        let u = uset.realize(&[0.5, -0.5]).unwrap();
        // Flows sort as (A,B,2) then (A,C,1).
        assert_eq!(u, vec![5.0 + 0.5, 8.0 - 1.0]);
        assert!(uset.contains(&[0.5, -0.5], 0.0));
        assert!(!uset.contains(&[0.8, -0.5], 0.0)); // ℓ₁ = 1.3 > 1
        assert!(!uset.contains(&[1.2, 0.0], 0.0)); // box
        assert!(uset.realize(&[0.0]).is_err());
    }
}
