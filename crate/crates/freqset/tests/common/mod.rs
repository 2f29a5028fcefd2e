//! Shared generators and independent oracles for the acceptance suite.
//!
//! Everything here is deterministic in the given seed, and every oracle is
//! deliberately naive — exhaustive enumeration or closed-form arithmetic —
//! so it cannot share a bug with the production code paths it checks.

use std::collections::BTreeMap;

use freqset_core::demand::{FlowStat, FlowStats};
use freqset_core::instance::{BudgetRule, ModelParams, VehicleType};
use freqset_core::line::{PatternDef, TransitLine};
use freqset_core::milp::{
    solve_relaxation, MilpModel, Sense, SolveStatus, VarId, VarKind,
};
use freqset_core::{Minutes, PassengerFlow, TimeGrid, TransitInstance};
use rand_core::{RngCore, SeedableRng};

// ---------------------------------------------------------------------------
// Seeded randomness
// ---------------------------------------------------------------------------

pub struct TestRng(rand_chacha::ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range_usize(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.0.next_u64() % (hi - lo + 1) as u64) as usize
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }
}

// ---------------------------------------------------------------------------
// Random planning instances
// ---------------------------------------------------------------------------

/// A random instance with at most `max_stops` stops and `max_periods`
/// periods: full-line pattern, sometimes a second contiguous sub-pattern,
/// one or two vehicle types, a moderate budget, no extra dispatch rows.
pub fn random_instance(seed: u64, max_stops: usize, max_periods: usize) -> TransitInstance {
    let mut rng = TestRng::new(seed);
    let num_stops = rng.range_usize(3, max_stops);
    let stops: Vec<String> = (0..num_stops).map(|i| format!("s{i}")).collect();
    let num_periods = rng.range_usize(2, max_periods);

    let seg = |rng: &mut TestRng, len: usize| -> Vec<Minutes> {
        (0..len).map(|_| Minutes::from_minutes(rng.range_usize(2, 8) as i64)).collect()
    };
    let mut patterns = vec![PatternDef {
        id: "full".into(),
        stop_names: stops.clone(),
        segment_times: seg(&mut rng, num_stops - 1),
    }];
    if num_stops >= 4 && rng.chance(0.5) {
        // A contiguous sub-pattern of at least two stops.
        let first = rng.range_usize(0, num_stops - 2);
        let last = rng.range_usize(first + 1, num_stops - 1);
        patterns.push(PatternDef {
            id: "part".into(),
            stop_names: stops[first..=last].to_vec(),
            segment_times: seg(&mut rng, last - first),
        });
    }
    let num_patterns = patterns.len();
    let line = TransitLine::new(stops, patterns, num_patterns).expect("valid random line");
    let grid = TimeGrid::new(360, 10, num_periods).expect("valid grid");

    let mut vehicle_types = vec![VehicleType {
        id: "small".into(),
        seats: rng.range_usize(6, 12) as f64,
        max_capacity: rng.range_usize(14, 20) as f64,
    }];
    if rng.chance(0.5) {
        vehicle_types.push(VehicleType {
            id: "large".into(),
            seats: rng.range_usize(20, 30) as f64,
            max_capacity: rng.range_usize(34, 44) as f64,
        });
    }
    let costs: Vec<Vec<f64>> = (0..num_patterns)
        .map(|_| (0..vehicle_types.len()).map(|v| 1.0 + v as f64).collect())
        .collect();

    let budget = BudgetRule::Total(rng.range_usize(2, 8) as f64);
    let params = ModelParams { gamma: 1.0, big_m: 1e4, omega: 0.0, budget };
    TransitInstance::new(line, grid, vehicle_types, costs, Vec::new(), params)
        .expect("valid random instance")
}

/// Up to `max_flows` random flows on the instance, values drawn from
/// `0..=9` with roughly a third exactly zero. Returned map may be smaller
/// than `max_flows` when key collisions occur.
pub fn random_demand(
    seed: u64,
    instance: &TransitInstance,
    max_flows: usize,
) -> BTreeMap<PassengerFlow, f64> {
    let mut rng = TestRng::new(seed ^ 0x5eed_d00d);
    let num_stops = instance.line().num_stops();
    let num_periods = instance.grid().num_periods();
    let mut demand = BTreeMap::new();
    for _ in 0..max_flows {
        let origin = rng.range_usize(0, num_stops - 2);
        let destination = rng.range_usize(origin + 1, num_stops - 1);
        let period = rng.range_usize(1, num_periods);
        let count = if rng.chance(0.34) { 0 } else { rng.range_usize(1, 9) };
        demand.insert(
            PassengerFlow::new(format!("s{origin}"), format!("s{destination}"), period),
            count as f64,
        );
    }
    demand
}

/// Random per-flow statistics on the instance: `support` flows with means in
/// (0.3, 4.0] and deviations in [0, mean] (so realized demand stays
/// nonnegative for every deviation in the budget set).
pub fn random_stats(seed: u64, instance: &TransitInstance, support: usize) -> FlowStats {
    let mut rng = TestRng::new(seed ^ 0x57a7_57a7);
    let num_stops = instance.line().num_stops();
    let num_periods = instance.grid().num_periods();
    let mut entries = BTreeMap::new();
    while entries.len() < support {
        let origin = rng.range_usize(0, num_stops - 2);
        let destination = rng.range_usize(origin + 1, num_stops - 1);
        let period = rng.range_usize(1, num_periods);
        let mean = rng.range_f64(0.3, 4.0);
        let std = rng.range_f64(0.0, mean);
        entries.insert(
            PassengerFlow::new(format!("s{origin}"), format!("s{destination}"), period),
            FlowStat { mean, std },
        );
    }
    FlowStats::new(entries).expect("positive means")
}

// ---------------------------------------------------------------------------
// Random MILPs and the exhaustive-enumeration oracle
// ---------------------------------------------------------------------------

/// A random bounded MILP: `num_bin` binaries, `num_cont` box-bounded
/// continuous variables, random objective, and a random mix of <=, >=, and
/// occasional == rows. Finite bounds everywhere keep every subproblem
/// bounded.
pub fn random_milp(seed: u64, num_bin: usize, num_cont: usize) -> MilpModel {
    let mut rng = TestRng::new(seed ^ 0x311f_beef);
    let mut model = MilpModel::new();
    let mut vars = Vec::new();
    for i in 0..num_bin {
        vars.push(model.add_binary(format!("b{i}")).unwrap());
    }
    for i in 0..num_cont {
        let lo = rng.range_f64(-5.0, 0.0);
        let hi = rng.range_f64(0.0, 5.0);
        vars.push(model.add_continuous(format!("c{i}"), lo, hi).unwrap());
    }
    let objective: Vec<(VarId, f64)> = vars
        .iter()
        .map(|&v| (v, if rng.chance(0.1) { 0.0 } else { rng.range_f64(-10.0, 10.0) }))
        .collect();
    model.set_objective(objective).unwrap();

    let rows = rng.range_usize(2, (vars.len()).max(3).min(18));
    for r in 0..rows {
        let terms: Vec<(VarId, f64)> = (0..rng.range_usize(1, vars.len().min(5)))
            .map(|_| (vars[rng.range_usize(0, vars.len() - 1)], rng.range_f64(-4.0, 4.0)))
            .collect();
        let sense = match rng.range_usize(0, 19) {
            0..=2 => Sense::Eq,
            3..=10 => Sense::Ge,
            _ => Sense::Le,
        };
        model.add_constraint(format!("r{r}"), terms, sense, rng.range_f64(-10.0, 10.0)).unwrap();
    }
    model
}

/// Exhaustive oracle: tries every 0/1 assignment of the binaries, solving
/// the continuous remainder as an LP with the binaries pinned by bounds.
/// Returns the optimal objective, or `None` when every assignment is
/// infeasible. Exponential by design; keep the binary count small.
pub fn enumerate_optimum(model: &MilpModel) -> Option<f64> {
    let binaries: Vec<usize> = model
        .vars()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(i, _)| i)
        .collect();
    assert!(binaries.len() <= 16, "oracle would enumerate 2^{}", binaries.len());

    let mut best: Option<f64> = None;
    for mask in 0u64..(1u64 << binaries.len()) {
        let pinned = pin_binaries(model, &binaries, mask);
        let sol = solve_relaxation(&pinned).expect("relaxation runs");
        if sol.status == SolveStatus::Optimal {
            best = Some(best.map_or(sol.objective, |b: f64| b.min(sol.objective)));
        }
    }
    best
}

/// Clones `model` with each binary in `binaries` re-declared as a continuous
/// variable fixed to its bit in `mask`.
fn pin_binaries(model: &MilpModel, binaries: &[usize], mask: u64) -> MilpModel {
    let mut pinned = MilpModel::new();
    let ids: Vec<VarId> = model
        .vars()
        .iter()
        .enumerate()
        .map(|(i, v)| match binaries.iter().position(|&b| b == i) {
            Some(bit) => {
                let value = (mask >> bit & 1) as f64;
                pinned.add_continuous(v.name.clone(), value, value).unwrap()
            }
            None => match v.kind {
                VarKind::Binary => pinned.add_binary(v.name.clone()).unwrap(),
                VarKind::Continuous => {
                    pinned.add_continuous(v.name.clone(), v.lower, v.upper).unwrap()
                }
            },
        })
        .collect();
    pinned
        .set_objective(model.objective().iter().map(|&(v, c)| (ids[v.index()], c)))
        .unwrap();
    for row in model.constraints() {
        pinned
            .add_constraint(
                row.name.clone(),
                row.terms.iter().map(|&(v, c)| (ids[v.index()], c)),
                row.sense,
                row.rhs,
            )
            .unwrap();
    }
    pinned
}

// ---------------------------------------------------------------------------
// Norm-dual oracle for the uncertainty protection term
// ---------------------------------------------------------------------------

/// Solves `min Γθ + Σ uᵢ s.t. θ + uᵢ ≥ |wᵢ|, θ ≥ 0, u ≥ 0` as an explicit
/// LP — the dual of maximizing `Σ wᵢ ζᵢ` over the budget set. Independent of
/// both the closed-form greedy and the vertex enumeration it is checked
/// against.
pub fn dual_protection_lp(weights: &[f64], gamma: f64) -> f64 {
    let mut model = MilpModel::new();
    let theta = model.add_continuous("theta", 0.0, f64::INFINITY).unwrap();
    let slacks: Vec<VarId> = (0..weights.len())
        .map(|i| model.add_continuous(format!("u{i}"), 0.0, f64::INFINITY).unwrap())
        .collect();
    let mut objective = vec![(theta, gamma)];
    objective.extend(slacks.iter().map(|&u| (u, 1.0)));
    model.set_objective(objective).unwrap();
    for (i, &w) in weights.iter().enumerate() {
        model
            .add_constraint(format!("dom{i}"), [(theta, 1.0), (slacks[i], 1.0)], Sense::Ge, w.abs())
            .unwrap();
    }
    let sol = solve_relaxation(&model).expect("dual LP runs");
    assert_eq!(sol.status, SolveStatus::Optimal, "dual LP must be solvable");
    sol.objective
}

/// Brute-force `max Σ wᵢ ζᵢ` over explicit extreme points of the budget set
/// `{‖ζ‖∞ ≤ 1, ‖ζ‖₁ ≤ γ}`.
pub fn vertex_max(weights: &[f64], vertices: &[Vec<f64>]) -> f64 {
    vertices
        .iter()
        .map(|zeta| zeta.iter().zip(weights).map(|(z, w)| z * w).sum::<f64>())
        .fold(0.0, f64::max)
}
