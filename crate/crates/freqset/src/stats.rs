//! Per-flow demand statistics over a scenario set.

use std::collections::BTreeMap;

use thiserror::Error;

use freqset_core::demand::{FlowStat, FlowStats, ScenarioSet};
use freqset_core::PassengerFlow;

#[derive(Debug, Error)]
pub enum DemandStatsError {
    #[error("cannot compute statistics over an empty scenario set")]
    Empty,
}

/// Sample mean and population standard deviation per flow, over all `m`
/// scenarios. The scenarios are treated as equally weighted observations
/// (historical days), so the set's probabilities are not consulted. A flow
/// missing from a scenario counts as zero there; flows whose mean comes out
/// zero are left out of the result, so its support is exactly the flows that
/// ever appear.
///
/// Population (not sample) deviation: the `m` days are taken as the complete
/// description of variability, which keeps uncertainty-budget calibration
/// reproducible from the file alone.
pub fn demand_stats(set: &ScenarioSet) -> Result<FlowStats, DemandStatsError> {
    let m = set.len();
    if m == 0 {
        return Err(DemandStatsError::Empty);
    }
    let mut sums: BTreeMap<PassengerFlow, (f64, f64)> = BTreeMap::new();
    for scenario in set.scenarios() {
        for (flow, count) in scenario.iter() {
            let x = count as f64;
            let entry = sums.entry(flow.clone()).or_insert((0.0, 0.0));
            entry.0 += x;
            entry.1 += x * x;
        }
    }
    let m = m as f64;
    let entries = sums.into_iter().filter_map(|(flow, (sum, sumsq))| {
        let mean = sum / m;
        if mean <= 0.0 {
            return None;
        }
        let var = (sumsq / m - mean * mean).max(0.0);
        Some((flow, FlowStat { mean, std: var.sqrt() }))
    });
    // Means are positive by construction, so this cannot fail.
    Ok(FlowStats::new(entries).expect("positive means"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use freqset_core::demand::DemandScenario;

    fn flow(t: usize) -> PassengerFlow {
        PassengerFlow::new("a", "b", t)
    }

    #[test]
    fn singleton_set_reproduces_counts_with_zero_std() {
        let s = DemandScenario::new("day1", [(flow(1), 4), (flow(2), 9)]);
        let set = ScenarioSet::uniform(vec![s]).unwrap();
        let stats = demand_stats(&set).unwrap();
        assert_eq!(stats.get(&flow(1)), Some(FlowStat { mean: 4.0, std: 0.0 }));
        assert_eq!(stats.get(&flow(2)), Some(FlowStat { mean: 9.0, std: 0.0 }));
        assert_eq!(stats.len(), 2);
    }

    #[test]
    fn two_observations_give_population_deviation() {
        // Counts {2, 4}: mean 3, population variance ((2-3)^2 + (4-3)^2)/2 = 1.
        let a = DemandScenario::new("a", [(flow(1), 2)]);
        let b = DemandScenario::new("b", [(flow(1), 4)]);
        let set = ScenarioSet::uniform(vec![a, b]).unwrap();
        let stats = demand_stats(&set).unwrap();
        let stat = stats.get(&flow(1)).unwrap();
        assert!((stat.mean - 3.0).abs() < 1e-12);
        assert!((stat.std - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_flows_count_as_zeros() {
        // Flow present once with count 3 over m = 3 days: mean 1,
        // variance (2·1 + 4)/3 = 2.
        let a = DemandScenario::new("a", [(flow(1), 3)]);
        let b = DemandScenario::new("b", []);
        let c = DemandScenario::new("c", []);
        let set = ScenarioSet::uniform(vec![a, b, c]).unwrap();
        let stats = demand_stats(&set).unwrap();
        let stat = stats.get(&flow(1)).unwrap();
        assert!((stat.mean - 1.0).abs() < 1e-12);
        assert!((stat.std - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn absent_everywhere_means_absent_from_stats() {
        let a = DemandScenario::new("a", [(flow(1), 1)]);
        let set = ScenarioSet::uniform(vec![a]).unwrap();
        let stats = demand_stats(&set).unwrap();
        assert!(!stats.contains(&flow(5)));
    }
}
