//! Serialization round trips and schema rejection for every file format.

use std::path::{Path, PathBuf};

use freqset::files::{
    load_instance, load_scenario_input, load_scenarios, load_schedule, load_solution, load_stats,
    save_instance, save_scenarios, save_schedule, save_stats, FileError,
};
use freqset_core::demand::{DemandScenario, FlowStat, FlowStats};
use freqset_core::{PassengerFlow, Schedule};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn fixture_instance_loads_with_expected_shape() {
    let instance = load_instance(&fixture("two_pattern_small.json")).unwrap();
    assert_eq!(instance.line().num_stops(), 6);
    assert_eq!(instance.line().patterns().len(), 2);
    assert_eq!(instance.grid().num_periods(), 24);
    assert_eq!(instance.vehicle_types().len(), 2);
    // Per-pattern costs resolved onto the (pattern, type) matrix.
    let full = instance.line().pattern_index("full").unwrap();
    let short = instance.line().pattern_index("short").unwrap();
    let articulated = instance.vehicle_type_index("articulated").unwrap();
    assert_eq!(instance.dispatch_cost(full, articulated), 2.0);
    assert_eq!(instance.dispatch_cost(short, articulated), 1.5);
    // The per-type budget follows the vehicle-type order.
    assert_eq!(
        instance.params().budget,
        freqset_core::BudgetRule::PerType(vec![12.0, 8.0])
    );
    assert_eq!(instance.dispatch_rows().len(), 1);
}

#[test]
fn instance_save_load_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["two_pattern_small.json", "tiny_line.json"] {
        let original = load_instance(&fixture(name)).unwrap();
        let path = dir.path().join(name);
        save_instance(&path, &original).unwrap();
        let reloaded = load_instance(&path).unwrap();
        assert_eq!(original, reloaded, "{name}");
    }
}

#[test]
fn pattern_stop_out_of_line_order_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("tiny_line.json")).unwrap()).unwrap();
    // Reverse one pattern's stop list; the line order is untouched.
    let stops = doc["patterns"][0]["stop_ids"].as_array_mut().unwrap();
    stops.reverse();
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let err = load_instance(&path).unwrap_err();
    assert!(matches!(err, FileError::Schema { .. }), "{err}");
}

#[test]
fn empty_pattern_list_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let doc = serde_json::json!({
        "stops": ["a", "b"],
        "time_grid": { "start_minute": 0, "end_minute": 10, "delta_minutes": 5 },
        "patterns": [],
        "vehicle_types": [{ "id": "bus", "seats": 10.0, "max_capacity": 15.0 }],
        "max_active_patterns": 1
    });
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let err = load_instance(&path).unwrap_err();
    assert!(matches!(err, FileError::Schema { .. }), "{err}");
}

#[test]
fn unknown_top_level_field_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = std::fs::read_to_string(fixture("tiny_line.json"))
        .unwrap()
        .replace("\"stops\"", "\"stopss\"");
    std::fs::write(&path, text).unwrap();
    let err = load_instance(&path).unwrap_err();
    assert!(matches!(err, FileError::Json { .. }), "{err}");
}

#[test]
fn scenario_file_round_trips_sorted_by_id() {
    let scenarios = load_scenarios(&fixture("tiny_scenarios.csv")).unwrap();
    assert_eq!(scenarios.len(), 4);
    let ids: Vec<_> = scenarios.iter().map(|s| s.id().to_string()).collect();
    assert_eq!(ids, ["s00", "s01", "s02", "s03"]);
    assert_eq!(scenarios[0].count(&PassengerFlow::new("harbor", "center", 1)), 8);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("again.csv");
    save_scenarios(&path, &scenarios).unwrap();
    assert_eq!(load_scenarios(&path).unwrap(), scenarios);
}

#[test]
fn duplicate_flow_within_a_scenario_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.csv");
    std::fs::write(
        &path,
        "scenario_id,origin,destination,period,count\ns1,a,b,1,3\ns1,a,b,1,4\n",
    )
    .unwrap();
    let err = load_scenarios(&path).unwrap_err();
    assert!(matches!(err, FileError::Schema { .. }), "{err}");
}

#[test]
fn wrong_scenario_header_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("head.csv");
    std::fs::write(&path, "scenario,origin,destination,period,count\n").unwrap();
    let err = load_scenarios(&path).unwrap_err();
    assert!(matches!(err, FileError::Csv { .. }), "{err}");
}

#[test]
fn scenario_directories_merge_and_reject_duplicate_ids() {
    let dir = tempfile::tempdir().unwrap();
    let header = "scenario_id,origin,destination,period,count\n";
    std::fs::write(dir.path().join("b.csv"), format!("{header}day2,a,b,1,2\n")).unwrap();
    std::fs::write(dir.path().join("a.csv"), format!("{header}day1,a,b,1,1\n")).unwrap();
    std::fs::write(dir.path().join("ignore.txt"), "not a scenario").unwrap();
    let merged = load_scenario_input(dir.path()).unwrap();
    let ids: Vec<_> = merged.iter().map(|s| s.id().to_string()).collect();
    assert_eq!(ids, ["day1", "day2"]);

    std::fs::write(dir.path().join("c.csv"), format!("{header}day1,a,b,2,5\n")).unwrap();
    let err = load_scenario_input(dir.path()).unwrap_err();
    assert!(matches!(err, FileError::Schema { .. }), "{err}");
}

#[test]
fn stats_file_round_trips() {
    let stats = load_stats(&fixture("tiny_stats.csv")).unwrap();
    assert_eq!(stats.len(), 6);
    assert_eq!(
        stats.get(&PassengerFlow::new("harbor", "center", 1)),
        Some(FlowStat { mean: 5.0, std: 2.0 })
    );

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stats.csv");
    save_stats(&path, &stats).unwrap();
    assert_eq!(load_stats(&path).unwrap(), stats);

    // Values that stress float formatting survive the trip exactly.
    let tricky = FlowStats::new([
        (PassengerFlow::new("a", "b", 1), FlowStat { mean: 0.1 + 0.2, std: 1e-9 }),
        (PassengerFlow::new("a", "b", 2), FlowStat { mean: 1234567.25, std: 0.333333333333333 }),
    ])
    .unwrap();
    save_stats(&path, &tricky).unwrap();
    assert_eq!(load_stats(&path).unwrap(), tricky);
}

#[test]
fn zero_mean_stats_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stats.csv");
    std::fs::write(&path, "origin,destination,period,mean,std\na,b,1,0.0,1.0\n").unwrap();
    let err = load_stats(&path).unwrap_err();
    assert!(matches!(err, FileError::Schema { .. }), "{err}");
}

#[test]
fn schedule_round_trips_against_its_instance() {
    let instance = load_instance(&fixture("tiny_line.json")).unwrap();
    let current = load_schedule(&fixture("tiny_current.json"), &instance).unwrap();
    assert_eq!(current.num_dispatches(), 2);

    let schedule = Schedule::from_dispatches([(0, 0, 1), (0, 1, 3), (1, 0, 4)]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("schedule.json");
    save_schedule(&path, &schedule, &instance).unwrap();
    assert_eq!(load_schedule(&path, &instance).unwrap(), schedule);
}

#[test]
fn schedule_with_unknown_ids_or_bad_period_is_rejected() {
    let instance = load_instance(&fixture("tiny_line.json")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("schedule.json");

    std::fs::write(
        &path,
        r#"{"dispatches":[{"pattern":"loop","vehicle_type":"bus","period":0}]}"#,
    )
    .unwrap();
    assert!(matches!(load_schedule(&path, &instance), Err(FileError::Schema { .. })));

    // Periods are 1-based: both 0 and anything past the horizon are invalid.
    for bad in ["0", "99"] {
        std::fs::write(
            &path,
            format!(r#"{{"dispatches":[{{"pattern":"full","vehicle_type":"bus","period":{bad}}}]}}"#),
        )
        .unwrap();
        assert!(matches!(load_schedule(&path, &instance), Err(FileError::Schema { .. })));
    }
}

#[test]
fn solution_csv_keeps_order_and_rejects_duplicates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("solution.csv");
    std::fs::write(&path, "variable,value\nx_a,1\nx_b,0.5\n").unwrap();
    let pairs = load_solution(&path).unwrap();
    assert_eq!(pairs, vec![("x_a".to_string(), 1.0), ("x_b".to_string(), 0.5)]);

    std::fs::write(&path, "variable,value\nx_a,1\nx_a,0\n").unwrap();
    assert!(matches!(load_solution(&path), Err(FileError::Schema { .. })));
}

#[test]
fn statistics_derived_from_scenarios_match_hand_arithmetic() {
    // Across the four fixture scenarios, harbor→center@1 appears with
    // counts {8, 12, 0, 0}: mean 5, population variance (9+49+25+25)/4 = 27.
    let scenarios = load_scenarios(&fixture("tiny_scenarios.csv")).unwrap();
    let set = freqset_core::demand::ScenarioSet::uniform(scenarios).unwrap();
    let stats = freqset::stats::demand_stats(&set).unwrap();
    let stat = stats.get(&PassengerFlow::new("harbor", "center", 1)).unwrap();
    assert!((stat.mean - 5.0).abs() < 1e-12);
    assert!((stat.std - 27.0f64.sqrt()).abs() < 1e-12);
}

#[test]
fn synthetic_scenarios_validate_against_the_fixture_instance() {
    let instance = load_instance(&fixture("tiny_line.json")).unwrap();
    let stats = load_stats(&fixture("tiny_stats.csv")).unwrap();
    let scenarios = freqset::synth::synth_scenarios(&stats, 4.0, 7, 5).unwrap();
    for scenario in &scenarios {
        scenario.validate(instance.line(), instance.grid()).unwrap();
    }
    // With β = 4 and means up to 5, at least one draw lands positive.
    assert!(scenarios.iter().any(|s| s.total_demand() > 0.0));
    let round: Vec<DemandScenario> = {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("synth.csv");
        save_scenarios(&path, &scenarios).unwrap();
        load_scenarios(&path).unwrap()
    };
    assert_eq!(round, scenarios);
}
