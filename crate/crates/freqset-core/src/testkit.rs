//! Shared fixtures for unit tests: a small line with a full-length and a
//! short-turn pattern, two vehicle types, and convenience constructors.

use alloc::string::ToString;
use alloc::vec;

use crate::instance::{ModelParams, TransitInstance, VehicleType};
use crate::line::{PassengerFlow, PatternDef, TransitLine};
use crate::time::TimeGrid;

pub(crate) fn tiny_line() -> TransitLine {
    TransitLine::new(
        vec!["A".to_string(), "B".to_string(), "C".to_string()],
        vec![
            PatternDef {
                id: "full".to_string(),
                stop_names: vec!["A".to_string(), "B".to_string(), "C".to_string()],
                segment_times: vec![crate::time::Minutes::from_minutes(4), crate::time::Minutes::from_minutes(5)],
            },
            PatternDef {
                id: "short".to_string(),
                stop_names: vec!["A".to_string(), "B".to_string()],
                segment_times: vec![crate::time::Minutes::from_minutes(4)],
            },
        ],
        2,
    )
    .unwrap()
}

/// Grid with three 5-minute periods, two vehicle types, unit dispatch costs,
/// `gamma = 1`, a dominating penalty, and a total budget of 4.
pub(crate) fn tiny_instance() -> TransitInstance {
    let line = tiny_line();
    let grid = TimeGrid::new(420, 5, 3).unwrap();
    let vehicles = vec![
        VehicleType { id: "small".to_string(), seats: 10.0, max_capacity: 15.0 },
        VehicleType { id: "big".to_string(), seats: 20.0, max_capacity: 30.0 },
    ];
    TransitInstance::with_unit_costs(line, grid, vehicles, ModelParams::new(1.0, 1000.0, 4.0))
        .unwrap()
}

pub(crate) fn flow(origin: &str, destination: &str, period: usize) -> PassengerFlow {
    PassengerFlow::new(origin, destination, period)
}
