//! The transit line: stop sequence, service patterns, passenger flows, and
//! the begin-of-period timing rules that decide which departures a passenger
//! can board and how long they wait.
//!
//! Timing conventions (used consistently by the model builders and the
//! evaluator):
//!
//! * Period `t` begins at instant `(t-1)·Δ` past the grid start; passengers
//!   with arrival period `t` stand at their origin from that instant.
//! * A vehicle dispatched in period `τ` leaves the pattern's first stop at
//!   `(τ-1)·Δ` and reaches stop `o` after the pattern's cumulative running
//!   time to `o` (zero dwell).
//! * A passenger can board any vehicle that reaches the origin at or after
//!   the passenger's arrival instant (ties board).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::time::{Minutes, TimeGrid};

/// A service pattern: an ordered subset of the line's stops with exact
/// per-segment running times. Built through [`TransitLine::new`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    id: String,
    stop_positions: Vec<usize>,
    segment_times: Vec<Minutes>,
    cumulative: Vec<Minutes>,
}

/// Pattern description as supplied by callers; stops are named, validation
/// and position resolution happen in [`TransitLine::new`].
#[derive(Clone, Debug)]
pub struct PatternDef {
    pub id: String,
    pub stop_names: Vec<String>,
    pub segment_times: Vec<Minutes>,
}

impl Pattern {
    pub fn id(&self) -> &str {
        &self.id
    }

    /// Positions (indices into the line's stop list) served, in travel order.
    pub fn stop_positions(&self) -> &[usize] {
        &self.stop_positions
    }

    pub fn num_stops(&self) -> usize {
        self.stop_positions.len()
    }

    /// Segments are indexed by their head stop's index *within the pattern*:
    /// segment `i` runs from the pattern's `i`-th to its `i+1`-th stop.
    pub fn num_segments(&self) -> usize {
        self.segment_times.len()
    }

    pub fn segment_time(&self, segment: usize) -> Minutes {
        self.segment_times[segment]
    }

    /// Total running time over the whole pattern.
    pub fn total_time(&self) -> Minutes {
        self.cumulative[self.cumulative.len() - 1]
    }

    /// Index within the pattern of the line stop at `position`, if served.
    pub fn index_of(&self, position: usize) -> Option<usize> {
        self.stop_positions.binary_search(&position).ok()
    }

    pub fn serves(&self, position: usize) -> bool {
        self.index_of(position).is_some()
    }

    /// Exact running time from the stop at line position `from` to the stop
    /// at line position `to`; `None` unless the pattern serves both in that
    /// order.
    ///
    /// With segment times 3, 4, 5 minutes over four stops, first to fourth is
    /// 12 minutes and second to third is 4.
    pub fn time_between(&self, from: usize, to: usize) -> Option<Minutes> {
        let i = self.index_of(from)?;
        let j = self.index_of(to)?;
        if i > j {
            return None;
        }
        Some(self.cumulative[j] - self.cumulative[i])
    }

    /// Running time from the pattern's first stop to the stop at line
    /// position `pos` (the access time used in the boarding rules).
    pub fn access_time(&self, pos: usize) -> Option<Minutes> {
        let i = self.index_of(pos)?;
        Some(self.cumulative[i])
    }

    /// Segment indices a passenger riding `from → to` occupies: boarding at
    /// the segment whose head is the origin, alighting before the segment
    /// whose head is the destination. Empty range when `from == to`.
    pub fn segments_between(&self, from: usize, to: usize) -> Option<core::ops::Range<usize>> {
        let i = self.index_of(from)?;
        let j = self.index_of(to)?;
        if i > j {
            return None;
        }
        Some(i..j)
    }
}

/// A single transit line: named stops in travel order plus the service
/// patterns that may run on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitLine {
    stops: Vec<String>,
    patterns: Vec<Pattern>,
    max_active_patterns: usize,
}

impl TransitLine {
    /// Validates and builds the line. Every pattern must visit at least two
    /// stops, in strictly increasing line order, with one positive segment
    /// time per consecutive stop pair.
    pub fn new(
        stops: Vec<String>,
        patterns: Vec<PatternDef>,
        max_active_patterns: usize,
    ) -> Result<Self, LineError> {
        if stops.len() < 2 {
            return Err(LineError::TooFewStops { got: stops.len() });
        }
        for (i, s) in stops.iter().enumerate() {
            if s.is_empty() {
                return Err(LineError::EmptyStopName { position: i });
            }
            if stops[..i].contains(s) {
                return Err(LineError::DuplicateStop { stop: s.clone() });
            }
        }
        if patterns.is_empty() {
            return Err(LineError::NoPatterns);
        }
        let mut built = Vec::with_capacity(patterns.len());
        for def in patterns {
            if def.id.is_empty() {
                return Err(LineError::EmptyPatternId);
            }
            if built.iter().any(|p: &Pattern| p.id == def.id) {
                return Err(LineError::DuplicatePatternId { id: def.id });
            }
            if def.stop_names.len() < 2 {
                return Err(LineError::PatternTooShort { id: def.id, got: def.stop_names.len() });
            }
            let mut positions = Vec::with_capacity(def.stop_names.len());
            for name in &def.stop_names {
                let pos = stops.iter().position(|s| s == name).ok_or_else(|| {
                    LineError::UnknownStopInPattern { id: def.id.clone(), stop: name.clone() }
                })?;
                if let Some(&last) = positions.last() {
                    if pos <= last {
                        return Err(LineError::PatternOutOfOrder {
                            id: def.id.clone(),
                            stop: name.clone(),
                        });
                    }
                }
                positions.push(pos);
            }
            if def.segment_times.len() != positions.len() - 1 {
                return Err(LineError::SegmentCountMismatch {
                    id: def.id,
                    stops: positions.len(),
                    segments: def.segment_times.len(),
                });
            }
            if let Some(bad) = def.segment_times.iter().find(|m| m.tenths() <= 0) {
                return Err(LineError::NonPositiveSegmentTime { id: def.id, time: *bad });
            }
            let mut cumulative = Vec::with_capacity(positions.len());
            let mut acc = Minutes::ZERO;
            cumulative.push(acc);
            for &seg in &def.segment_times {
                acc += seg;
                cumulative.push(acc);
            }
            built.push(Pattern {
                id: def.id,
                stop_positions: positions,
                segment_times: def.segment_times,
                cumulative,
            });
        }
        Ok(TransitLine { stops, patterns: built, max_active_patterns })
    }

    pub fn stops(&self) -> &[String] {
        &self.stops
    }

    pub fn num_stops(&self) -> usize {
        self.stops.len()
    }

    pub fn stop_position(&self, name: &str) -> Option<usize> {
        self.stops.iter().position(|s| s == name)
    }

    pub fn stop_name(&self, position: usize) -> &str {
        &self.stops[position]
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn pattern(&self, index: usize) -> &Pattern {
        &self.patterns[index]
    }

    pub fn pattern_index(&self, id: &str) -> Option<usize> {
        self.patterns.iter().position(|p| p.id == id)
    }

    /// Cap on how many patterns may be active simultaneously.
    pub fn max_active_patterns(&self) -> usize {
        self.max_active_patterns
    }

    /// Pattern indices that serve `origin` strictly before `destination`.
    pub fn patterns_serving(&self, origin: usize, destination: usize) -> Vec<usize> {
        self.patterns
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                matches!((p.index_of(origin), p.index_of(destination)), (Some(i), Some(j)) if i < j)
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// All ordered stop pairs `(origin, destination)` with the origin earlier
    /// on the line; there are `n·(n-1)/2` of them.
    pub fn ordered_stop_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.stops.len();
        (0..n).flat_map(move |o| (o + 1..n).map(move |d| (o, d)))
    }

    /// Longest total running time over all patterns (used for penalty
    /// dominance checks).
    pub fn max_pattern_time(&self) -> Minutes {
        self.patterns.iter().map(|p| p.total_time()).max().unwrap_or(Minutes::ZERO)
    }
}

/// A passenger flow key: origin stop, destination stop, arrival period.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PassengerFlow {
    pub origin: String,
    pub destination: String,
    pub period: usize,
}

impl PassengerFlow {
    pub fn new(origin: impl Into<String>, destination: impl Into<String>, period: usize) -> Self {
        PassengerFlow { origin: origin.into(), destination: destination.into(), period }
    }

    /// Checks the flow against a line and grid: both stops must exist, the
    /// origin must precede the destination on the line, and the period must
    /// lie on the grid.
    pub fn validate(&self, line: &TransitLine, grid: &TimeGrid) -> Result<(), FlowError> {
        let o = line
            .stop_position(&self.origin)
            .ok_or_else(|| FlowError::UnknownStop { stop: self.origin.clone() })?;
        let d = line
            .stop_position(&self.destination)
            .ok_or_else(|| FlowError::UnknownStop { stop: self.destination.clone() })?;
        if o >= d {
            return Err(FlowError::OriginNotBeforeDestination {
                origin: self.origin.clone(),
                destination: self.destination.clone(),
            });
        }
        if !grid.contains_period(self.period) {
            return Err(FlowError::PeriodOutOfRange {
                period: self.period,
                num_periods: grid.num_periods(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for PassengerFlow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}@{}", self.origin, self.destination, self.period)
    }
}

/// Earliest dispatch period whose vehicle a period-`t` passenger can catch at
/// a stop with the given access time, or `None` if even the last period's
/// vehicle passes the stop before the passenger arrives — possible only when
/// `t` lies beyond the grid.
///
/// A vehicle dispatched in `τ` reaches the stop at `(τ-1)·Δ + access`; the
/// passenger stands there from `(t-1)·Δ`. Boarding on a tie counts.
pub fn earliest_departure(grid: &TimeGrid, access: Minutes, t: usize) -> Option<usize> {
    debug_assert!(t >= 1);
    debug_assert!(!access.is_negative());
    let gap = grid.period_start(t).tenths() - access.tenths();
    let delta = grid.delta().tenths();
    let tau = if gap <= 0 { 1 } else { 1 + ((gap + delta - 1) / delta) as usize };
    if tau <= grid.num_periods() {
        Some(tau)
    } else {
        None
    }
}

/// Latest arrival period that can still board a vehicle dispatched in period
/// `τ` at a stop with the given access time, clamped to the grid horizon.
pub fn latest_boardable_period(grid: &TimeGrid, access: Minutes, tau: usize) -> usize {
    debug_assert!(grid.contains_period(tau));
    let reach = grid.period_start(tau).tenths() + access.tenths();
    let t = 1 + (reach / grid.delta().tenths()) as usize;
    t.min(grid.num_periods())
}

/// Waiting time of a period-`t` passenger boarding the period-`τ` dispatch at
/// a stop with the given access time; `None` when the vehicle passes before
/// the passenger arrives.
pub fn wait_time(grid: &TimeGrid, access: Minutes, t: usize, tau: usize) -> Option<Minutes> {
    let w = grid.period_start(tau) + access - grid.period_start(t);
    if w.is_negative() {
        None
    } else {
        Some(w)
    }
}

/// Line construction errors; messages name the offending pattern or stop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LineError {
    TooFewStops { got: usize },
    EmptyStopName { position: usize },
    DuplicateStop { stop: String },
    NoPatterns,
    EmptyPatternId,
    DuplicatePatternId { id: String },
    PatternTooShort { id: String, got: usize },
    UnknownStopInPattern { id: String, stop: String },
    PatternOutOfOrder { id: String, stop: String },
    SegmentCountMismatch { id: String, stops: usize, segments: usize },
    NonPositiveSegmentTime { id: String, time: Minutes },
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineError::TooFewStops { got } => write!(f, "a line needs at least 2 stops, got {got}"),
            LineError::EmptyStopName { position } => {
                write!(f, "stop at position {position} has an empty name")
            }
            LineError::DuplicateStop { stop } => write!(f, "duplicate stop id {stop:?}"),
            LineError::NoPatterns => write!(f, "a line needs at least one pattern"),
            LineError::EmptyPatternId => write!(f, "pattern with empty id"),
            LineError::DuplicatePatternId { id } => write!(f, "duplicate pattern id {id:?}"),
            LineError::PatternTooShort { id, got } => {
                write!(f, "pattern {id:?} visits {got} stops, needs at least 2")
            }
            LineError::UnknownStopInPattern { id, stop } => {
                write!(f, "pattern {id:?} references unknown stop {stop:?}")
            }
            LineError::PatternOutOfOrder { id, stop } => {
                write!(f, "pattern {id:?} is not an ordered subsequence of the line at stop {stop:?}")
            }
            LineError::SegmentCountMismatch { id, stops, segments } => {
                write!(f, "pattern {id:?} has {stops} stops but {segments} segment times (need stops-1)")
            }
            LineError::NonPositiveSegmentTime { id, time } => {
                write!(f, "pattern {id:?} has non-positive segment time {time}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LineError {}

/// Flow validation errors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlowError {
    UnknownStop { stop: String },
    OriginNotBeforeDestination { origin: String, destination: String },
    PeriodOutOfRange { period: usize, num_periods: usize },
}

impl fmt::Display for FlowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowError::UnknownStop { stop } => write!(f, "unknown stop {stop:?}"),
            FlowError::OriginNotBeforeDestination { origin, destination } => {
                write!(f, "origin {origin:?} does not precede destination {destination:?} on the line")
            }
            FlowError::PeriodOutOfRange { period, num_periods } => {
                write!(f, "period {period} outside grid 1..={num_periods}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FlowError {}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn mins(m: f64) -> Minutes {
        Minutes::try_from_f64(m).unwrap()
    }

    fn four_stop_line() -> TransitLine {
        TransitLine::new(
            vec!["s1".into(), "s2".into(), "s3".into(), "s4".into()],
            vec![PatternDef {
                id: "full".into(),
                stop_names: vec!["s1".into(), "s2".into(), "s3".into(), "s4".into()],
                segment_times: vec![mins(3.0), mins(4.0), mins(5.0)],
            }],
            1,
        )
        .unwrap()
    }

    #[test]
    fn cumulative_times_from_segment_sums() {
        let line = four_stop_line();
        let p = line.pattern(0);
        assert_eq!(p.time_between(0, 3), Some(mins(12.0)));
        assert_eq!(p.time_between(1, 2), Some(mins(4.0)));
        assert_eq!(p.time_between(2, 2), Some(Minutes::ZERO));
        assert_eq!(p.time_between(2, 1), None);
        assert_eq!(p.access_time(0), Some(Minutes::ZERO));
        assert_eq!(p.access_time(2), Some(mins(7.0)));
    }

    #[test]
    fn cumulative_time_matches_per_segment_walk_on_random_patterns() {
        // Independent oracle: walk the segment list and add times one hop at
        // a time, for every ordered stop pair of every generated pattern.
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..50 {
            let n = 2 + (next() % 5) as usize; // 2..=6 stops
            let stops: Vec<String> = (0..n).map(|i| alloc::format!("s{i}")).collect();
            let segs: Vec<Minutes> =
                (0..n - 1).map(|_| Minutes::from_tenths(1 + (next() % 120) as i64)).collect();
            let line = TransitLine::new(
                stops.clone(),
                vec![PatternDef { id: "p".into(), stop_names: stops, segment_times: segs.clone() }],
                1,
            )
            .unwrap();
            let p = line.pattern(0);
            for i in 0..n {
                for j in i..n {
                    let oracle: Minutes = segs[i..j].iter().copied().sum();
                    assert_eq!(p.time_between(i, j), Some(oracle));
                }
            }
        }
    }

    #[test]
    fn line_validation_rejects_malformed_patterns() {
        let stops: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let bad_order = TransitLine::new(
            stops.clone(),
            vec![PatternDef {
                id: "p".into(),
                stop_names: vec!["b".into(), "a".into()],
                segment_times: vec![mins(1.0)],
            }],
            1,
        );
        assert!(matches!(bad_order, Err(LineError::PatternOutOfOrder { .. })));

        let unknown = TransitLine::new(
            stops.clone(),
            vec![PatternDef {
                id: "p".into(),
                stop_names: vec!["a".into(), "z".into()],
                segment_times: vec![mins(1.0)],
            }],
            1,
        );
        match unknown {
            Err(LineError::UnknownStopInPattern { id, stop }) => {
                assert_eq!(id, "p");
                assert_eq!(stop, "z");
            }
            other => panic!("expected unknown-stop error, got {other:?}"),
        }

        let no_patterns = TransitLine::new(stops.clone(), vec![], 1);
        assert!(matches!(no_patterns, Err(LineError::NoPatterns)));

        let dup = TransitLine::new(
            vec!["a".into(), "a".into(), "c".into()],
            vec![],
            1,
        );
        assert!(matches!(dup, Err(LineError::DuplicateStop { .. })));
    }

    #[test]
    fn earliest_departure_examples() {
        let grid = TimeGrid::new(0, 5, 6).unwrap();
        // Zero access from the first stop: the matching period's own dispatch.
        assert_eq!(earliest_departure(&grid, Minutes::ZERO, 5), Some(5));
        assert_eq!(earliest_departure(&grid, Minutes::ZERO, 6), Some(6));
        // A 7-minute access lets a period-1 passenger catch the period-1 bus
        // (it reaches the stop at minute 7, after the passenger's minute 0).
        assert_eq!(earliest_departure(&grid, mins(7.0), 1), Some(1));
        // Beyond the grid there is nothing left to catch.
        assert_eq!(earliest_departure(&grid, Minutes::ZERO, 7), None);
    }

    #[test]
    fn latest_boardable_examples() {
        let grid = TimeGrid::new(0, 5, 6).unwrap();
        // Zero access: only passengers arriving by the dispatch instant board.
        assert_eq!(latest_boardable_period(&grid, Minutes::ZERO, 3), 3);
        // 12-minute access: the period-1 bus reaches the stop at minute 12,
        // which period-3 passengers (arriving minute 10) still catch.
        assert_eq!(latest_boardable_period(&grid, mins(12.0), 1), 3);
        // Huge access clamps to the horizon.
        assert_eq!(latest_boardable_period(&grid, mins(1000.0), 1), 6);
    }

    #[test]
    fn wait_time_examples() {
        let grid = TimeGrid::new(0, 5, 6).unwrap();
        assert_eq!(wait_time(&grid, Minutes::ZERO, 3, 3), Some(Minutes::ZERO));
        // Access 7, passenger period 1, bus period 2: reach at 5+7=12, wait 12.
        assert_eq!(wait_time(&grid, mins(7.0), 1, 2), Some(mins(12.0)));
        // Next dispatch waits exactly one period longer.
        let w2 = wait_time(&grid, mins(7.0), 1, 3).unwrap();
        assert_eq!(w2 - mins(12.0), grid.delta());
        // A bus that already passed cannot be boarded.
        assert_eq!(wait_time(&grid, Minutes::ZERO, 4, 2), None);
    }

    #[test]
    fn boarding_window_duality_exhaustive() {
        // t ≤ latest(τ)  ⟺  τ ≥ earliest(t), over full small grids and a
        // range of access times.
        for periods in 1..=8usize {
            for delta in [1i64, 5] {
                let grid = TimeGrid::new(0, delta, periods).unwrap();
                for access_tenths in (0..=(periods as i64 + 2) * delta * 10).step_by(7) {
                    let access = Minutes::from_tenths(access_tenths);
                    for t in 1..=periods {
                        for tau in 1..=periods {
                            let boardable = t <= latest_boardable_period(&grid, access, tau);
                            let by_earliest = match earliest_departure(&grid, access, t) {
                                Some(e) => tau >= e,
                                None => false,
                            };
                            assert_eq!(
                                boardable, by_earliest,
                                "duality broke at T={periods} delta={delta} access={access_tenths} t={t} tau={tau}"
                            );
                            let wait = wait_time(&grid, access, t, tau);
                            assert_eq!(wait.is_some(), boardable);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn flow_validation() {
        let line = four_stop_line();
        let grid = TimeGrid::new(0, 5, 6).unwrap();
        assert!(PassengerFlow::new("s1", "s3", 1).validate(&line, &grid).is_ok());
        assert!(matches!(
            PassengerFlow::new("s3", "s1", 1).validate(&line, &grid),
            Err(FlowError::OriginNotBeforeDestination { .. })
        ));
        assert!(matches!(
            PassengerFlow::new("s1", "s1", 1).validate(&line, &grid),
            Err(FlowError::OriginNotBeforeDestination { .. })
        ));
        assert!(matches!(
            PassengerFlow::new("s1", "sX", 1).validate(&line, &grid),
            Err(FlowError::UnknownStop { .. })
        ));
        assert!(matches!(
            PassengerFlow::new("s1", "s3", 7).validate(&line, &grid),
            Err(FlowError::PeriodOutOfRange { .. })
        ));
        assert_eq!(line.ordered_stop_pairs().count(), 6);
        assert_eq!("s1".to_string(), line.stop_name(0));
    }

    #[test]
    fn patterns_serving_respects_order_and_membership() {
        let line = TransitLine::new(
            vec!["s1".into(), "s2".into(), "s3".into(), "s4".into(), "s5".into(), "s6".into()],
            vec![
                PatternDef {
                    id: "local".into(),
                    stop_names: (1..=6).map(|i| alloc::format!("s{i}")).collect(),
                    segment_times: vec![mins(3.0); 5],
                },
                PatternDef {
                    id: "express".into(),
                    stop_names: vec!["s1".into(), "s3".into(), "s6".into()],
                    segment_times: vec![mins(5.0), mins(8.0)],
                },
            ],
            2,
        )
        .unwrap();
        assert_eq!(line.patterns_serving(0, 2), vec![0, 1]);
        assert_eq!(line.patterns_serving(1, 3), vec![0]);
        assert_eq!(line.patterns_serving(2, 5), vec![0, 1]);
        let express = line.pattern(1);
        assert_eq!(express.segments_between(2, 5), Some(1..2));
        assert_eq!(express.segments_between(0, 5), Some(0..2));
        assert_eq!(express.segments_between(1, 5), None);
    }
}
