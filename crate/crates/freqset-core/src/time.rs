//! Exact time arithmetic and the planning grid.
//!
//! All running, access, and waiting times are held as integer tenths of a
//! minute, so cumulative sums and waiting-time differences are exact and every
//! comparison is a plain integer comparison. Conversion to `f64` happens once,
//! at the point where a value becomes an objective coefficient or a report
//! field.

use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Sub};

/// A duration (or instant relative to the grid start) in tenths of a minute.
///
/// ```
/// use freqset_core::Minutes;
/// let a = Minutes::from_tenths(35); // 3.5 min
/// let b = Minutes::from_minutes(4);
/// assert_eq!((a + b).tenths(), 75);
/// assert_eq!((a + b).as_f64(), 7.5);
/// ```
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Minutes(i64);

impl Minutes {
    pub const ZERO: Minutes = Minutes(0);

    pub const fn from_tenths(tenths: i64) -> Self {
        Minutes(tenths)
    }

    pub const fn from_minutes(minutes: i64) -> Self {
        Minutes(minutes * 10)
    }

    /// Parses a minute value that must be an exact multiple of 0.1.
    ///
    /// Accepts anything within one part in 10^6 of a tenth boundary (so JSON
    /// values like `3.1` survive the decimal-to-binary round trip) and
    /// rejects finer fractions.
    pub fn try_from_f64(minutes: f64) -> Result<Self, TimeError> {
        if !minutes.is_finite() {
            return Err(TimeError::NotAMultipleOfTenth { value: minutes });
        }
        let scaled = minutes * 10.0;
        let nearest = crate::math::round(scaled);
        if crate::math::abs(scaled - nearest) > 1e-6 || crate::math::abs(nearest) > 9e15 {
            return Err(TimeError::NotAMultipleOfTenth { value: minutes });
        }
        Ok(Minutes(nearest as i64))
    }

    pub const fn tenths(self) -> i64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 10.0
    }

    pub const fn is_negative(self) -> bool {
        self.0 < 0
    }
}

impl Add for Minutes {
    type Output = Minutes;
    fn add(self, rhs: Minutes) -> Minutes {
        Minutes(self.0 + rhs.0)
    }
}

impl AddAssign for Minutes {
    fn add_assign(&mut self, rhs: Minutes) {
        self.0 += rhs.0;
    }
}

impl Sub for Minutes {
    type Output = Minutes;
    fn sub(self, rhs: Minutes) -> Minutes {
        Minutes(self.0 - rhs.0)
    }
}

impl Sum for Minutes {
    fn sum<I: Iterator<Item = Minutes>>(iter: I) -> Minutes {
        iter.fold(Minutes::ZERO, |a, b| a + b)
    }
}

impl fmt::Debug for Minutes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}min", self.as_f64())
    }
}

impl fmt::Display for Minutes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_f64())
    }
}

/// The planning horizon: `num_periods` dispatch periods of `delta_minutes`
/// each, starting at `start_minute` past midnight.
///
/// Period indices are 1-based. Period `t` begins at instant
/// `(t-1) * delta_minutes` relative to the grid start; passengers of period
/// `t` and vehicles dispatched in period `t` both act at that begin-of-period
/// instant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeGrid {
    start_minute: i64,
    delta_minutes: i64,
    num_periods: usize,
}

/// Errors from time parsing and grid construction.
#[derive(Clone, Debug, PartialEq)]
pub enum TimeError {
    NotAMultipleOfTenth { value: f64 },
    EmptyGrid,
    NonPositiveDelta { delta: i64 },
    HorizonNotDivisible { span: i64, delta: i64 },
}

impl fmt::Display for TimeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeError::NotAMultipleOfTenth { value } => {
                write!(f, "time value {value} is not a multiple of 0.1 minutes")
            }
            TimeError::EmptyGrid => write!(f, "time grid must contain at least one period"),
            TimeError::NonPositiveDelta { delta } => {
                write!(f, "period length must be positive, got {delta}")
            }
            TimeError::HorizonNotDivisible { span, delta } => {
                write!(
                    f,
                    "horizon of {span} minutes is not a whole number of {delta}-minute periods"
                )
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TimeError {}

impl TimeGrid {
    /// Grid with an explicit period count.
    pub fn new(start_minute: i64, delta_minutes: i64, num_periods: usize) -> Result<Self, TimeError> {
        if delta_minutes <= 0 {
            return Err(TimeError::NonPositiveDelta { delta: delta_minutes });
        }
        if num_periods == 0 {
            return Err(TimeError::EmptyGrid);
        }
        Ok(TimeGrid { start_minute, delta_minutes, num_periods })
    }

    /// Grid spanning `[start_minute, end_minute)`; the span must divide evenly
    /// into periods.
    pub fn from_span(start_minute: i64, end_minute: i64, delta_minutes: i64) -> Result<Self, TimeError> {
        if delta_minutes <= 0 {
            return Err(TimeError::NonPositiveDelta { delta: delta_minutes });
        }
        let span = end_minute - start_minute;
        if span <= 0 {
            return Err(TimeError::EmptyGrid);
        }
        if span % delta_minutes != 0 {
            return Err(TimeError::HorizonNotDivisible { span, delta: delta_minutes });
        }
        TimeGrid::new(start_minute, delta_minutes, (span / delta_minutes) as usize)
    }

    pub fn start_minute(&self) -> i64 {
        self.start_minute
    }

    pub fn delta_minutes(&self) -> i64 {
        self.delta_minutes
    }

    pub fn delta(&self) -> Minutes {
        Minutes::from_minutes(self.delta_minutes)
    }

    pub fn num_periods(&self) -> usize {
        self.num_periods
    }

    /// 1-based period indices.
    pub fn periods(&self) -> impl Iterator<Item = usize> + Clone {
        1..=self.num_periods
    }

    pub fn contains_period(&self, t: usize) -> bool {
        t >= 1 && t <= self.num_periods
    }

    /// Instant at which period `t` begins, relative to the grid start.
    /// Defined for any `t >= 1`, also beyond the horizon (used when checking
    /// reachability).
    pub fn period_start(&self, t: usize) -> Minutes {
        Minutes::from_minutes((t as i64 - 1) * self.delta_minutes)
    }
}
