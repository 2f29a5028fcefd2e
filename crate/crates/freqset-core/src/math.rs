//! Float helpers that work on both `std` and `no_std` builds.
//!
//! Only the handful of operations the solver and model builders actually need
//! live here. Under `std` they defer to the intrinsic implementations; the
//! fallbacks are exact for the magnitudes this crate produces (|x| < 2^52).

/// Absolute value.
#[inline]
pub fn abs(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.abs()
    }
    #[cfg(not(feature = "std"))]
    {
        abs_fallback(x)
    }
}

/// Largest integer-valued f64 not above `x`. Exact for |x| < 2^52.
#[inline]
pub fn floor(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.floor()
    }
    #[cfg(not(feature = "std"))]
    {
        floor_fallback(x)
    }
}

/// Nearest integer-valued f64 (ties away from zero, like `f64::round`).
#[inline]
pub fn round(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.round()
    }
    #[cfg(not(feature = "std"))]
    {
        round_fallback(x)
    }
}

/// Distance from `x` to the nearest integer; the branching score for
/// fractional binaries.
#[inline]
pub fn frac_distance(x: f64) -> f64 {
    abs(x - round(x))
}

#[allow(dead_code)]
#[inline]
fn abs_fallback(x: f64) -> f64 {
    f64::from_bits(x.to_bits() & !(1u64 << 63))
}

#[allow(dead_code)]
#[inline]
fn floor_fallback(x: f64) -> f64 {
    // Round-toward-zero cast, corrected downward for negative non-integers.
    // Valid because every caller stays far below 2^52 in magnitude.
    let t = x as i64 as f64;
    if t > x {
        t - 1.0
    } else {
        t
    }
}

#[allow(dead_code)]
#[inline]
fn round_fallback(x: f64) -> f64 {
    if x >= 0.0 {
        floor_fallback(x + 0.5)
    } else {
        -floor_fallback(-x + 0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fallbacks_match_std_on_awkward_values() {
        for &x in &[
            -3.0,
            -2.5,
            -2.0000001,
            -0.5,
            -0.0,
            0.0,
            0.49999,
            0.5,
            1.5,
            2.0,
            7.999999,
            1e10,
            -1e10,
            1048576.5,
            -1048576.5,
        ] {
            assert_eq!(abs_fallback(x), x.abs(), "abs({x})");
            assert_eq!(floor_fallback(x), x.floor(), "floor({x})");
            assert_eq!(round_fallback(x), x.round(), "round({x})");
        }
    }

    #[test]
    fn frac_distance_is_zero_on_integers_and_half_on_half() {
        assert_eq!(frac_distance(3.0), 0.0);
        assert_eq!(frac_distance(2.5), 0.5);
        assert!((frac_distance(1.75) - 0.25).abs() < 1e-15);
    }
}
