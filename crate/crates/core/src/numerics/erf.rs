//! Error function and differences of it.

use std::f64::consts::PI;

use super::quadrature::kronrod_21;

/// The error function. Backed by the FreeBSD minimax implementation
/// shipped in `libm`.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function `1 - erf(x)` without cancellation for large `x`.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `erf(hi) - erf(lo)` for `0 ≤ lo ≤ hi ≤ ∞`, accurate to a few ulps of the
/// difference itself.
///
/// Short intervals are integrated directly (`(2/√π)∫ e^{-s²} ds` with a
/// 21-point Kronrod rule), which avoids subtracting two nearly equal values.
pub fn erf_diff(lo: f64, hi: f64) -> f64 {
    debug_assert!(lo <= hi);
    if lo == hi {
        return 0.0;
    }
    if hi.is_infinite() {
        return erfc(lo);
    }
    if hi - lo <= 0.5 {
        let two_over_sqrt_pi = 2.0 / PI.sqrt();
        return two_over_sqrt_pi * kronrod_21(|s| (-s * s).exp(), lo, hi);
    }
    if lo >= 0.5 {
        erfc(lo) - erfc(hi)
    } else {
        erf(hi) - erf(lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Maclaurin series with compensated summation; good to ~1 ulp on |x| ≤ 1.5.
    fn erf_series(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut comp = 0.0;
        let mut power = x; // x^{2n+1}/n!
        for n in 0..200 {
            let term = if n % 2 == 0 { power } else { -power } / (2 * n + 1) as f64;
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            power *= x * x / (n + 1) as f64;
            if power.abs() < 1e-300 || term.abs() < 1e-20 * sum.abs() {
                break;
            }
        }
        2.0 / PI.sqrt() * sum
    }

    /// Lentz continued fraction for erfc, valid for x ≳ 2.
    fn erfc_continued_fraction(x: f64) -> f64 {
        // erfc(x) = e^{-x²}/√π · 1/(x + 1/2/(x + 1/(x + 3/2/(x + ...))))
        let tiny = 1e-300;
        let mut f = x;
        let mut c = x;
        let mut d = 0.0;
        for k in 1..500 {
            let a = k as f64 / 2.0;
            d = x + a * d;
            d = if d.abs() < tiny { tiny } else { d };
            c = x + a / c;
            c = if c.abs() < tiny { tiny } else { c };
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x * x).exp() / PI.sqrt() / f
    }

    #[test]
    fn reference_values() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() <= 1e-15 * 0.8427);
        assert!((erf(-1.0) + 0.842_700_792_949_714_9).abs() <= 1e-15 * 0.8427);
    }

    #[test]
    fn matches_series_oracle() {
        for i in -150..=150 {
            let x = i as f64 / 100.0;
            let oracle = erf_series(x);
            let rel = if oracle == 0.0 {
                erf(x).abs()
            } else {
                ((erf(x) - oracle) / oracle).abs()
            };
            assert!(rel <= 1e-15, "x={x} erf={} oracle={oracle} rel={rel}", erf(x));
        }
    }

    #[test]
    fn erfc_matches_continued_fraction() {
        for i in 0..=40 {
            let x = 2.5 + i as f64 * 0.5;
            let oracle = erfc_continued_fraction(x);
            let rel = ((erfc(x) - oracle) / oracle).abs();
            assert!(rel <= 1e-14, "x={x} rel={rel}");
        }
    }

    #[test]
    fn erf_diff_short_and_long_intervals() {
        // Short interval against the series.
        let (lo, hi) = (0.3, 0.3 + 1e-6);
        let expect = erf_series(hi) - erf_series(lo);
        assert!(((erf_diff(lo, hi) - expect) / expect).abs() < 1e-9);
        // Long intervals fall through to erf/erfc.
        assert!((erf_diff(0.0, 1.0) - erf(1.0)).abs() < 1e-16);
        assert!((erf_diff(2.0, 5.0) - (erfc(2.0) - erfc(5.0))).abs() < 1e-18);
        assert_eq!(erf_diff(1.0, f64::INFINITY), erfc(1.0));
        // Far tail where both erf values round to 1.
        let tail = erf_diff(10.0, 10.25);
        let expect = erfc_continued_fraction(10.0) - erfc_continued_fraction(10.25);
        assert!(((tail - expect) / expect).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn erf_is_odd(x in -10.0f64..10.0) {
            prop_assert_eq!(erf(x) + erf(-x), 0.0);
        }

        #[test]
        fn erf_is_bounded(x in -50.0f64..50.0) {
            prop_assert!(erf(x).abs() <= 1.0);
        }
    }
}
