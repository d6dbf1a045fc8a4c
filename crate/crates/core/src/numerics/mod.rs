//! Special functions and quadrature shared by the rest of the crate.

mod erf;
mod grid;
mod quadrature;

use num_complex::Complex64;

pub use erf::{erf, erf_diff, erfc};
pub use grid::{Domain, Grid};
pub use quadrature::{integrate, Quadrature, QuadratureSpec, Rule};

use crate::error::Result;

/// `L²(ℝ)` norm of an odd function given on the half-line:
/// `sqrt(2 ∫_0^∞ |f|² dx)`.
pub fn l2_norm_halfline<F, V>(f: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> V,
    V: Into<Complex64>,
{
    let q = integrate(|x| f(x).into().norm_sqr(), 0.0, f64::INFINITY, spec)?;
    Ok((2.0 * q.value.max(0.0)).sqrt())
}

/// `ln n!` by direct summation.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `n!` as a float; exact products up to 8!, log-space beyond.
pub(crate) fn factorial(n: usize) -> f64 {
    if n <= 8 {
        (2..=n).product::<usize>() as f64
    } else {
        ln_factorial(n).exp()
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// ∫_0^∞ x^k e^{-x²/c} dx = Γ((k+1)/2) c^{(k+1)/2} / 2, for odd k via factorials
    /// and even k via the double factorial.
    fn gaussian_moment(k: u32, c: f64) -> f64 {
        let s = (k + 1) as f64 / 2.0;
        let gamma = if k % 2 == 1 {
            factorial(((k + 1) / 2 - 1) as usize)
        } else {
            // Γ(m + 1/2) = (2m-1)!! √π / 2^m
            let m = k / 2;
            let dbl: f64 = (1..=m).map(|i| (2 * i - 1) as f64).product();
            dbl * PI.sqrt() / 2f64.powi(m as i32)
        };
        gamma * c.powf(s) / 2.0
    }

    #[test]
    fn moment_normalisation_example() {
        // n = 1 weight applied to W(x) = x e^{-x²/4}: (1!/3!) ∫ x³ · x e^{-x²/4} dx.
        let spec = QuadratureSpec::default();
        let q = integrate(|x: f64| x.powi(3) * x * (-x * x / 4.0).exp() / 6.0, 0.0, f64::INFINITY, &spec)
            .unwrap();
        let oracle = gaussian_moment(4, 4.0) / 6.0;
        assert_relative_eq!(oracle, 2.0 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(q.value, oracle, max_relative = 1e-10);
    }

    #[test]
    fn l2_norm_examples() {
        let spec = QuadratureSpec::default();
        assert_eq!(l2_norm_halfline(|_| 0.0, &spec).unwrap(), 0.0);
        let n = l2_norm_halfline(|x: f64| (-x * x / 2.0).exp(), &spec).unwrap();
        assert_relative_eq!(n, PI.powf(0.25), max_relative = 1e-11);
        // Complex values go through |f|².
        let n = l2_norm_halfline(|x: f64| Complex64::new(0.0, (-x * x / 2.0).exp()), &spec).unwrap();
        assert_relative_eq!(n, PI.powf(0.25), max_relative = 1e-11);
    }

    #[test]
    fn factorials_and_binomials() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(8), 40320.0);
        assert_relative_eq!(factorial(13), 6_227_020_800.0, max_relative = 1e-13);
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(12, 0), 1.0);
    }

    proptest! {
        #[test]
        fn l2_norm_is_absolutely_homogeneous(c in -50.0f64..50.0, w in 0.3f64..3.0) {
            let spec = QuadratureSpec::default();
            let f = |x: f64| x * (-x * x / w).exp();
            let base = l2_norm_halfline(f, &spec).unwrap();
            let scaled = l2_norm_halfline(|x| c * f(x), &spec).unwrap();
            prop_assert!((scaled - c.abs() * base).abs() <= 1e-12 * (c.abs() * base).max(1e-300));
        }
    }
}
