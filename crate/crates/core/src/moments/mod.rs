//! Reachability through power moments.
//!
//! A state `W^T` is reachable from rest with `‖v‖_∞ ≤ L` exactly when some
//! such `v` has power moments `∫_0^T ξ^n v(ξ) dξ = ω_n` for every `n`, where
//! `ω_n = n!/(2n+1)! ∫_0^∞ x^{2n+1} W^T(x) dx`. Here `v(ξ) = u(T - ξ)` is
//! the time-reversed boundary control.

mod bang_bang;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use bang_bang::{solve_bang_bang, BangBangSolution};

use crate::error::{Error, Result};
use crate::heat::{OddState, StepControl};
use crate::hermite::psi_unchecked;
use crate::numerics::{factorial, integrate, ln_factorial, QuadratureSpec};

/// Largest moment index accepted by [`mu_closed_form`].
pub const MAX_MU_INDEX: usize = 10;

/// Moments `ω_0..ω_N` with the horizon and the `L∞` bound they refer to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "L")]
    pub bound: f64,
    pub omegas: Vec<f64>,
}

impl MomentVector {
    pub fn new(horizon: f64, bound: f64, omegas: Vec<f64>) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::InvalidArgument(format!("bound must be positive, got {bound}")));
        }
        if omegas.is_empty() {
            return Err(Error::InvalidArgument("moment vector is empty".into()));
        }
        Ok(Self {
            horizon,
            bound,
            omegas,
        })
    }

    pub fn with_bound(mut self, bound: f64) -> Result<Self> {
        self.bound = bound;
        Self::new(self.horizon, self.bound, self.omegas)
    }

    /// Truncation order `N`.
    pub fn truncation(&self) -> usize {
        self.omegas.len() - 1
    }

    /// `|ω_n| ≤ L T^{n+1} / (n+1)` for every `n`, up to a relative slack.
    pub fn check_trivial_bound(&self, slack: f64) -> bool {
        self.omegas.iter().enumerate().all(|(n, w)| {
            let cap = self.bound * self.horizon.powi(n as i32 + 1) / (n + 1) as f64;
            w.abs() <= cap * (1.0 + slack)
        })
    }
}

/// `ω_n = n!/(2n+1)! ∫_0^∞ x^{2n+1} W^T(x) dx` for `n = 0..=N`, by quadrature.
///
/// The returned vector carries `L = 1`; use [`MomentVector::with_bound`] to
/// attach another bound.
pub fn moments_of_target(
    target: &OddState,
    truncation: usize,
    horizon: f64,
    spec: &QuadratureSpec,
) -> Result<MomentVector> {
    let omegas = (0..=truncation)
        .map(|n| {
            let k = 2 * n + 1;
            let q = integrate(|x| x.powi(k as i32) * target.eval(x), 0.0, f64::INFINITY, spec)?;
            Ok(q.value * (ln_factorial(n) - ln_factorial(k)).exp())
        })
        .collect::<Result<Vec<_>>>()?;
    MomentVector::new(horizon, 1.0, omegas)
}

/// Exact moments `Σ_j c_j (t_j^{n+1} - t_{j-1}^{n+1}) / (n+1)` of a step
/// function `v` on `[0, T]`. The bound is set to `max(‖v‖_∞, tiny)`.
pub fn moments_of_control(v: &StepControl, truncation: usize) -> MomentVector {
    let omegas = (0..=truncation)
        .map(|n| {
            let e = n as i32 + 1;
            v.pieces()
                .map(|(a, b, c)| c * (b.powi(e) - a.powi(e)))
                .sum::<f64>()
                / e as f64
        })
        .collect();
    MomentVector {
        horizon: v.horizon(),
        bound: v.linf_norm().max(f64::MIN_POSITIVE),
        omegas,
    }
}

/// Outcome of the necessary reachability test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NecessaryCondition {
    /// `∫_0^∞ e^{x²/4T*} |W^T(x)| dx`; `+∞` when divergence was certified.
    pub lhs: f64,
    /// `L √(T*/π) ln((√T* + √T)/(√T* - √T))`.
    pub rhs: f64,
    pub satisfied: bool,
}

/// Right-hand side of the necessary condition.
pub fn necessary_rhs(horizon: f64, bound: f64, t_star: f64) -> f64 {
    let (a, b) = (t_star.sqrt(), horizon.sqrt());
    bound * (t_star / PI).sqrt() * ((a + b) / (a - b)).ln()
}

/// Tests the necessary condition for `W^T ∈ R_T^L(0)` with weight `T* > T`.
///
/// When the weighted integral cannot be computed, the integrand is sampled
/// further and further out; if it keeps growing the target is reported as
/// unreachable (`lhs = ∞`), otherwise the quadrature error is returned.
pub fn necessary_condition(
    target: &OddState,
    horizon: f64,
    bound: f64,
    t_star: f64,
    spec: &QuadratureSpec,
) -> Result<NecessaryCondition> {
    if !(t_star > horizon && horizon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need T* > T > 0, got T = {horizon}, T* = {t_star}"
        )));
    }
    if !(bound > 0.0) {
        return Err(Error::InvalidArgument(format!("bound must be positive, got {bound}")));
    }
    let rhs = necessary_rhs(horizon, bound, t_star);
    let weighted = |x: f64| {
        let w = target.eval(x).abs();
        if w == 0.0 {
            0.0
        } else {
            (x * x / (4.0 * t_star) + w.ln()).exp()
        }
    };
    let lhs = match integrate(weighted, 0.0, f64::INFINITY, spec) {
        Ok(q) => q.value,
        Err(err @ Error::NonConvergent { .. }) => {
            if grows_without_bound(&weighted) {
                f64::INFINITY
            } else {
                return Err(err);
            }
        }
        Err(e) => return Err(e),
    };
    let tol = spec.tolerance(rhs);
    Ok(NecessaryCondition {
        lhs,
        rhs,
        satisfied: lhs <= rhs + tol,
    })
}

/// Samples at `x = 2^{k/2}` for `k = 4..=12` are increasing and the last
/// one exceeds one.
fn grows_without_bound(f: &impl Fn(f64) -> f64) -> bool {
    let samples: Vec<f64> = (4..=12).map(|k| f(2f64.powf(k as f64 / 2.0))).collect();
    samples.windows(2).all(|w| w[1] > w[0]) && samples.last().is_some_and(|v| *v > 1.0)
}

/// `μ_m(ξ) = (-1)^m (2m+1)!/m! · 2√2 T* / (T* - ξ)^{3/2} · ((T* + ξ)/(T* - ξ))^m`.
pub fn mu_closed_form(m: usize, xi: f64, t_star: f64) -> Result<f64> {
    check_mu_args(m, xi, t_star)?;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let ratio = factorial(2 * m + 1) / factorial(m);
    let d = t_star - xi;
    Ok(sign * ratio * 2.0 * 2f64.sqrt() * t_star / d.powf(1.5) * ((t_star + xi) / d).powi(m as i32))
}

/// `μ_m(ξ) = 2i √(2/π) ∫_0^∞ σ e^{ξσ²} ψ̂_m^{T*}(σ) dσ` by quadrature.
pub fn mu_quadrature(m: usize, xi: f64, t_star: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_mu_args(m, xi, t_star)?;
    let s = (2.0 * t_star).sqrt();
    let k = 2 * m + 1;
    let q = integrate(
        |sigma| sigma * psi_unchecked(k, s * sigma) * (xi * sigma * sigma).exp(),
        0.0,
        f64::INFINITY,
        spec,
    )?;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    Ok(2.0 * (2.0 / PI).sqrt() * sign * s * q.value)
}

fn check_mu_args(m: usize, xi: f64, t_star: f64) -> Result<()> {
    if m > MAX_MU_INDEX {
        return Err(Error::DegreeTooLarge {
            degree: m,
            max: MAX_MU_INDEX,
        });
    }
    if !(xi >= 0.0 && xi < t_star) {
        return Err(Error::InvalidArgument(format!("need 0 ≤ ξ < T*, got ξ = {xi}, T* = {t_star}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn example_moments() {
        let spec = QuadratureSpec::default();
        let m1 = moments_of_target(&OddState::Example1 { horizon: 1.0 }, 7, 1.0, &spec).unwrap();
        for (n, w) in m1.omegas.iter().enumerate() {
            assert_relative_eq!(*w, 1.0 / (n + 2) as f64, max_relative = 1e-8);
        }
        let m2 = moments_of_target(&OddState::Example2 { horizon: 1.0 }, 7, 1.0, &spec).unwrap();
        for (n, w) in m2.omegas.iter().enumerate() {
            assert_relative_eq!(*w, 1.0 / ((n + 1) * (n + 2)) as f64, max_relative = 1e-8);
        }
        let z = moments_of_target(&OddState::Zero, 3, 1.0, &spec).unwrap();
        assert!(z.omegas.iter().all(|w| *w == 0.0));
    }

    #[test]
    fn moments_of_reached_state_match_control() {
        let spec = QuadratureSpec::default();
        let u = StepControl::new(1.0, vec![0.0, 0.2, 0.6, 1.0], vec![1.0, -0.5, 0.25]).unwrap();
        let from_state = moments_of_target(&OddState::Reached(u.clone()), 4, 1.0, &spec).unwrap();
        let from_control = moments_of_control(&u.reverse(), 4);
        for (a, b) in from_state.omegas.iter().zip(&from_control.omegas) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1e-3));
        }
    }

    #[test]
    fn control_moment_examples() {
        let m = moments_of_control(&StepControl::constant(1.0, 1.0), 2);
        assert_eq!(m.omegas, vec![1.0, 0.5, 1.0 / 3.0]);
        let step = StepControl::indicator(1.0, 0.0, 0.1, 10.0).unwrap();
        let m = moments_of_control(&step, 1);
        assert_relative_eq!(m.omegas[0], 1.0, max_relative = 1e-15);
        assert_relative_eq!(m.omegas[1], 0.05, max_relative = 1e-15);
        let m = moments_of_control(&StepControl::zero(1.0), 3);
        assert!(m.omegas.iter().all(|w| *w == 0.0));
    }

    #[test]
    fn necessary_condition_examples() {
        let spec = QuadratureSpec::default();
        let zero = necessary_condition(&OddState::Zero, 1.0, 1.0, 4.0, &spec).unwrap();
        assert_eq!(zero.lhs, 0.0);
        assert!((zero.rhs - 2.0 / PI.sqrt() * 3f64.ln()).abs() < 1e-12);
        assert!((zero.rhs - 1.23965).abs() < 1e-5);
        assert!(zero.satisfied);
        for target in [OddState::Example1 { horizon: 1.0 }, OddState::Example2 { horizon: 1.0 }] {
            let base = necessary_condition(&target, 1.0, 1.0, 4.0, &spec).unwrap();
            assert!(base.satisfied, "{target:?}: {base:?}");
            let factor = 2.0 * base.rhs / base.lhs;
            let scaled = necessary_condition(&target.scaled(factor), 1.0, 1.0, 4.0, &spec).unwrap();
            assert!(!scaled.satisfied);
        }
    }

    #[test]
    fn necessary_condition_certifies_divergence() {
        // e^{-x²/8} is too flat for the weight e^{x²/4} at T* = 1.
        let flat = OddState::basis(0, 4.0, 1.0).unwrap();
        let r = necessary_condition(&flat, 0.5, 1.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!(r.lhs.is_infinite() && !r.satisfied);
    }

    #[test]
    fn mu_examples() {
        assert_relative_eq!(mu_closed_form(0, 0.0, 1.0).unwrap(), 2.0 * 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(mu_closed_form(1, 0.0, 1.0).unwrap(), -12.0 * 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(mu_closed_form(0, 0.5, 1.0).unwrap(), 8.0, max_relative = 1e-15);
        assert!(mu_closed_form(11, 0.0, 1.0).is_err());
        assert!(mu_closed_form(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn mu_closed_form_matches_quadrature() {
        let spec = QuadratureSpec::default().with_rel_tol(1e-12);
        for t_star in [1.0, 2.5] {
            for m in 0..=5 {
                for xi in [0.0, t_star / 4.0, t_star / 2.0] {
                    let c = mu_closed_form(m, xi, t_star).unwrap();
                    let q = mu_quadrature(m, xi, t_star, &spec).unwrap();
                    assert_relative_eq!(c, q, max_relative = 1e-8);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn bounded_controls_satisfy_trivial_bound(
            levels in prop::collection::vec(-2.0f64..2.0, 1..6),
            horizon in 0.2f64..3.0,
        ) {
            let k = levels.len();
            let bp = (0..=k).map(|j| horizon * j as f64 / k as f64).collect();
            let v = StepControl::new(horizon, bp, levels).unwrap();
            let m = moments_of_control(&v, 8);
            prop_assert!(m.check_trivial_bound(1e-12));
        }
    }
}
