//! Explicit approximate-reachability controls.
//!
//! The Fourier images of the basis satisfy `ψ̂_n^T = i Σ_{p≤n} h_p^n φ_p`
//! with `φ_p(σ) = σ^{2p+1} e^{-Tσ²}`. The binomial step control `u_l^p`
//! produces exactly `-√(2/π) i φ_p^l` at time `T`, and `φ_p^l → φ_p` as
//! `l → ∞`. Superposing step controls with weights
//! `g_p = Σ_{n≥p} ω_n h_p^n` therefore steers the system close to
//! `Σ ω_n ψ_n^T`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::heat::{control_term_sigma, StepControl};
use crate::hermite::{check_index, HermiteExpansion};
use crate::numerics::{binomial, factorial, l2_norm_halfline, ln_factorial, Grid, QuadratureSpec};

/// Below this `z = σ²/l` the factor `(e^z - 1)/z` uses its Taylor series.
const TAYLOR_SWITCH: f64 = 1e-8;

/// Binomial step control `u_l^n`: level `(-1)^{n-j} C(n, j) l^{n+1}` on
/// `(j/l, (j+1)/l)` for `j = 0..=n`, zero on `[(n+1)/l, T]`.
pub fn step_control(n: usize, l: u64, horizon: f64) -> Result<StepControl> {
    if l == 0 {
        return Err(Error::InvalidArgument("step resolution l must be positive".into()));
    }
    let lf = l as f64;
    let support = (n + 1) as f64 / lf;
    if support > horizon {
        return Err(Error::SupportExceedsHorizon { support, horizon });
    }
    let scale = lf.powi(n as i32 + 1);
    let breakpoints: Vec<f64> = (0..=n + 1).map(|j| j as f64 / lf).collect();
    let levels = (0..=n)
        .map(|j| {
            let sign = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(n, j) * scale
        })
        .collect();
    StepControl::new(horizon, breakpoints, levels)
}

/// `h_p^n = (-1)^{p+1} 2^{2p+1} (2T)^{p+1} (2n+1)! / ((n-p)! (2p+1)!)`.
pub fn h_coeff(p: usize, n: usize, horizon: f64) -> Result<f64> {
    check_index(n)?;
    if p > n {
        return Err(Error::InvalidArgument(format!("need p ≤ n, got p = {p}, n = {n}")));
    }
    let sign = if p % 2 == 1 { 1.0 } else { -1.0 };
    let k = 2 * p + 1;
    let magnitude = if n <= 8 {
        2f64.powi(k as i32) * (2.0 * horizon).powi(p as i32 + 1) * factorial(2 * n + 1)
            / (factorial(n - p) * factorial(k))
    } else {
        (k as f64 * std::f64::consts::LN_2
            + (p + 1) as f64 * (2.0 * horizon).ln()
            + ln_factorial(2 * n + 1)
            - ln_factorial(n - p)
            - ln_factorial(k))
        .exp()
    };
    Ok(sign * magnitude)
}

/// `φ_n(σ) = σ^{2n+1} e^{-Tσ²}`.
pub fn phi(n: usize, sigma: f64, horizon: f64) -> f64 {
    sigma.powi(2 * n as i32 + 1) * (-horizon * sigma * sigma).exp()
}

/// `φ_n^l(σ) = φ_n(σ) ((e^{σ²/l} - 1)/(σ²/l))^{n+1}`.
pub fn phi_l(n: usize, l: u64, sigma: f64, horizon: f64) -> f64 {
    let z = sigma * sigma / l as f64;
    let ln_factor = if z < TAYLOR_SWITCH {
        (0.5 * z).ln_1p()
    } else if z < 50.0 {
        (z.exp_m1() / z).ln()
    } else {
        // e^{-z} is below rounding here.
        z - z.ln()
    };
    // Combine exponents before evaluating to keep large σ finite.
    let log_part = -horizon * sigma * sigma + (n + 1) as f64 * ln_factor;
    sigma.powi(2 * n as i32 + 1) * log_part.exp()
}

/// Synthesis data: truncation, per-index step resolutions and weights `g_p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthesisPlan {
    pub truncation: usize,
    pub l_per_p: Vec<u64>,
    #[serde(rename = "T")]
    pub horizon: f64,
    /// `g_p = Σ_{n=p}^N ω_n h_p^n`.
    pub coeffs: Vec<f64>,
}

/// Weights `g_p = Σ_{n=p}^N ω_n h_p^n` of an expansion.
pub fn g_coeffs(expansion: &HermiteExpansion) -> Result<Vec<f64>> {
    let omegas = expansion.coeffs();
    let t = expansion.horizon();
    (0..omegas.len())
        .map(|p| {
            (p..omegas.len())
                .map(|n| Ok(omegas[n] * h_coeff(p, n, t)?))
                .sum::<Result<f64>>()
        })
        .collect()
}

/// Builds `u_N = -√(π/2) Σ_p g_p u_{l_p}^p` on a merged breakpoint set.
///
/// Every `l_p` must exceed `(2p+2)/T`, which keeps `|φ_p^{l_p}|` below
/// `σ^{2p+1} e^{-σ²T/2}`.
pub fn synthesize(expansion: &HermiteExpansion, l_per_p: &[u64]) -> Result<(SynthesisPlan, StepControl)> {
    let truncation = expansion.truncation();
    let t = expansion.horizon();
    if l_per_p.len() != truncation + 1 {
        return Err(Error::InvalidArgument(format!(
            "truncation {truncation} needs {} step resolutions, got {}",
            truncation + 1,
            l_per_p.len()
        )));
    }
    for (p, &l) in l_per_p.iter().enumerate() {
        if !envelope_condition(p, l, t) {
            return Err(Error::InvalidArgument(format!(
                "l_{p} = {l} must exceed (2p+2)/T = {}",
                (2 * p + 2) as f64 / t
            )));
        }
    }
    let coeffs = g_coeffs(expansion)?;
    let scale = -(PI / 2.0).sqrt();
    let parts = coeffs
        .iter()
        .zip(l_per_p)
        .enumerate()
        .map(|(p, (g, &l))| Ok(step_control(p, l, t)?.scaled(scale * g)))
        .collect::<Result<Vec<_>>>()?;
    let control = StepControl::sum(t, &parts)?;
    let plan = SynthesisPlan {
        truncation,
        l_per_p: l_per_p.to_vec(),
        horizon: t,
        coeffs,
    };
    Ok((plan, control))
}

/// `l > (2p+2)/T`.
pub fn envelope_condition(p: usize, l: u64, horizon: f64) -> bool {
    l as f64 > (2 * p + 2) as f64 / horizon
}

/// Table bounds `(ε₁, ε₂)` for the Gaussian-sine target with one `l` for all `p`.
///
/// `ε₁ = √8 (2T/π)^{1/4} √(cosh(1/2) / (2^{2N+3} (2N+3)!))` bounds the
/// truncation error and
/// `ε₂ = 2^{11/4} (1/(T³π³e))^{1/4} (1/l) Σ_{p≤N} 2^{2p} √(p+2) (p+2)! / (2p+1)!`
/// the step-control error.
pub fn epsilon_bounds(truncation: usize, l: u64, horizon: f64) -> Result<(f64, f64)> {
    check_index(truncation)?;
    if l == 0 || !(horizon > 0.0) {
        return Err(Error::InvalidArgument(format!("need l ≥ 1 and T > 0, got l = {l}, T = {horizon}")));
    }
    let n = truncation;
    let k = 2 * n + 3;
    let ln_denominator = k as f64 * std::f64::consts::LN_2 + ln_factorial(k);
    let eps1 = 8f64.sqrt()
        * (2.0 * horizon / PI).powf(0.25)
        * (0.5 * (0.5f64.cosh().ln() - ln_denominator)).exp();
    let sum: f64 = (0..=n)
        .map(|p| 4f64.powi(p as i32) * ((p + 2) as f64).sqrt() * factorial(p + 2) / factorial(2 * p + 1))
        .sum();
    let eps2 = 2f64.powf(2.75) * (1.0 / (horizon.powi(3) * PI.powi(3) * std::f64::consts::E)).powf(0.25)
        * sum
        / l as f64;
    Ok((eps1, eps2))
}

/// Bound on `‖φ_p - φ_p^l‖₀`, valid when `(p+1)/l < T/4`:
/// `(1/(2πT))^{1/4} √(p+2)/l · 2^{p+1/2} / T^{p+3/2} · (p+2)!`.
pub fn phi_l_distance_bound(p: usize, l: u64, horizon: f64) -> f64 {
    (1.0 / (2.0 * PI * horizon)).powf(0.25) * ((p + 2) as f64).sqrt() / l as f64
        * 2f64.powf(p as f64 + 0.5)
        / horizon.powf(p as f64 + 1.5)
        * factorial(p + 2)
}

/// Limit bound `2√(2/π) (2T)^{p+1} / (2p+1)! · e^{-1/4}` on `|g_p^N|` for
/// the Gaussian-sine target.
///
/// `|g_p^N|` equals `2√(2/π) (2T)^{p+1} / (2p+1)!` times a partial sum of
/// the alternating series for `e^{-1/4}`. The bound holds when `N - p` is
/// odd and in the limit `N → ∞`; for even `N - p` the partial sum lies in
/// `(e^{-1/4}, 1]`, so `|g_p^N|` may exceed this value by up to `e^{1/4}`.
pub fn g_coeff_bound(p: usize, horizon: f64) -> f64 {
    2.0 * (2.0 / PI).sqrt() * (2.0 * horizon).powi(p as i32 + 1) / factorial(2 * p + 1) * (-0.25f64).exp()
}

/// `‖φ_n - φ_n^l‖₀` by quadrature.
pub fn phi_l_distance(n: usize, l: u64, horizon: f64, spec: &QuadratureSpec) -> Result<f64> {
    l2_norm_halfline(|s| phi(n, s, horizon) - phi_l(n, l, s, horizon), spec)
}

/// Admissibility threshold for `‖φ_p - φ_p^{l_p}‖₀`:
/// `(π³/(Te²))^{1/4} ε / (‖V^T‖₀ √(N+2) cosh(2√(2T(N+2))))`.
///
/// Picking every `l_p` below this threshold guarantees
/// `‖V^T - V_N^l‖₀ ≤ 2ε` once the truncation error is below `ε`.
pub fn l_threshold(eps: f64, target_norm: f64, truncation: usize, horizon: f64) -> f64 {
    let n2 = (truncation + 2) as f64;
    (PI.powi(3) / (horizon * std::f64::consts::E.powi(2))).powf(0.25) * eps
        / (target_norm * n2.sqrt() * (2.0 * (2.0 * horizon * n2).sqrt()).cosh())
}

/// Whether `l` satisfies the admissibility inequality for index `p`.
pub fn l_is_admissible(
    p: usize,
    l: u64,
    eps: f64,
    target_norm: f64,
    truncation: usize,
    horizon: f64,
    spec: &QuadratureSpec,
) -> Result<bool> {
    Ok(phi_l_distance(p, l, horizon, spec)? < l_threshold(eps, target_norm, truncation, horizon))
}

/// Largest deviation of `V` for `u_l^n` from `-√(2/π) i φ_n^l` on the grid.
pub fn verify_identity_phi(n: usize, l: u64, horizon: f64, sigma_grid: &Grid) -> Result<f64> {
    let u = step_control(n, l, horizon)?;
    let c = (2.0 / PI).sqrt();
    Ok(sigma_grid
        .points()
        .iter()
        .map(|&s| {
            let v = control_term_sigma(&u, s);
            let expect = -c * phi_l(n, l, s, horizon);
            (v.re.powi(2) + (v.im - expect).powi(2)).sqrt()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat::{error_norm, OddState, SpectralProfile};
    use crate::hermite::{expand_target, gaussian_sine_expansion};
    use crate::moments::moments_of_control;
    use crate::numerics::Domain;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn step_control_examples() {
        let u = step_control(0, 10, 1.0).unwrap();
        assert_eq!(u.value_at(0.05), 10.0);
        assert_eq!(u.value_at(0.5), 0.0);
        let u = step_control(1, 7, 1.0).unwrap();
        assert_eq!(u.levels()[..2], [-49.0, 49.0]);
        let u = step_control(2, 5, 1.0).unwrap();
        assert_eq!(u.levels()[..3], [125.0, -250.0, 125.0]);
        assert!(matches!(step_control(2, 2, 1.0), Err(Error::SupportExceedsHorizon { .. })));
        assert_eq!(step_control(1, 2, 1.0).unwrap().breakpoints(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn h_coeff_examples() {
        assert_eq!(h_coeff(0, 0, 1.0).unwrap(), -4.0);
        assert_eq!(h_coeff(0, 1, 1.0).unwrap(), -24.0);
        assert_eq!(h_coeff(1, 1, 1.0).unwrap(), 32.0);
        assert!(h_coeff(0, 13, 1.0).is_err());
        assert!(h_coeff(2, 1, 1.0).is_err());
        // Log-space branch against the exact product.
        let exact = -2.0 * 2.0 * factorial(19) / factorial(9);
        assert_relative_eq!(h_coeff(0, 9, 1.0).unwrap(), exact, max_relative = 1e-12);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(0, 0.0, 1.0), 0.0);
        assert_relative_eq!(phi(0, 1.0, 1.0), (-1.0f64).exp(), max_relative = 1e-15);
        for s in [0.1, 1.0, 2.5] {
            // |φ_0^l - φ_0| ≤ φ_0 · (σ²/2l) e^{σ²/l}.
            let z = s * s / 1e6;
            let gap = (phi_l(0, 1_000_000, s, 1.0) - phi(0, s, 1.0)).abs();
            assert!(gap <= phi(0, s, 1.0) * 0.5 * z * z.exp() + 1e-15 * phi(0, s, 1.0));
            assert!((phi_l(0, 1_000_000_000, s, 1.0) - phi(0, s, 1.0)).abs() < 1e-9);
        }
        // Taylor branch continuity.
        let s = (TAYLOR_SWITCH * 100.0).sqrt();
        for k in [0.999, 1.001] {
            let sk = s * k;
            let z = sk * sk / 100.0;
            let ratio = phi_l(2, 100, sk, 1.0) / phi(2, sk, 1.0);
            assert_relative_eq!(ratio, (z.exp_m1() / z).powi(3), max_relative = 1e-14);
        }
    }

    #[test]
    fn identity_holds() {
        let grid = Grid::linspace(-5.0, 5.0, 50, Domain::FullLine).unwrap();
        assert!(verify_identity_phi(0, 10, 1.0, &grid).unwrap() <= 1e-10);
        assert!(verify_identity_phi(1, 100, 1.0, &grid).unwrap() <= 1e-10);
        assert!(verify_identity_phi(2, 1000, 1.0, &grid).unwrap() <= 1e-9);
    }

    #[test]
    fn synthesize_examples() {
        // Single term with g_0 = 1: ω_0 h_0^0 = 1, so ω_0 = -1/(4T).
        let e = HermiteExpansion::new(1.0, vec![-0.25]).unwrap();
        let (plan, u) = synthesize(&e, &[10]).unwrap();
        assert_relative_eq!(plan.coeffs[0], 1.0, max_relative = 1e-15);
        let expect = step_control(0, 10, 1.0).unwrap().scaled(-(PI / 2.0).sqrt());
        assert_eq!(u, expect.canonical());

        let (plan, _) = synthesize(&gaussian_sine_expansion(1, 1.0).unwrap(), &[10, 10]).unwrap();
        assert_relative_eq!(plan.coeffs[0], -3.0 * (2.0 / PI).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(plan.coeffs[0], -2.3937, epsilon = 1e-4);

        let (_, u) = synthesize(&HermiteExpansion::new(1.0, vec![0.0, 0.0]).unwrap(), &[10, 10]).unwrap();
        assert!(u.is_zero());

        assert!(synthesize(&gaussian_sine_expansion(1, 1.0).unwrap(), &[10]).is_err());
        assert!(synthesize(&gaussian_sine_expansion(1, 1.0).unwrap(), &[10, 4]).is_err());
    }

    #[test]
    fn synthesized_control_matches_synthesized_profile() {
        let e = gaussian_sine_expansion(2, 1.0).unwrap();
        let (plan, u) = synthesize(&e, &[20, 30, 40]).unwrap();
        let profile = SpectralProfile::Synthesized {
            coeffs: plan.coeffs.clone(),
            l_per_p: plan.l_per_p.clone(),
            horizon: 1.0,
        };
        for s in [0.2, 0.8, 1.7, 3.0] {
            let a = control_term_sigma(&u, s);
            let b = profile.value(s).unwrap();
            assert!((a - b).norm() < 1e-10, "σ={s}");
        }
    }

    #[test]
    fn example3_coefficients_by_quadrature() {
        let spec = QuadratureSpec::default();
        let e = expand_target(&OddState::Example3 { horizon: 1.0 }, 1, 1.0, &spec).unwrap();
        assert_relative_eq!(e.coeffs()[0], (2.0 / PI).sqrt(), max_relative = 1e-9);
        assert_relative_eq!(e.coeffs()[1], -(2.0 / PI).sqrt() / 24.0, max_relative = 1e-9);
    }

    #[test]
    fn epsilon_bounds_match_direct_evaluation() {
        // Independent evaluation with exact integer factorials.
        fn fact(n: u64) -> f64 {
            (1..=n).product::<u64>() as f64
        }
        for n in 0..=5u64 {
            for l in [10u64, 100, 1000] {
                let e1 = 8f64.sqrt() * (2.0 / PI).powf(0.25)
                    * (0.5f64.cosh() / (2f64.powi(2 * n as i32 + 3) * fact(2 * n + 3))).sqrt();
                let sum: f64 = (0..=n)
                    .map(|p| 4f64.powi(p as i32) * ((p + 2) as f64).sqrt() * fact(p + 2) / fact(2 * p + 1))
                    .sum();
                let e2 = 2f64.powf(11.0 / 4.0) * (1.0 / (PI.powi(3) * std::f64::consts::E)).powf(0.25) * sum / l as f64;
                let (a, b) = epsilon_bounds(n as usize, l, 1.0).unwrap();
                assert_relative_eq!(a, e1, max_relative = 1e-13);
                assert_relative_eq!(b, e2, max_relative = 1e-13);
            }
        }
        assert!(epsilon_bounds(13, 10, 1.0).is_err());
    }

    #[test]
    fn epsilon_table_rows_round_up_to_printed_digits() {
        let rows = [
            (1, 10, 0.0433, 2.1662),
            (1, 100, 0.0433, 0.2167),
            (2, 100, 0.0034, 0.3588),
            (2, 1000, 0.0034, 0.0359),
        ];
        let up = |v: f64| (v * 1e4).ceil() / 1e4;
        for (n, l, e1, e2) in rows {
            let (a, b) = epsilon_bounds(n, l, 1.0).unwrap();
            assert!((up(a) - e1).abs() < 1e-12, "N={n} l={l}: ε₁ {a}");
            assert!((up(b) - e2).abs() < 1e-12, "N={n} l={l}: ε₂ {b}");
            assert!(a <= e1 && b <= e2);
        }
    }

    #[test]
    fn envelope_bounds_phi_l() {
        for n in 0..=3 {
            let t = 1.0;
            let l = (2 * n + 2) as u64 + 1;
            for k in 1..200 {
                let s = k as f64 * 0.05;
                assert!(phi_l(n, l, s, t).abs() <= s.powi(2 * n as i32 + 1) * (-s * s * t / 2.0).exp() * (1.0 + 1e-14));
            }
        }
    }

    #[test]
    fn phi_l_converges_and_respects_bound() {
        let spec = QuadratureSpec::default().with_abs_tol(1e-16);
        for n in 0..=3 {
            let mut prev = f64::INFINITY;
            for l in [10u64, 100, 1000, 10_000] {
                let d = phi_l_distance(n, l, 1.0, &spec).unwrap();
                assert!(d < prev, "n={n} l={l}");
                prev = d;
                if ((n + 1) as f64 / l as f64) < 0.25 {
                    assert!(d <= phi_l_distance_bound(n, l, 1.0), "n={n} l={l}: {d}");
                }
            }
        }
    }

    #[test]
    fn g_coefficients_respect_bound() {
        let quarter = 0.25f64.exp();
        for big_n in 0..=6 {
            let (plan, _) = synthesize(&gaussian_sine_expansion(big_n, 1.0).unwrap(), &vec![1000; big_n + 1]).unwrap();
            for (p, g) in plan.coeffs.iter().enumerate() {
                let bound = g_coeff_bound(p, 1.0);
                if (big_n - p) % 2 == 1 {
                    assert!(g.abs() <= bound, "N={big_n} p={p}: {g}");
                } else {
                    assert!(g.abs() > bound && g.abs() <= bound * quarter * (1.0 + 1e-14));
                }
            }
        }
        // Large N approaches the limit from both sides.
        let (plan, _) = synthesize(&gaussian_sine_expansion(12, 1.0).unwrap(), &vec![1000; 13]).unwrap();
        assert_relative_eq!(plan.coeffs[0].abs(), g_coeff_bound(0, 1.0), max_relative = 1e-12);
    }

    #[test]
    fn step_control_moments() {
        for n in 0..=3usize {
            for l in [10u64, 50] {
                let u = step_control(n, l, 1.0).unwrap();
                let m = moments_of_control(&u, 4);
                let lf = l as f64;
                for (k, w) in m.omegas.iter().enumerate() {
                    let exact: f64 = (0..=n)
                        .map(|j| {
                            let sign = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
                            sign * binomial(n, j) * lf.powi(n as i32 + 1)
                                * (((j + 1) as f64).powi(k as i32 + 1) - (j as f64).powi(k as i32 + 1))
                                / ((k + 1) as f64 * lf.powi(k as i32 + 1))
                        })
                        .sum();
                    assert!((w - exact).abs() <= 1e-9 * exact.abs().max(1.0));
                    if k < n {
                        assert!(w.abs() <= 1e-9 * lf.powi((n - k) as i32), "n={n} k={k}: {w}");
                    }
                    if k == n {
                        let rel = (w - factorial(n)) / factorial(n);
                        assert!(rel.abs() <= 2.0 * (n + 1) as f64 / lf, "n={n} l={l}: {w}");
                    }
                }
            }
        }
    }

    #[test]
    fn bounds_hold_for_table_configurations() {
        let spec = QuadratureSpec::default().with_abs_tol(1e-14);
        let target = SpectralProfile::image(OddState::Example3 { horizon: 1.0 });
        for (n, l) in [(1usize, 10u64), (1, 100), (2, 100), (2, 1000)] {
            let e = gaussian_sine_expansion(n, 1.0).unwrap();
            let (_, u) = synthesize(&e, &vec![l; n + 1]).unwrap();
            let measured = error_norm(&SpectralProfile::end_state(u), &target, &spec).unwrap();
            let (e1, e2) = epsilon_bounds(n, l, 1.0).unwrap();
            assert!(measured <= e1 + e2, "N={n} l={l}: {measured} > {}", e1 + e2);
        }
    }

    #[test]
    fn admissibility_predicate() {
        let spec = QuadratureSpec::default().with_abs_tol(1e-16);
        let thr = l_threshold(0.1, 1.0, 1, 1.0);
        assert!(thr > 0.0);
        assert!(!l_is_admissible(0, 10, 0.1, 1.0, 1, 1.0, &spec).unwrap());
        assert!(l_is_admissible(0, 10_000_000, 0.1, 1.0, 1, 1.0, &spec).unwrap());
    }

    proptest! {
        #[test]
        fn psi_hat_is_i_sum_h_phi(n in 0usize..6, t in 0.3f64..2.5, s in -4.0f64..4.0) {
            let sum: f64 = (0..=n).map(|p| h_coeff(p, n, t).unwrap() * phi(p, s, t)).sum();
            let psi = crate::hermite::psi_hat_t(n, s, t).unwrap();
            prop_assert!((psi.im - sum).abs() <= 1e-10 * sum.abs().max(1.0));
            prop_assert_eq!(psi.re, 0.0);
        }
    }
}
