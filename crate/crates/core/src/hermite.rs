//! Hermite polynomials and the scaled odd Hermite basis.
//!
//! For a horizon `T > 0` the basis functions are
//! `ψ_n^T(x) = ψ_{2n+1}(x / √(2T))`, with `ψ_k(x) = H_k(x) e^{-x²/2}`.
//! They are mutually orthogonal in `L²(ℝ)` with
//! `‖ψ_n^T‖² = √(2πT) · 2^{2n+1} · (2n+1)!`, and their Fourier images are
//! `(-1)^{n+1} i √(2T) ψ_{2n+1}(√(2T) σ)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heat::OddState;
use crate::numerics::{integrate, ln_factorial, QuadratureSpec};

/// Largest polynomial degree accepted by [`hermite_poly`] and [`psi`].
pub const MAX_DEGREE: usize = 200;

/// Largest basis index `n` (so `ψ_{2n+1}` has degree 25). Factorials such
/// as `(2N+3)!` stop being comfortable in double precision past this.
pub const MAX_INDEX: usize = 12;

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree: n,
            max: MAX_DEGREE,
        });
    }
    Ok(())
}

pub(crate) fn check_index(n: usize) -> Result<()> {
    if n > MAX_INDEX {
        return Err(Error::DegreeTooLarge {
            degree: n,
            max: MAX_INDEX,
        });
    }
    Ok(())
}

fn check_horizon(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("horizon must be positive, got {t}")))
    }
}

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence
/// `H_{k+1} = 2x H_k - 2k H_{k-1}`.
pub fn hermite_poly(n: usize, x: f64) -> Result<f64> {
    check_degree(n)?;
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return Ok(prev);
    }
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Hermite function `ψ_n(x) = H_n(x) e^{-x²/2}`.
///
/// Evaluated through the orthonormal recurrence and rescaled, so large `|x|`
/// underflows to zero instead of producing `∞ · 0`.
pub fn psi(n: usize, x: f64) -> Result<f64> {
    check_degree(n)?;
    Ok(psi_unchecked(n, x))
}

pub(crate) fn psi_unchecked(n: usize, x: f64) -> f64 {
    // Orthonormal h_k = H_k e^{-x²/2} / sqrt(2^k k! √π).
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    let ln_scale = 0.5 * (n as f64 * std::f64::consts::LN_2 + ln_factorial(n) + 0.5 * PI.ln());
    cur * ln_scale.exp()
}

/// Scaled odd basis function `ψ_n^T(x) = ψ_{2n+1}(x / √(2T))`.
pub fn psi_t(n: usize, x: f64, t: f64) -> Result<f64> {
    check_index(n)?;
    check_horizon(t)?;
    Ok(psi_unchecked(2 * n + 1, x / (2.0 * t).sqrt()))
}

/// Fourier image of `ψ_n^T`.
pub fn psi_hat_t(n: usize, sigma: f64, t: f64) -> Result<Complex64> {
    check_index(n)?;
    check_horizon(t)?;
    Ok(psi_hat_unchecked(n, sigma, t))
}

pub(crate) fn psi_hat_unchecked(n: usize, sigma: f64, t: f64) -> Complex64 {
    let s = (2.0 * t).sqrt();
    let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
    Complex64::new(0.0, sign * s * psi_unchecked(2 * n + 1, s * sigma))
}

/// `‖ψ_n^T‖² = √(2πT) 2^{2n+1} (2n+1)!`, in log space past `n = 8`.
pub fn basis_norm_sq(n: usize, t: f64) -> f64 {
    let k = 2 * n + 1;
    if n <= 8 {
        let fact: f64 = (2..=k).map(|i| i as f64).product();
        (2.0 * PI * t).sqrt() * 2f64.powi(k as i32) * fact
    } else {
        (0.5 * (2.0 * PI * t).ln() + k as f64 * std::f64::consts::LN_2 + ln_factorial(k)).exp()
    }
}

/// Inner product `⟨ψ_n^T, ψ_m^T⟩` over `ℝ` by quadrature.
pub fn basis_gram(n: usize, m: usize, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_index(n)?;
    check_index(m)?;
    check_horizon(t)?;
    let scale = 1.0 / (2.0 * t).sqrt();
    // Off-diagonal entries vanish, so tolerances are taken relative to the
    // size of the factors rather than to the result.
    let magnitude = (basis_norm_sq(n, t) * basis_norm_sq(m, t)).sqrt();
    let spec = spec.with_abs_tol(spec.abs_tol.max(spec.rel_tol * magnitude));
    let q = integrate(
        |x| psi_unchecked(2 * n + 1, x * scale) * psi_unchecked(2 * m + 1, x * scale),
        0.0,
        f64::INFINITY,
        &spec,
    )?;
    Ok(2.0 * q.value)
}

/// Coefficients `ω_0..ω_N` of an odd state in the basis `{ψ_n^T}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermiteExpansion {
    #[serde(rename = "T")]
    horizon: f64,
    #[serde(rename = "omegas")]
    coeffs: Vec<f64>,
}

impl HermiteExpansion {
    pub fn new(horizon: f64, coeffs: Vec<f64>) -> Result<Self> {
        check_horizon(horizon)?;
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("expansion needs at least one coefficient".into()));
        }
        check_index(coeffs.len() - 1)?;
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite coefficient {c}")));
        }
        Ok(Self { horizon, coeffs })
    }

    /// Re-checks invariants after deserialisation.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.horizon, self.coeffs)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Truncation order `N`.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        let scale = 1.0 / (2.0 * self.horizon).sqrt();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(n, c)| c * psi_unchecked(2 * n + 1, x * scale))
            .sum()
    }

    pub fn fourier(&self, sigma: f64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(n, c)| *c * psi_hat_unchecked(n, sigma, self.horizon))
            .sum()
    }

    /// Partial Parseval sum `√(2πT) Σ_{n=from}^{N} |ω_n|² 2^{2n+1} (2n+1)!`.
    pub fn tail_energy(&self, from: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(from)
            .map(|(n, c)| c * c * basis_norm_sq(n, self.horizon))
            .sum()
    }
}

/// Exact coefficients `ω_n = √(2/π) (-1)^n / (4^n (2n+1)!)` of the
/// Gaussian-sine target [`OddState::Example3`], for any horizon.
pub fn gaussian_sine_expansion(truncation: usize, horizon: f64) -> Result<HermiteExpansion> {
    check_index(truncation)?;
    let coeffs = (0..=truncation)
        .map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * (2.0 / PI).sqrt() * (-(n as f64) * 4f64.ln() - ln_factorial(2 * n + 1)).exp()
        })
        .collect();
    HermiteExpansion::new(horizon, coeffs)
}

/// Expands `target` in `{ψ_n^T}` up to `n = truncation` using quadrature
/// inner products.
pub fn expand_target(
    target: &OddState,
    truncation: usize,
    horizon: f64,
    spec: &QuadratureSpec,
) -> Result<HermiteExpansion> {
    check_index(truncation)?;
    check_horizon(horizon)?;
    let scale = 1.0 / (2.0 * horizon).sqrt();
    let coeffs = (0..=truncation)
        .map(|n| {
            let spec = spec.with_abs_tol(spec.abs_tol.max(spec.rel_tol * basis_norm_sq(n, horizon).sqrt()));
            let q = integrate(
                |x| target.eval(x) * psi_unchecked(2 * n + 1, x * scale),
                0.0,
                f64::INFINITY,
                &spec,
            )?;
            Ok(2.0 * q.value / basis_norm_sq(n, horizon))
        })
        .collect::<Result<Vec<_>>>()?;
    HermiteExpansion::new(horizon, coeffs)
}
