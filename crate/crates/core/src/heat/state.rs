use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{control_term_sigma, control_term_x, StepControl};
use crate::error::{Error, Result};
use crate::hermite::{check_index, psi_hat_unchecked, psi_unchecked, HermiteExpansion};
use crate::numerics::{erfc, integrate, Grid, QuadratureSpec};

/// An odd function on `ℝ`, stored through its restriction to `x ≥ 0`.
///
/// Closed-form variants also know their Fourier image exactly; sampled
/// states fall back to a quadrature sine transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OddState {
    Zero,
    /// `coeff · ψ_n^T`.
    Basis { n: usize, horizon: f64, coeff: f64 },
    Expansion(HermiteExpansion),
    /// End state at time `T` reached from rest under the boundary control.
    Reached(StepControl),
    /// State reached by `v(ξ) = ξ`:
    /// `x √(T/π) e^{-x²/4T} - (x²/2) erfc(x / 2√T)`.
    Example1 { horizon: f64 },
    /// State reached by `v(ξ) = 1 - ξ`: `erfc(x / 2√T) - W₁`.
    Example2 { horizon: f64 },
    /// `2 √(2/π) e^{1/4} e^{-x²/4T} sin(x / √(2T))`, which is not reachable
    /// exactly but lies in the closure of the reachable set.
    Example3 { horizon: f64 },
    Scaled { factor: f64, inner: Box<OddState> },
    /// Samples on a half-line grid, linearly interpolated and zero past the
    /// last point.
    Samples { grid: Grid, values: Vec<f64> },
}

impl OddState {
    pub fn basis(n: usize, horizon: f64, coeff: f64) -> Result<Self> {
        check_index(n)?;
        if !(horizon > 0.0) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
        }
        Ok(Self::Basis { n, horizon, coeff })
    }

    pub fn samples(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidGrid(format!(
                "{} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.points().first().is_some_and(|&x| x < 0.0) {
            return Err(Error::InvalidGrid("state samples must lie on x ≥ 0".into()));
        }
        Ok(Self::Samples { grid, values })
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self::Scaled {
            factor,
            inner: Box::new(self),
        }
    }

    /// Horizon the representation refers to, if any.
    pub fn horizon(&self) -> Option<f64> {
        match self {
            Self::Basis { horizon, .. }
            | Self::Example1 { horizon }
            | Self::Example2 { horizon }
            | Self::Example3 { horizon } => Some(*horizon),
            Self::Expansion(e) => Some(e.horizon()),
            Self::Reached(u) => Some(u.horizon()),
            Self::Scaled { inner, .. } => inner.horizon(),
            Self::Zero | Self::Samples { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Basis { coeff, .. } => *coeff == 0.0,
            Self::Expansion(e) => e.coeffs().iter().all(|c| *c == 0.0),
            Self::Reached(u) => u.is_zero(),
            Self::Scaled { factor, inner } => *factor == 0.0 || inner.is_zero(),
            Self::Samples { values, .. } => values.iter().all(|v| *v == 0.0),
            _ => false,
        }
    }

    /// Value at `x`, extended oddly to `x < 0`.
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return -self.eval(-x);
        }
        match self {
            Self::Zero => 0.0,
            Self::Basis { n, horizon, coeff } => {
                coeff * psi_unchecked(2 * n + 1, x / (2.0 * horizon).sqrt())
            }
            Self::Expansion(e) => e.eval(x),
            Self::Reached(u) => control_term_x(u, x),
            Self::Example1 { horizon } => example1(x, *horizon),
            Self::Example2 { horizon } => erfc(x / (2.0 * horizon.sqrt())) - example1(x, *horizon),
            Self::Example3 { horizon } => {
                2.0 * (2.0 / PI).sqrt()
                    * (0.25 - x * x / (4.0 * horizon)).exp()
                    * (x / (2.0 * horizon).sqrt()).sin()
            }
            Self::Scaled { factor, inner } => factor * inner.eval(x),
            Self::Samples { grid, values } => grid.interpolate(values, x),
        }
    }

    /// Closed-form Fourier image, when one is known.
    pub fn fourier_closed(&self, sigma: f64) -> Option<Complex64> {
        let i = Complex64::i();
        Some(match self {
            Self::Zero => Complex64::new(0.0, 0.0),
            Self::Basis { n, horizon, coeff } => *coeff * psi_hat_unchecked(*n, sigma, *horizon),
            Self::Expansion(e) => e.fourier(sigma),
            Self::Reached(u) => control_term_sigma(u, sigma),
            Self::Example1 { horizon } => {
                let s = sigma * sigma;
                -(2.0 / PI).sqrt() * i * sigma * power_exp_integral(1, s, *horizon)
            }
            Self::Example2 { horizon } => {
                let s = sigma * sigma;
                let v = power_exp_integral(0, s, *horizon) - power_exp_integral(1, s, *horizon);
                -(2.0 / PI).sqrt() * i * sigma * v
            }
            Self::Example3 { horizon } => {
                let b = (2.0 * horizon).sqrt() * sigma;
                let g = -horizon * sigma * sigma;
                let sinh_damped = 0.5 * ((g + b).exp() - (g - b).exp());
                -4.0 * i * (horizon / PI).sqrt() * (-0.25f64).exp() * sinh_damped
            }
            Self::Scaled { factor, inner } => *factor * inner.fourier_closed(sigma)?,
            Self::Samples { .. } => return None,
        })
    }

    /// Fourier image `-i √(2/π) ∫_0^∞ W(x) sin(xσ) dx`, closed form where
    /// available and by quadrature otherwise.
    pub fn fourier(&self, sigma: f64, spec: &QuadratureSpec) -> Result<Complex64> {
        if let Some(v) = self.fourier_closed(sigma) {
            return Ok(v);
        }
        let upper = match self {
            Self::Samples { grid, .. } => grid.points().last().copied().unwrap_or(0.0),
            _ => f64::INFINITY,
        };
        let q = integrate(|x| self.eval(x) * (x * sigma).sin(), 0.0, upper, spec)?;
        Ok(Complex64::new(0.0, -(2.0 / PI).sqrt() * q.value))
    }
}

fn example1(x: f64, t: f64) -> f64 {
    let z = x / (2.0 * t.sqrt());
    x * (t / PI).sqrt() * (-z * z).exp() - 0.5 * x * x * erfc(z)
}

/// `∫_0^T ξ^m e^{-sξ} dξ` for `s ≥ 0`.
///
/// A power series is used while `sT ≤ 2`; past that the upward recurrence
/// `I_m = (m I_{m-1} - T^m e^{-sT}) / s` is stable.
pub(crate) fn power_exp_integral(m: u32, s: f64, t: f64) -> f64 {
    let z = s * t;
    if z <= 2.0 {
        // Σ_k (-s)^k T^{m+k+1} / (k! (m+k+1))
        let mut sum = 0.0;
        let mut term = t.powi(m as i32 + 1);
        for k in 0..60 {
            let contrib = term / (m + k + 1) as f64;
            sum += contrib;
            if contrib.abs() < 1e-17 * sum.abs() {
                break;
            }
            term *= -z / (k + 1) as f64;
        }
        sum
    } else {
        let decay = (-z).exp();
        let mut acc = -(-z).exp_m1() / s;
        for k in 1..=m {
            acc = (k as f64 * acc - t.powi(k as i32) * decay) / s;
        }
        acc
    }
}
