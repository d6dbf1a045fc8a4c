//! Forward evaluation of the controlled heat equation.
//!
//! With zero initial state and boundary control `u`, the end state is
//! `W(x, T) = ∫_0^T u(T - ξ) x e^{-x²/4ξ} / (2√π ξ^{3/2}) dξ`. A constant
//! piece `c` of `u` on `(a, b)` contributes exactly
//! `c [erf(x / 2√(T-b)) - erf(x / 2√(T-a))]`, so step controls are simulated
//! without quadrature. On the Fourier side
//! `V(σ, T) = e^{-Tσ²} V⁰(σ) - √(2/π) iσ ∫_0^T e^{-(T-t)σ²} u(t) dt`.

mod control;
mod spectral;
mod state;

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;

pub use control::StepControl;
pub use spectral::SpectralProfile;
pub use state::OddState;

use crate::error::{Error, Result};
use crate::numerics::{erf_diff, integrate, l2_norm_halfline, QuadratureSpec};

/// Below this value of `σ²T` the piecewise σ-integral switches to its
/// first-order Taylor expansion.
const TAYLOR_SWITCH: f64 = 1e-8;

/// Control contribution to `W(x, T)` from rest. At `x = 0` this is the
/// right limit, the boundary value `u(T-)`.
pub(crate) fn control_term_x(u: &StepControl, x: f64) -> f64 {
    if x < 0.0 {
        return -control_term_x(u, -x);
    }
    if x == 0.0 {
        return u.levels().last().copied().unwrap_or(0.0);
    }
    let t = u.horizon();
    u.pieces()
        .filter(|&(_, _, c)| c != 0.0)
        .map(|(a, b, c)| {
            let (alpha, beta) = (t - b, t - a);
            let hi = if alpha <= 0.0 {
                f64::INFINITY
            } else {
                x / (2.0 * alpha.sqrt())
            };
            c * erf_diff(x / (2.0 * beta.sqrt()), hi)
        })
        .sum()
}

/// Control contribution to `V(σ, T)` from rest.
pub(crate) fn control_term_sigma(u: &StepControl, sigma: f64) -> Complex64 {
    if sigma == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let t = u.horizon();
    let s = sigma * sigma;
    let integral: f64 = u
        .pieces()
        .filter(|&(_, _, c)| c != 0.0)
        .map(|(a, b, c)| {
            let k = if s * t < TAYLOR_SWITCH {
                (b - a) * (1.0 - 0.5 * s * (2.0 * t - a - b))
            } else {
                (-(t - b) * s).exp() * -(-(b - a) * s).exp_m1() / s
            };
            c * k
        })
        .sum();
    Complex64::new(0.0, -(2.0 / PI).sqrt() * sigma * integral)
}

/// Free evolution `∫ W0(x + 2√t s) e^{-s²} / √π ds` of the odd extension.
fn homogeneous(w0: &OddState, t: f64, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    if w0.is_zero() {
        return Ok(0.0);
    }
    if x < 0.0 {
        return Ok(-homogeneous(w0, t, -x, spec)?);
    }
    let r = 2.0 * t.sqrt();
    let f = |s: f64| w0.eval(x + r * s) * (-s * s).exp();
    // The odd extension has a kink at the origin; split there.
    let s0 = -x / r;
    let left = integrate(f, f64::NEG_INFINITY, s0, spec)?;
    let right = integrate(f, s0, f64::INFINITY, spec)?;
    Ok((left.value + right.value) / PI.sqrt())
}

/// `W(x, T)` for control `u` on `[0, T]` and initial state `w0`.
pub fn end_state_x(u: &StepControl, w0: &OddState, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(control_term_x(u, x) + homogeneous(w0, u.horizon(), x, spec)?)
}

/// `W(x, t)` for an intermediate time `0 < t ≤ T`.
pub fn state_at(u: &StepControl, w0: &OddState, t: f64, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    let head = u.restrict(t)?;
    Ok(control_term_x(&head, x) + homogeneous(w0, t, x, spec)?)
}

/// `V(σ, T)`, the Fourier image of the end state.
pub fn end_state_sigma(
    u: &StepControl,
    w0: &OddState,
    sigma: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let mut v = control_term_sigma(u, sigma);
    if !w0.is_zero() {
        v += (-u.horizon() * sigma * sigma).exp() * w0.fourier(sigma, spec)?;
    }
    Ok(v)
}

/// Bound `√(2/π) ‖u‖_∞ (1 - e^{-tσ²}) / |σ|` on `|V(σ, t)|` from rest.
pub fn linfty_envelope(u: &StepControl, sigma: f64, t: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    (2.0 / PI).sqrt() * u.linf_norm() * -(-t * sigma * sigma).exp_m1() / sigma.abs()
}

/// Anything that can be sampled as an odd function on one side of the
/// Fourier transform.
pub trait OddProfile {
    fn value(&self, at: f64) -> Result<Complex64>;
}

impl OddProfile for OddState {
    fn value(&self, at: f64) -> Result<Complex64> {
        Ok(Complex64::from(self.eval(at)))
    }
}

impl OddProfile for SpectralProfile {
    fn value(&self, at: f64) -> Result<Complex64> {
        SpectralProfile::value(self, at)
    }
}

/// `‖a - b‖` in `L²(ℝ)`, with both profiles on the same side.
pub fn error_norm<P: OddProfile>(a: &P, b: &P, spec: &QuadratureSpec) -> Result<f64> {
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let diff = |x: f64| match (a.value(x), b.value(x)) {
        (Ok(va), Ok(vb)) => va - vb,
        (Err(e), _) | (_, Err(e)) => {
            failure.borrow_mut().get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    };
    let norm = l2_norm_halfline(diff, spec);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    norm
}

/// `‖a‖` in `L²(ℝ)`.
pub fn norm<P: OddProfile>(a: &P, spec: &QuadratureSpec) -> Result<f64> {
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let f = |x: f64| {
        a.value(x).unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            Complex64::new(0.0, 0.0)
        })
    };
    let norm = l2_norm_halfline(f, spec);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    norm
}

/// A norm with the error estimate of the quadrature behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub err_estimate: f64,
}

/// `‖a - b‖` with its error estimate.
///
/// Unlike [`error_norm`], a quadrature that stalls at the rounding floor of
/// the integrand still returns its best value. Controls with large
/// alternating levels evaluate to noisy x-side profiles; this lets callers
/// see how noisy.
pub fn error_norm_estimate<P: OddProfile>(a: &P, b: &P, spec: &QuadratureSpec) -> Result<NormEstimate> {
    estimate(|x| Ok(a.value(x)? - b.value(x)?), spec)
}

/// `‖a‖` with its error estimate; see [`error_norm_estimate`].
pub fn norm_estimate<P: OddProfile>(a: &P, spec: &QuadratureSpec) -> Result<NormEstimate> {
    estimate(|x| a.value(x), spec)
}

fn estimate(f: impl Fn(f64) -> Result<Complex64>, spec: &QuadratureSpec) -> Result<NormEstimate> {
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let sq = |x: f64| {
        f(x).map(|v| v.norm_sqr()).unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            0.0
        })
    };
    let (half, err) = match integrate(sq, 0.0, f64::INFINITY, spec) {
        Ok(q) => (q.value, q.err_estimate),
        Err(Error::NonConvergent { value, err_estimate }) => (value, err_estimate),
        Err(e) => return Err(e),
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let value = (2.0 * half.max(0.0)).sqrt();
    // d‖·‖ = d(∫|f|²) / ‖·‖ for ‖·‖² = 2∫|f|².
    let err_estimate = if value > 0.0 { err / value } else { (2.0 * err).sqrt() };
    Ok(NormEstimate { value, err_estimate })
}
