use num_complex::Complex64;

use super::{end_state_sigma, OddState, StepControl};
use crate::error::Result;
use crate::hermite::psi_hat_unchecked;
use crate::numerics::{Grid, QuadratureSpec};
use crate::synthesis::{phi, phi_l};

/// A function of the frequency `σ`.
///
/// Every profile here is either real and odd or `i` times a real odd
/// function, so its `L²(ℝ)` norm is twice the half-line integral.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralProfile {
    /// `φ_n(σ) = σ^{2n+1} e^{-Tσ²}`.
    Phi { n: usize, horizon: f64 },
    /// `φ_n^l(σ) = φ_n(σ) ((e^{σ²/l} - 1) / (σ²/l))^{n+1}`.
    PhiL { n: usize, l: u64, horizon: f64 },
    /// Fourier image of `ψ_n^T`.
    PsiHat { n: usize, horizon: f64 },
    /// `i Σ_p g_p φ_p`.
    Truncated { coeffs: Vec<f64>, horizon: f64 },
    /// `i Σ_p g_p φ_p^{l_p}`.
    Synthesized {
        coeffs: Vec<f64>,
        l_per_p: Vec<u64>,
        horizon: f64,
    },
    /// Fourier image of a state; quadrature is used when no closed form exists.
    Image { state: OddState, spec: QuadratureSpec },
    /// `V(σ, T)` for the controlled system.
    EndState {
        control: StepControl,
        initial: OddState,
        spec: QuadratureSpec,
    },
    /// Complex samples on a grid, linearly interpolated and extended oddly.
    Samples { grid: Grid, values: Vec<Complex64> },
}

impl SpectralProfile {
    pub fn image(state: OddState) -> Self {
        Self::Image {
            state,
            spec: QuadratureSpec::default(),
        }
    }

    pub fn end_state(control: StepControl) -> Self {
        Self::EndState {
            control,
            initial: OddState::Zero,
            spec: QuadratureSpec::default(),
        }
    }

    pub fn value(&self, sigma: f64) -> Result<Complex64> {
        let i = Complex64::i();
        Ok(match self {
            Self::Phi { n, horizon } => Complex64::from(phi(*n, sigma, *horizon)),
            Self::PhiL { n, l, horizon } => Complex64::from(phi_l(*n, *l, sigma, *horizon)),
            Self::PsiHat { n, horizon } => psi_hat_unchecked(*n, sigma, *horizon),
            Self::Truncated { coeffs, horizon } => {
                let re: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(p, g)| g * phi(p, sigma, *horizon))
                    .sum();
                i * re
            }
            Self::Synthesized {
                coeffs,
                l_per_p,
                horizon,
            } => {
                let re: f64 = coeffs
                    .iter()
                    .zip(l_per_p)
                    .enumerate()
                    .map(|(p, (g, l))| g * phi_l(p, *l, sigma, *horizon))
                    .sum();
                i * re
            }
            Self::Image { state, spec } => state.fourier(sigma, spec)?,
            Self::EndState {
                control,
                initial,
                spec,
            } => end_state_sigma(control, initial, sigma, spec)?,
            Self::Samples { grid, values } => {
                let (s, sign) = if sigma < 0.0 { (-sigma, -1.0) } else { (sigma, 1.0) };
                let re: Vec<f64> = values.iter().map(|v| v.re).collect();
                let im: Vec<f64> = values.iter().map(|v| v.im).collect();
                sign * Complex64::new(grid.interpolate(&re, s), grid.interpolate(&im, s))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn profiles_are_odd() {
        let profiles = [
            SpectralProfile::Phi { n: 1, horizon: 1.0 },
            SpectralProfile::PhiL { n: 2, l: 100, horizon: 1.0 },
            SpectralProfile::PsiHat { n: 3, horizon: 0.5 },
            SpectralProfile::Truncated { coeffs: vec![1.0, -0.5], horizon: 1.0 },
            SpectralProfile::image(OddState::Example2 { horizon: 1.0 }),
            SpectralProfile::end_state(StepControl::constant(1.0, 1.0)),
        ];
        for p in &profiles {
            for s in [0.2, 1.1, 2.7] {
                let (a, b) = (p.value(s).unwrap(), p.value(-s).unwrap());
                assert!((a + b).norm() <= 1e-15 * a.norm().max(1e-300), "{p:?}");
            }
        }
    }

    #[test]
    fn truncated_expansion_reproduces_hermite_images() {
        // ψ̂_n^T = i Σ_{p ≤ n} h_p^n φ_p, so coefficients h_p^n give back ψ̂_n^T.
        for n in 0..4 {
            let coeffs = (0..=n).map(|p| crate::synthesis::h_coeff(p, n, 1.0).unwrap()).collect();
            let t = SpectralProfile::Truncated { coeffs, horizon: 1.0 };
            let h = SpectralProfile::PsiHat { n, horizon: 1.0 };
            for s in [0.3, 0.9, 2.0] {
                let (a, b) = (t.value(s).unwrap(), h.value(s).unwrap());
                assert_relative_eq!(a.im, b.im, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn samples_interpolate() {
        let grid = Grid::linspace(0.0, 1.0, 3, crate::numerics::Domain::HalfLine).unwrap();
        let values = vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)];
        let p = SpectralProfile::Samples { grid, values };
        assert_eq!(p.value(0.25).unwrap(), Complex64::new(0.0, 0.5));
        assert_eq!(p.value(-0.25).unwrap(), Complex64::new(0.0, -0.5));
    }
}
