//! Boundary control of the heat equation on a half-axis.
//!
//! The controlled system is `w_t = w_xx` on `x > 0` with the Dirichlet
//! boundary value `w(0, t) = u(t)` acting as the control. States are handled
//! through their odd extension to the whole line, so every state is an odd
//! function and its Fourier image is `-i` times a real odd function.
//!
//! The crate is organised by task:
//!
//! * [`numerics`]: error function, adaptive quadrature, half-line `L²` norms.
//! * [`hermite`]: Hermite polynomials, the scaled odd basis `ψ_n^T`, its
//!   Fourier images, and expansions of targets in that basis.
//! * [`heat`]: piecewise-constant controls, odd states and their spectral
//!   profiles, and closed-form forward evaluation of the controlled system.
//! * [`moments`]: reachability through power moments, the necessary
//!   reachability condition and a bang-bang moment solver.
//! * [`synthesis`]: explicit approximate-reachability controls built from
//!   binomial step controls, and the error bounds that go with them.
//! * [`cli`]: the `heatreach` command-line driver.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod cli;
pub mod error;
pub mod heat;
pub mod hermite;
pub mod moments;
pub mod numerics;
pub mod synthesis;

pub use error::{Error, Result};
pub use heat::{OddState, SpectralProfile, StepControl};
pub use hermite::HermiteExpansion;
pub use moments::{BangBangSolution, MomentVector};
pub use numerics::{Grid, QuadratureSpec, Rule};
pub use synthesis::SynthesisPlan;
