//! Expanding a target in the scaled odd Hermite basis `ψ_n^T`.
//!
//! Run with `cargo run --example hermite_expansion`.

use std::f64::consts::PI;

use heatreach::heat::error_norm;
use heatreach::hermite::{basis_gram, basis_norm_sq, expand_target, gaussian_sine_expansion, psi_hat_t, psi_t};
use heatreach::{OddState, QuadratureSpec, Result};

fn main() -> Result<()> {
    let spec = QuadratureSpec::default();
    let t = 1.0;

    println!("ψ_1^T(1) = {:.10}, ψ̂_1^T(1) = {:.10} i", psi_t(1, 1.0, t)?, psi_hat_t(1, 1.0, t)?.im);
    println!("Gram diagonal vs closed form:");
    for n in 0..4 {
        println!("  n = {n}: {:.6e}  {:.6e}", basis_gram(n, n, t, &spec)?, basis_norm_sq(n, t));
    }
    println!("  <ψ_1, ψ_2> = {:.2e}", basis_gram(1, 2, t, &spec)?);

    let target = OddState::Example3 { horizon: t };
    let numeric = expand_target(&target, 8, t, &spec)?;
    let exact = gaussian_sine_expansion(8, t)?;
    println!("\nGaussian-sine coefficients (quadrature, exact):");
    for (n, (a, b)) in numeric.coeffs().iter().zip(exact.coeffs()).enumerate() {
        println!("  ω_{n} = {a:>+.12e}  {b:>+.12e}");
    }

    let energy = (4.0 / PI) * 0.5f64.exp() * (2.0 * PI * t).sqrt() * (1.0 - (-1.0f64).exp());
    println!("\n‖W‖² = {energy:.12}, Σ|ω_n|²‖ψ_n‖² = {:.12}", exact.tail_energy(0));
    let tight = spec.with_abs_tol(1e-16);
    for n in [0, 1, 2, 4, 8] {
        let cut = gaussian_sine_expansion(n, t)?;
        let err = error_norm(&target, &OddState::Expansion(cut), &tight)?;
        println!("  N = {n}: ‖W - W_N‖ = {err:.3e}");
    }
    Ok(())
}
