//! Closed-form end states of piecewise-constant boundary controls.
//!
//! Run with `cargo run --example forward_simulation`.

use heatreach::heat::{end_state_sigma, end_state_x, error_norm, norm, state_at};
use heatreach::numerics::erfc;
use heatreach::{OddState, QuadratureSpec, Result, SpectralProfile, StepControl};

fn main() -> Result<()> {
    let spec = QuadratureSpec::default();

    // u ≡ 1 on [0, 1] heats the rod to erfc(x / 2).
    let one = StepControl::constant(1.0, 1.0);
    println!("u = 1 on [0, 1]");
    println!("{:>6} {:>22} {:>22}", "x", "W(x, 1)", "erfc(x/2)");
    for k in 0..=12 {
        let x = 0.5 * k as f64;
        println!("{x:>6.2} {:>22.16} {:>22.16}", end_state_x(&one, &OddState::Zero, x, &spec)?, erfc(x / 2.0));
    }

    // Three pieces; the state near x = 0 follows the last level.
    let u = StepControl::new(1.0, vec![0.0, 0.3, 0.7, 1.0], vec![2.0, -3.0, 1.0])?;
    let trace = end_state_x(&u, &OddState::Zero, 1e-12, &spec)?;
    println!("\nthree-piece control: W(0+, T) = {trace:.12}, last level 1");
    println!("W(1, t) at t = 0.25, 0.5, 1:");
    for t in [0.25, 0.5, 1.0] {
        println!("  t = {t:<4}  {:.12}", state_at(&u, &OddState::Zero, t, 1.0, &spec)?);
    }

    // The same end state seen from the frequency side.
    let v = end_state_sigma(&u, &OddState::Zero, 1.5, &spec)?;
    println!("V(1.5, T) = {:.12} i", v.im);
    let tight = spec.with_abs_tol(1e-14);
    let x_side = norm(&OddState::Reached(u.clone()), &tight)?;
    let sigma_side = norm(&SpectralProfile::end_state(u.clone()), &tight)?;
    println!("‖W(·,T)‖ = {x_side:.12} (x side), {sigma_side:.12} (σ side)");

    // Starting from a nonzero state adds its free heat flow.
    let w0 = OddState::Example3 { horizon: 1.0 };
    let w = end_state_x(&StepControl::zero(1.0), &w0, 1.0, &spec)?;
    println!("\nfree flow of the Gaussian-sine state for t = 1, at x = 1: {w:.12}");
    let gap = error_norm(&OddState::Reached(one), &OddState::Example2 { horizon: 1.0 }, &tight)?;
    println!("‖W_u≡1 - W_example2‖ = {gap:.12}");
    Ok(())
}
