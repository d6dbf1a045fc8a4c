//! The error-bound table for the Gaussian-sine target with measured errors.
//!
//! Run with `cargo run --release --example bounds_table`.

use heatreach::heat::error_norm;
use heatreach::hermite::gaussian_sine_expansion;
use heatreach::synthesis::{epsilon_bounds, synthesize};
use heatreach::{OddState, QuadratureSpec, Result, SpectralProfile};

fn main() -> Result<()> {
    let t = 1.0;
    let spec = QuadratureSpec::default().with_abs_tol(1e-14);
    let image = SpectralProfile::image(OddState::Example3 { horizon: t });
    println!("{:>3} {:>5} {:>12} {:>12} {:>12} {:>12}", "N", "l", "ε1", "ε2", "ε", "measured");
    for (n, l) in [(1usize, 10u64), (1, 100), (2, 100), (2, 1000)] {
        let (e1, e2) = epsilon_bounds(n, l, t)?;
        let (_, u) = synthesize(&gaussian_sine_expansion(n, t)?, &vec![l; n + 1])?;
        let measured = error_norm(&SpectralProfile::end_state(u), &image, &spec)?;
        println!("{n:>3} {l:>5} {e1:>12.8} {e2:>12.8} {:>12.8} {measured:>12.8}", e1 + e2);
    }
    Ok(())
}
