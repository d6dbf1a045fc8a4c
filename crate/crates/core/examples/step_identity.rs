//! The frequency image of the binomial step control `u_l^n` is
//! `-√(2/π) i φ_n^l`, and `φ_n^l → φ_n` as `l` grows.
//!
//! Run with `cargo run --example step_identity`.

use heatreach::numerics::Domain;
use heatreach::synthesis::{phi_l_distance, phi_l_distance_bound, step_control, verify_identity_phi};
use heatreach::{Grid, QuadratureSpec, Result};

fn main() -> Result<()> {
    let grid = Grid::linspace(-5.0, 5.0, 50, Domain::FullLine)?;
    for (n, l) in [(0, 10), (1, 100), (2, 1000)] {
        let u = step_control(n, l, 1.0)?;
        println!(
            "n = {n}, l = {l:>4}: levels {:?}, max identity deviation {:.2e}",
            u.levels(),
            verify_identity_phi(n, l, 1.0, &grid)?
        );
    }
    let spec = QuadratureSpec::default().with_abs_tol(1e-16);
    println!("\n‖φ_1 - φ_1^l‖ and its bound:");
    for l in [10u64, 100, 1000, 10_000] {
        println!("  l = {l:>5}: {:.3e} ≤ {:.3e}", phi_l_distance(1, l, 1.0, &spec)?, phi_l_distance_bound(1, l, 1.0));
    }
    Ok(())
}
