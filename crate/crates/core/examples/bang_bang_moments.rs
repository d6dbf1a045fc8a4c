//! Exact reachability through power moments: bang-bang controls that
//! match the first `2P` moments of a target.
//!
//! Run with `cargo run --release --example bang_bang_moments`.

use heatreach::heat::error_norm;
use heatreach::moments::{moments_of_control, moments_of_target, solve_bang_bang};
use heatreach::{OddState, QuadratureSpec, Result, StepControl};

fn main() -> Result<()> {
    let spec = QuadratureSpec::default();
    let tight = spec.with_abs_tol(1e-14);

    // Indicators of [a, b] have known moments; the solver recovers them.
    for (a, b) in [(5.0 / 12.0, 11.0 / 12.0), (1.0 / 12.0, 7.0 / 12.0)] {
        let v = StepControl::indicator(1.0, a, b, 1.0)?;
        let sol = solve_bang_bang(&moments_of_control(&v, 1), 1, None)?;
        println!("indicator of [{a:.6}, {b:.6}] -> switching {:?}", sol.switching);
    }

    for (name, target) in [
        ("v(ξ) = ξ", OddState::Example1 { horizon: 1.0 }),
        ("v(ξ) = 1 - ξ", OddState::Example2 { horizon: 1.0 }),
    ] {
        println!("\n{name}");
        for p in 1..=4 {
            let mv = moments_of_target(&target, 2 * p - 1, 1.0, &spec)?;
            let sol = solve_bang_bang(&mv, p, None)?;
            let u = sol.boundary_control();
            let err = error_norm(&OddState::Reached(u), &target, &tight)?;
            let nus: Vec<String> = sol.switching.iter().map(|x| format!("{x:.6}")).collect();
            println!(
                "  P = {p}: ν = [{}]  residual {:.1e}  ‖W^T - W_N‖ = {err:.6e}",
                nus.join(", "),
                sol.max_residual()
            );
        }
    }
    Ok(())
}
