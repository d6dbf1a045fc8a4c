//! The weighted-integral test that every reachable state must pass.
//!
//! Run with `cargo run --example necessary_condition`.

use heatreach::moments::{necessary_condition, necessary_rhs};
use heatreach::{OddState, QuadratureSpec, Result};

fn main() -> Result<()> {
    let spec = QuadratureSpec::default();
    let (t, l, t_star) = (1.0, 1.0, 4.0);
    println!("rhs(T = 1, L = 1, T* = 4) = {:.12}  ((2/√π) ln 3 = {:.12})", necessary_rhs(t, l, t_star), 2.0 / std::f64::consts::PI.sqrt() * 3f64.ln());

    let cases = [
        ("v(ξ) = ξ", OddState::Example1 { horizon: t }),
        ("v(ξ) = 1 - ξ", OddState::Example2 { horizon: t }),
        ("10 × (v(ξ) = ξ)", OddState::Example1 { horizon: t }.scaled(10.0)),
        ("Gaussian sine", OddState::Example3 { horizon: t }),
    ];
    for (name, target) in cases {
        let nc = necessary_condition(&target, t, l, t_star, &spec)?;
        println!("{name:<16} lhs = {:>10.6}  rhs = {:.6}  {}", nc.lhs, nc.rhs, if nc.satisfied { "passes" } else { "fails" });
    }
    Ok(())
}
