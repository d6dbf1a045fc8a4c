//! Closed form of `μ_m(ξ)` against its defining frequency integral.
//!
//! Run with `cargo run --example mu_cross_check`.

use heatreach::moments::{mu_closed_form, mu_quadrature};
use heatreach::{QuadratureSpec, Result};

fn main() -> Result<()> {
    let spec = QuadratureSpec::default();
    for t_star in [1.0, 2.5] {
        println!("T* = {t_star}");
        for m in 0..=5 {
            let xi = 0.4 * t_star;
            let a = mu_closed_form(m, xi, t_star)?;
            let b = mu_quadrature(m, xi, t_star, &spec)?;
            println!("  m = {m}: {a:>+16.9e} {b:>+16.9e}  rel. diff {:.1e}", ((a - b) / a).abs());
        }
    }
    Ok(())
}
