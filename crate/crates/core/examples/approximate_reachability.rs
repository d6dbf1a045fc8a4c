//! Explicit step controls that steer the rod close to the Gaussian-sine
//! state, which no bounded control reaches exactly.
//!
//! Run with `cargo run --release --example approximate_reachability`.

use heatreach::heat::{error_norm, norm};
use heatreach::hermite::gaussian_sine_expansion;
use heatreach::synthesis::{epsilon_bounds, l_is_admissible, l_threshold, synthesize};
use heatreach::{OddState, QuadratureSpec, Result, SpectralProfile};

fn main() -> Result<()> {
    let t = 1.0;
    let spec = QuadratureSpec::default().with_abs_tol(1e-14);
    let target = OddState::Example3 { horizon: t };
    let image = SpectralProfile::image(target.clone());

    for (n, l) in [(1, 10), (1, 100), (2, 100), (2, 1000), (3, 1000)] {
        let expansion = gaussian_sine_expansion(n, t)?;
        let (plan, u) = synthesize(&expansion, &vec![l; n + 1])?;
        let v = SpectralProfile::Synthesized {
            coeffs: plan.coeffs.clone(),
            l_per_p: plan.l_per_p.clone(),
            horizon: t,
        };
        let measured = error_norm(&v, &image, &spec)?;
        let (e1, e2) = epsilon_bounds(n, l, t)?;
        println!(
            "N = {n}, l = {l:>4}: {} pieces, ‖u‖∞ = {:.3e}, ‖V^T - V_N^l‖ = {measured:.6e} ≤ ε = {:.6e}",
            u.levels().len(),
            u.linf_norm(),
            e1 + e2
        );
    }

    // The sufficient admissibility test for each p, given a target accuracy.
    let target_norm = norm(&image, &spec)?;
    let (eps, n) = (0.5, 1);
    println!("\n‖V^T‖ = {target_norm:.6}; threshold for ε = {eps}, N = {n}: {:.3e}", l_threshold(eps, target_norm, n, t));
    for l in [10u64, 1_000, 100_000] {
        let ok: Vec<bool> = (0..=n)
            .map(|p| l_is_admissible(p, l, eps, target_norm, n, t, &spec))
            .collect::<Result<_>>()?;
        println!("  l = {l:>6}: admissible for p = 0..={n}: {ok:?}");
    }
    Ok(())
}
