use num_complex::Complex64;
use rayon::prelude::*;

use super::output::{Cell, Sink, Table};
use super::{RunConfig, TargetKind};
use crate::error::{Error, Result};
use crate::heat::{
    end_state_x, error_norm, error_norm_estimate, norm, norm_estimate, OddProfile, OddState, SpectralProfile, StepControl,
};
use crate::hermite::{expand_target, gaussian_sine_expansion, HermiteExpansion};
use crate::moments::{
    moments_of_target, necessary_condition, solve_bang_bang, BangBangSolution, MomentVector,
};
use crate::numerics::{Grid, QuadratureSpec};
use crate::synthesis::{epsilon_bounds, synthesize, SynthesisPlan};

/// Relative tolerance of the x-side versus σ-side norm comparison.
pub const SELF_CHECK_TOL: f64 = 1e-6;

/// Table rows of the Gaussian-sine bounds at `T = 1`.
pub const TABLE_ROWS: [(usize, u64); 4] = [(1, 10), (1, 100), (2, 100), (2, 1000)];

/// How a command ended when it did not fail outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Done,
    /// A solver missed its tolerance; the best iterate was written.
    Partial,
}

fn control_table(name: &'static str, u: &StepControl) -> Table {
    let mut t = Table::new(name, &["start", "end", "level"]);
    for (w, &c) in u.breakpoints().windows(2).zip(u.levels()) {
        t.push(vec![w[0].into(), w[1].into(), c.into()]);
    }
    t
}

fn on_grid<F>(grid: &Grid, f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    grid.points().par_iter().map(|&x| f(x)).collect()
}

fn curves_table(grid: &Grid, target: &OddState, reached: &OddState) -> Table {
    let rows: Vec<Vec<Cell>> = grid
        .points()
        .par_iter()
        .map(|&x| {
            let (wt, wn) = (target.eval(x), reached.eval(x));
            vec![x.into(), wt.into(), wn.into(), (wt - wn).into()]
        })
        .collect();
    let mut t = Table::new("curves", &["x", "W_T", "W_N", "diff"]);
    rows.into_iter().for_each(|r| t.push(r));
    t
}

/// One `L²` norm computed on both sides of the Fourier transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormPair {
    pub x_side: f64,
    /// Quadrature error estimate of `x_side`; controls with large
    /// alternating levels leave a rounding floor here.
    pub x_err: f64,
    pub sigma_side: f64,
}

impl NormPair {
    pub fn rel_diff(&self) -> f64 {
        let scale = self.x_side.abs().max(self.sigma_side.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.x_side - self.sigma_side).abs() / scale
        }
    }

    pub fn passes(&self) -> bool {
        self.rel_diff() <= SELF_CHECK_TOL
    }

    fn describe(&self, label: &str) -> String {
        format!(
            "{label}_x={:.10e} (+-{:.1e}) {label}_sigma={:.10e} rel_diff={:.3e} self_check={}",
            self.x_side,
            self.x_err,
            self.sigma_side,
            self.rel_diff(),
            if self.passes() { "PASS" } else { "FAIL" }
        )
    }
}

/// `‖W^T - W(·,T)‖` for the control `u` from rest. The σ side uses
/// `spectral`, the image of the end state, which callers may supply in a
/// closed form that avoids the cancellation in `u`'s levels.
pub fn reach_error(
    u: &StepControl,
    spectral: &SpectralProfile,
    target: &OddState,
    spec: &QuadratureSpec,
) -> Result<NormPair> {
    let reached = OddState::Reached(u.clone());
    let (x, sigma_side) = rayon::join(
        || error_norm_estimate(&reached, target, spec),
        || error_norm(spectral, &SpectralProfile::image(target.clone()), spec),
    );
    let x = x?;
    Ok(NormPair {
        x_side: x.value,
        x_err: x.err_estimate,
        sigma_side: sigma_side?,
    })
}

/// `V(·,T)` of a synthesized control, `i Σ_p g_p φ_p^{l_p}`.
fn synthesized_image(plan: &SynthesisPlan) -> SpectralProfile {
    SpectralProfile::Synthesized {
        coeffs: plan.coeffs.clone(),
        l_per_p: plan.l_per_p.clone(),
        horizon: plan.horizon,
    }
}

fn solve_or_best(target: &MomentVector, pairs: usize) -> Result<(BangBangSolution, Status)> {
    match solve_bang_bang(target, pairs, None) {
        Ok(s) => Ok((s, Status::Done)),
        Err(Error::NoConvergence { best, .. }) => Ok((best, Status::Partial)),
        Err(e) => Err(e),
    }
}

/// `P` from `--P` or an odd `--N = 2P - 1`.
fn pairs(config: &RunConfig) -> Result<usize> {
    let from_n = match config.truncation {
        Some(n) if n % 2 == 0 => {
            return Err(Error::InvalidArgument(format!(
                "N = 2P - 1 requires odd N, got N = {n}"
            )))
        }
        Some(n) => Some((n + 1) / 2),
        None => None,
    };
    match (config.pairs, from_n) {
        (Some(0), _) => Err(Error::InvalidArgument("P must be at least 1".into())),
        (Some(p), Some(q)) if p != q => Err(Error::InvalidArgument(format!(
            "--P {p} disagrees with --N {} (N = 2P - 1)",
            2 * q - 1
        ))),
        (Some(p), _) | (None, Some(p)) => Ok(p),
        (None, None) => Err(Error::InvalidArgument("need --P or an odd --N".into())),
    }
}

fn step_resolutions(l: &[u64], truncation: usize) -> Result<Vec<u64>> {
    match l.len() {
        0 => Err(Error::InvalidArgument("this command needs --l".into())),
        1 => Ok(vec![l[0]; truncation + 1]),
        k if k == truncation + 1 => Ok(l.to_vec()),
        k => Err(Error::InvalidArgument(format!(
            "--l takes one value or N + 1 = {} values, got {k}",
            truncation + 1
        ))),
    }
}

fn target_expansion(config: &RunConfig, spec: &QuadratureSpec) -> Result<HermiteExpansion> {
    if let (Some(TargetKind::CustomExpansionFile), Some(e)) = (config.target, &config.expansion) {
        let full = e.coeffs();
        let n = config.truncation.unwrap_or(full.len() - 1);
        if n >= full.len() {
            return Err(Error::InvalidArgument(format!(
                "--N {n} exceeds the {} coefficients in the expansion file",
                full.len()
            )));
        }
        return HermiteExpansion::new(e.horizon(), full[..=n].to_vec());
    }
    let n = config.truncation()?;
    match config.target {
        Some(TargetKind::Example3) => gaussian_sine_expansion(n, config.horizon),
        _ => expand_target(&config.target_state()?, n, config.horizon, spec),
    }
}

fn moment_tables(sink: &mut Sink, target: &MomentVector, solution: &BangBangSolution) -> Result<()> {
    let mut sw = Table::new("switching", &["k", "nu"]);
    for (k, &nu) in solution.switching.iter().enumerate() {
        sw.push(vec![(k + 1).into(), nu.into()]);
    }
    sink.emit(&sw)?;
    let mut res = Table::new("residuals", &["n", "omega", "residual"]);
    for (n, (&om, &r)) in target.omegas.iter().zip(&solution.residuals).enumerate() {
        res.push(vec![n.into(), om.into(), r.into()]);
    }
    sink.emit(&res)?;
    sink.emit(&control_table("moment_control", &solution.control()))?;
    sink.emit(&control_table("control", &solution.boundary_control()))
}

/// Moments `ω_0..ω_N` of the target, with the trivial bound and optionally
/// the necessary reachability test.
pub fn cmd_moments(config: &RunConfig, sink: &mut Sink) -> Result<Status> {
    let n = config.truncation()?;
    let target = config.target_state()?;
    let spec = config.spec(1e-12);
    let (t, l) = (config.horizon, config.bound);
    let mv = moments_of_target(&target, n, t, &spec)?.with_bound(l)?;
    let mut table = Table::new("moments", &["n", "omega", "trivial_bound"]);
    for (k, &om) in mv.omegas.iter().enumerate() {
        let bound = l * t.powi(k as i32 + 1) / (k + 1) as f64;
        table.push(vec![k.into(), om.into(), bound.into()]);
    }
    sink.emit(&table)?;
    sink.note(format!("T={t} L={l} N={n}"));
    sink.note(format!(
        "trivial_bound={}",
        if mv.check_trivial_bound(1e-12) { "satisfied" } else { "violated" }
    ));
    if let Some(ts) = config.t_star {
        let nc = necessary_condition(&target, t, l, ts, &spec)?;
        sink.note(format!(
            "necessary_condition T*={ts} lhs={:.10e} rhs={:.10e} {}",
            nc.lhs,
            nc.rhs,
            if nc.satisfied { "satisfied" } else { "violated" }
        ));
    }
    Ok(Status::Done)
}

/// Bang-bang control with `P` ON intervals matching `ω_0..ω_{2P-1}`.
pub fn cmd_solve_moments(config: &RunConfig, sink: &mut Sink) -> Result<Status> {
    let p = pairs(config)?;
    let target = config.target_state()?;
    let mv = moments_of_target(&target, 2 * p - 1, config.horizon, &config.spec(1e-12))?
        .with_bound(config.bound)?;
    let (solution, status) = solve_or_best(&mv, p)?;
    moment_tables(sink, &mv, &solution)?;
    sink.note(format!(
        "T={} L={} P={p} intervals={} max_residual={:.3e} status={}",
        config.horizon,
        config.bound,
        solution.intervals(),
        solution.max_residual(),
        if status == Status::Done { "converged" } else { "not converged" }
    ));
    Ok(status)
}

/// Explicit control `u_N` from the Hermite expansion of the target.
pub fn cmd_synthesize(config: &RunConfig, sink: &mut Sink) -> Result<Status> {
    let spec = config.spec(1e-12);
    let expansion = target_expansion(config, &spec)?;
    let n = expansion.truncation();
    let ls = step_resolutions(&config.l, n)?;
    let (plan, u) = synthesize(&expansion, &ls)?;
    let mut table = Table::new("plan", &["p", "l_p", "g_p", "omega_p"]);
    for p in 0..=n {
        table.push(vec![
            p.into(),
            plan.l_per_p[p].into(),
            plan.coeffs[p].into(),
            expansion.coeffs()[p].into(),
        ]);
    }
    sink.emit(&table)?;
    sink.emit(&control_table("control", &u))?;
    let target = config.target_state()?;
    let err = reach_error(&u, &synthesized_image(&plan), &target, &config.spec(1e-14))?;
    sink.note(format!(
        "T={} N={n} pieces={} linf={:.10e}",
        expansion.horizon(),
        u.levels().len(),
        u.linf_norm()
    ));
    sink.note(err.describe("error_norm"));
    Ok(Status::Done)
}

/// `W(x, T)` for an arbitrary initial state, on the x-side.
struct EndStateX<'a> {
    control: &'a StepControl,
    initial: &'a OddState,
    spec: QuadratureSpec,
}

impl OddProfile for EndStateX<'_> {
    fn value(&self, x: f64) -> Result<Complex64> {
        Ok(end_state_x(self.control, self.initial, x, &self.spec)?.into())
    }
}

/// End state of the control file on the grid, with the boundary trace and
/// Plancherel cross-checks.
pub fn cmd_simulate(config: &RunConfig, sink: &mut Sink) -> Result<Status> {
    let u = config.control.as_ref().expect("checked when the config was built");
    let t = u.horizon();
    let w0 = config.initial(t);
    let spec = config.spec(1e-12);
    let values = on_grid(&config.grid, |x| end_state_x(u, &w0, x, &spec))?;
    let mut table = Table::new("end_state", &["x", "W"]);
    for (&x, &w) in config.grid.points().iter().zip(&values) {
        table.push(vec![x.into(), w.into()]);
    }
    sink.emit(&table)?;

    let x0 = 1e-14 * t.sqrt();
    let trace = end_state_x(u, &w0, x0, &spec)?;
    let u_end = u.levels().last().copied().unwrap_or(0.0);
    sink.note(format!(
        "boundary_trace W(0+,T)={trace:.10e} u(T-)={u_end:.10e} diff={:.3e}",
        (trace - u_end).abs()
    ));

    let norm_spec = config.spec(1e-14);
    let x_side = EndStateX {
        control: u,
        initial: &w0,
        spec: norm_spec,
    };
    let sigma_side = SpectralProfile::EndState {
        control: u.clone(),
        initial: w0.clone(),
        spec: norm_spec,
    };
    let x = norm_estimate(&x_side, &norm_spec)?;
    let pair = NormPair {
        x_side: x.value,
        x_err: x.err_estimate,
        sigma_side: norm(&sigma_side, &norm_spec)?,
    };
    sink.note(pair.describe("state_norm"));
    Ok(Status::Done)
}

/// Rounds up to four decimals, the way the printed table does.
fn ceil4(v: f64) -> f64 {
    (v * 1e4 - 1e-9).ceil() / 1e4
}

/// One row of the bounds table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsRow {
    pub truncation: usize,
    pub l: u64,
    pub eps1: f64,
    pub eps2: f64,
    pub measured: NormPair,
    pub extrapolated: bool,
}

impl BoundsRow {
    pub fn eps(&self) -> f64 {
        self.eps1 + self.eps2
    }

    pub fn within_bound(&self) -> bool {
        self.measured.sigma_side <= self.eps()
    }
}

/// Bounds and measured error of the synthesized control for the
/// Gaussian-sine target.
pub fn bounds_row(truncation: usize, l: u64, horizon: f64, spec: &QuadratureSpec) -> Result<BoundsRow> {
    let (eps1, eps2) = epsilon_bounds(truncation, l, horizon)?;
    let expansion = gaussian_sine_expansion(truncation, horizon)?;
    let (plan, u) = synthesize(&expansion, &vec![l; truncation + 1])?;
    let measured = reach_error(&u, &synthesized_image(&plan), &OddState::Example3 { horizon }, spec)?;
    Ok(BoundsRow {
        truncation,
        l,
        eps1,
        eps2,
        measured,
        extrapolated: false,
    })
}

/// The four table rows plus any `--extra-row`s, with measured errors.
pub fn cmd_bounds_table(config: &RunConfig, sink: &mut Sink) -> Result<Status> {
    let t = config.horizon;
    let spec = config.spec(1e-14);
    let requested: Vec<(usize, u64, bool)> = TABLE_ROWS
        .iter()
        .map(|&(n, l)| (n, l, t != 1.0))
        .chain(config.extra_rows.iter().map(|r| (r.truncation, r.l, true)))
        .collect();
    let rows = requested
        .par_iter()
        .map(|&(n, l, extra)| {
            bounds_row(n, l, t, &spec).map(|r| BoundsRow {
                extrapolated: extra,
                ..r
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(
        "bounds",
        &[
            "N",
            "l",
            "eps1",
            "eps2",
            "eps",
            "measured_sigma",
            "measured_x",
            "measured_x_err",
            "rel_diff",
            "within_bound",
            "source",
        ],
    );
    sink.note(format!("T={t}"));
    sink.note("   N        l     eps1     eps2      eps   measured  self-check  source".to_string());
    for r in &rows {
        let source = if r.extrapolated { "extrapolated" } else { "table" };
        table.push(vec![
            r.truncation.into(),
            r.l.into(),
            r.eps1.into(),
            r.eps2.into(),
            r.eps().into(),
            r.measured.sigma_side.into(),
            r.measured.x_side.into(),
            r.measured.x_err.into(),
            r.measured.rel_diff().into(),
            if r.within_bound() { "yes" } else { "no" }.into(),
            source.into(),
        ]);
        let (e1, e2) = (ceil4(r.eps1), ceil4(r.eps2));
        sink.note(format!(
            "{:>4} {:>8} {:>8.4} {:>8.4} {:>8.4} {:>10.3e}  {:>10}  {source}",
            r.truncation,
            r.l,
            e1,
            e2,
            e1 + e2,
            r.measured.sigma_side,
            if r.measured.passes() { "PASS" } else { "FAIL" },
        ));
    }
    sink.emit(&table)?;
    Ok(Status::Done)
}

/// Controls, end-state curves and error norms for one of the worked examples.
pub fn cmd_examples(config: &RunConfig, sink: &mut Sink) -> Result<Status> {
    let target = config.target_state()?;
    let t = config.horizon;
    let norm_spec = config.spec(1e-14);
    match config.target {
        Some(TargetKind::Example1 | TargetKind::Example2) => {
            let p = pairs(config)?;
            let mv = moments_of_target(&target, 2 * p - 1, t, &config.spec(1e-12))?
                .with_bound(config.bound)?;
            let (solution, status) = solve_or_best(&mv, p)?;
            moment_tables(sink, &mv, &solution)?;
            let u = solution.boundary_control();
            sink.emit(&curves_table(&config.grid, &target, &OddState::Reached(u.clone())))?;
            sink.note(format!(
                "T={t} L={} N={} P={p} max_residual={:.3e}",
                config.bound,
                2 * p - 1,
                solution.max_residual()
            ));
            if status == Status::Partial {
                sink.note("bang-bang solver did not converge; wrote its best iterate");
            }
            let image = SpectralProfile::end_state(u.clone());
            sink.note(reach_error(&u, &image, &target, &norm_spec)?.describe("error_norm"));
            Ok(status)
        }
        Some(TargetKind::Example3) => {
            let n = config.truncation()?;
            let ls = step_resolutions(&config.l, n)?;
            let expansion = gaussian_sine_expansion(n, t)?;
            let (plan, u) = synthesize(&expansion, &ls)?;
            sink.emit(&control_table("control", &u))?;
            sink.emit(&curves_table(&config.grid, &target, &OddState::Reached(u.clone())))?;
            let err = reach_error(&u, &synthesized_image(&plan), &target, &norm_spec)?;
            let l_min = *ls.iter().min().expect("at least one resolution");
            let (e1, e2) = epsilon_bounds(n, l_min, t)?;
            sink.note(format!("T={t} N={n} l={ls:?}"));
            sink.note(err.describe("error_norm"));
            sink.note(format!(
                "bound eps1={e1:.10e} eps2={e2:.10e} eps={:.10e} within_bound={}",
                e1 + e2,
                err.sigma_side <= e1 + e2
            ));
            Ok(Status::Done)
        }
        _ => Err(Error::InvalidArgument(
            "examples covers example1, example2 and example3; use synthesize for expansion files".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_matches_printed_rounding() {
        assert_eq!(ceil4(0.04329), 0.0433);
        assert_eq!(ceil4(0.0433), 0.0433);
        assert_eq!(ceil4(2.166189), 2.1662);
    }

    #[test]
    fn step_resolution_broadcast() {
        assert_eq!(step_resolutions(&[7], 2).unwrap(), vec![7, 7, 7]);
        assert_eq!(step_resolutions(&[1, 2], 1).unwrap(), vec![1, 2]);
        assert!(step_resolutions(&[1, 2], 2).is_err());
        assert!(step_resolutions(&[], 2).is_err());
    }

    #[test]
    fn norm_pair_self_check() {
        let pair = |x_side, sigma_side| NormPair { x_side, x_err: 0.0, sigma_side };
        assert!(pair(1.0, 1.0 + 1e-7).passes());
        assert!(!pair(1.0, 1.1).passes());
        assert_eq!(pair(0.0, 0.0).rel_diff(), 0.0);
    }
}
