//! Finite Markov moment problem with bang-bang solutions.
//!
//! Given `ω_0..ω_{2P-1}`, find switching points `0 ≤ ν_1 ≤ … ≤ ν_{2P} ≤ T`
//! such that the control equal to `L` on `[ν_{2p-1}, ν_{2p}]` and `0`
//! elsewhere has exactly these power moments. The system is solved by damped
//! Newton iteration on the normalised problem (`T = 1`, `L = 1`), with
//! projection onto the ordered simplex, a deterministic list of starting
//! points, and a homotopy fallback.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{moments_of_control, MomentVector};
use crate::error::{Error, Result};
use crate::heat::StepControl;

/// Normalised residual accepted as converged.
const TOLERANCE: f64 = 1e-10;
/// Newton stops early once the normalised residual is this small.
const NEWTON_TARGET: f64 = 1e-14;
const MAX_NEWTON_STEPS: usize = 200;
/// Switching points closer than this (relative to `T`) are merged.
const COLLAPSE_TOL: f64 = 1e-12;

/// Switching points of a `{0, L}`-valued control `v(ξ)` on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BangBangSolution {
    /// `ν_1 ≤ … ≤ ν_{2P}`; `v = L` on `[ν_{2p-1}, ν_{2p}]`.
    pub switching: Vec<f64>,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "L")]
    pub level: f64,
    /// Achieved moments minus the targets, `n = 0..2P-1`.
    pub residuals: Vec<f64>,
}

impl BangBangSolution {
    /// Number of ON intervals after collapsing empty ones.
    pub fn intervals(&self) -> usize {
        self.switching.len() / 2
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// The control `v(ξ)` in the moment variable.
    pub fn control(&self) -> StepControl {
        let mut breakpoints = Vec::with_capacity(self.switching.len() + 2);
        breakpoints.push(0.0);
        breakpoints.extend(&self.switching);
        breakpoints.push(self.horizon);
        let levels = (0..breakpoints.len() - 1)
            .map(|j| if j % 2 == 1 { self.level } else { 0.0 })
            .collect();
        StepControl::new(self.horizon, breakpoints, levels)
            .expect("switching points are ordered inside [0, T]")
    }

    /// The boundary control `u(t) = v(T - t)`.
    pub fn boundary_control(&self) -> StepControl {
        self.control().reverse()
    }
}

/// Solves the bang-bang moment problem with `pairs` ON intervals.
///
/// `target` must hold exactly `2 · pairs` moments; its bound `L` is the ON
/// level. An optional `init` gives starting switching points in `[0, T]`.
pub fn solve_bang_bang(
    target: &MomentVector,
    pairs: usize,
    init: Option<&[f64]>,
) -> Result<BangBangSolution> {
    if pairs == 0 {
        return Err(Error::InvalidArgument("need at least one ON interval".into()));
    }
    let dim = 2 * pairs;
    if target.omegas.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "{pairs} intervals need {dim} moments, got {}",
            target.omegas.len()
        )));
    }
    if !target.check_trivial_bound(1e-12) {
        return Err(Error::InvalidArgument(
            "moments violate |ω_n| ≤ L T^{n+1} / (n+1); no control with this bound exists".into(),
        ));
    }
    let (t, level) = (target.horizon, target.bound);
    let w: Vec<f64> = target
        .omegas
        .iter()
        .enumerate()
        .map(|(n, om)| om / (level * t.powi(n as i32 + 1)))
        .collect();

    let mut starts = Vec::new();
    if let Some(init) = init {
        if init.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "initial guess needs {dim} switching points, got {}",
                init.len()
            )));
        }
        starts.push(project(&init.iter().map(|x| x / t).collect::<Vec<_>>())?);
    }
    starts.extend(default_starts(pairs, w[0]));

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut consider = |x: Vec<f64>, r: f64| {
        if best.as_ref().map_or(true, |(_, b)| r < *b) {
            best = Some((x, r));
        }
    };
    let mut all_infeasible = true;
    'outer: for phase in 0..2 {
        for x0 in &starts {
            let attempt = if phase == 0 {
                newton(x0.clone(), &w)
            } else {
                continuation(x0.clone(), &w)
            };
            match attempt {
                Ok((x, r)) => {
                    all_infeasible = false;
                    let done = r <= TOLERANCE;
                    consider(x, r);
                    if done {
                        break 'outer;
                    }
                }
                Err(Error::InfeasibleOrdering(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }

    let Some((x, r)) = best else {
        debug_assert!(all_infeasible);
        return Err(Error::InfeasibleOrdering(
            "every Newton run left the ordered simplex with non-finite iterates".into(),
        ));
    };
    let solution = finish(&x, target);
    if r <= TOLERANCE {
        Ok(solution)
    } else {
        Err(Error::NoConvergence {
            best: solution,
            residual: r,
        })
    }
}

/// Scales back to `[0, T]`, collapses empty and touching intervals and
/// records residuals in the original units.
fn finish(x: &[f64], target: &MomentVector) -> BangBangSolution {
    let t = target.horizon;
    let mut nodes: Vec<f64> = x.iter().map(|v| v * t).collect();
    let tol = COLLAPSE_TOL * t;
    let mut changed = true;
    while changed {
        changed = false;
        // Empty ON interval [ν_{2p-1}, ν_{2p}].
        if let Some(p) = (0..nodes.len() / 2).find(|&p| nodes[2 * p + 1] - nodes[2 * p] <= tol) {
            nodes.drain(2 * p..2 * p + 2);
            changed = true;
            continue;
        }
        // Empty OFF gap between consecutive ON intervals.
        if let Some(p) = (1..nodes.len() / 2).find(|&p| nodes[2 * p] - nodes[2 * p - 1] <= tol) {
            nodes.drain(2 * p - 1..2 * p + 1);
            changed = true;
        }
    }
    let mut solution = BangBangSolution {
        switching: nodes,
        horizon: t,
        level: target.bound,
        residuals: Vec::new(),
    };
    let achieved = moments_of_control(&solution.control(), target.truncation());
    solution.residuals = achieved
        .omegas
        .iter()
        .zip(&target.omegas)
        .map(|(a, b)| a - b)
        .collect();
    solution
}

/// Starting points: `P` intervals of total length `ω_0` centred at
/// Chebyshev nodes, then at uniform nodes, each with a few widths.
fn default_starts(pairs: usize, mass: f64) -> Vec<Vec<f64>> {
    let pf = pairs as f64;
    let chebyshev: Vec<f64> = (1..=pairs)
        .map(|k| 0.5 * (1.0 - ((2 * k - 1) as f64 * std::f64::consts::PI / (2.0 * pf)).cos()))
        .collect();
    let uniform: Vec<f64> = (0..pairs).map(|k| (k as f64 + 0.5) / pf).collect();
    let mut out = Vec::new();
    for centres in [&chebyshev, &uniform] {
        for factor in [1.0, 0.5, 1.5] {
            let half = (factor * mass / pf).clamp(1e-3, 0.95 / pf) / 2.0;
            let x: Vec<f64> = centres.iter().flat_map(|c| [c - half, c + half]).collect();
            if let Ok(p) = project(&x) {
                out.push(p);
            }
        }
    }
    out
}

/// Moment map residual `F(x) - w` on the normalised problem.
fn residual(x: &[f64], w: &[f64]) -> DVector<f64> {
    DVector::from_iterator(
        w.len(),
        w.iter().enumerate().map(|(n, wn)| {
            let e = n as i32 + 1;
            let s: f64 = x
                .chunks(2)
                .map(|p| p[1].powi(e) - p[0].powi(e))
                .sum();
            s / e as f64 - wn
        }),
    )
}

fn jacobian(x: &[f64]) -> DMatrix<f64> {
    let dim = x.len();
    DMatrix::from_fn(dim, dim, |n, i| {
        let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
        sign * x[i].powi(n as i32)
    })
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, r| m.max(r.abs()))
}

/// Damped Newton with projection. Returns the best iterate and its
/// normalised residual.
fn newton(mut x: Vec<f64>, w: &[f64]) -> Result<(Vec<f64>, f64)> {
    let mut f = residual(&x, w);
    let mut r = inf_norm(&f);
    for _ in 0..MAX_NEWTON_STEPS {
        if r <= NEWTON_TARGET {
            break;
        }
        let j = jacobian(&x);
        let step = match j.clone().lu().solve(&(-&f)) {
            Some(s) if s.iter().all(|v| v.is_finite()) => s,
            _ => match j.svd(true, true).solve(&(-&f), 1e-14) {
                Ok(s) => s,
                Err(_) => break,
            },
        };
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha > 1e-10 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + alpha * d).collect();
            let trial = project(&trial)?;
            let ft = residual(&trial, w);
            let rt = inf_norm(&ft);
            if rt < r {
                x = trial;
                f = ft;
                r = rt;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok((x, r))
}

/// Homotopy from the moments of `x0` to `w`, with adaptive steps.
fn continuation(mut x: Vec<f64>, w: &[f64]) -> Result<(Vec<f64>, f64)> {
    let start: Vec<f64> = residual(&x, &vec![0.0; w.len()]).iter().copied().collect();
    let path = |lambda: f64| -> Vec<f64> {
        start
            .iter()
            .zip(w)
            .map(|(s, t)| (1.0 - lambda) * s + lambda * t)
            .collect()
    };
    let (mut lambda, mut dl) = (0.0f64, 0.05f64);
    while lambda < 1.0 {
        let next = (lambda + dl).min(1.0);
        let (y, r) = newton(x.clone(), &path(next))?;
        if r <= 1e-12 {
            x = y;
            lambda = next;
            dl = (dl * 1.5).min(0.25);
        } else {
            dl *= 0.5;
            if dl < 1e-5 {
                break;
            }
        }
    }
    newton(x, w)
}

/// Euclidean projection onto `{0 ≤ x_1 ≤ … ≤ x_n ≤ 1}`: isotonic regression
/// by pool-adjacent-violators, then clipping.
fn project(x: &[f64]) -> Result<Vec<f64>> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InfeasibleOrdering(format!("non-finite switching points {x:?}")));
    }
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(x.len());
    for &v in x {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (b, nb) = blocks[blocks.len() - 1];
            let (a, na) = blocks[blocks.len() - 2];
            if a <= b {
                break;
            }
            blocks.pop();
            let last = blocks.last_mut().unwrap();
            *last = ((a * na as f64 + b * nb as f64) / (na + nb) as f64, na + nb);
        }
    }
    Ok(blocks
        .into_iter()
        .flat_map(|(v, n)| std::iter::repeat(v.clamp(0.0, 1.0)).take(n))
        .collect())
}
