//! Adaptive quadrature on finite and semi-infinite intervals.
//!
//! Two panel rules are available: a 21-point Gauss–Kronrod pair and a
//! tanh-sinh (double exponential) rule. Either one is driven by the same
//! global adaptive bisection loop. Half-line integrals are first truncated
//! where the integrand has decayed below `abs_tol / 1000`; integrands that
//! never get there inside the scan window (algebraic tails) are mapped onto
//! `(0, 1)` with `x = a + t / (1 - t)` and integrated there instead.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Panel rule used by [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Rule {
    GaussKronrod,
    TanhSinh,
}

/// Tolerances and refinement budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rule: Rule,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_refinement_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rule: Rule::TanhSinh,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_refinement_depth: 20,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rule: Rule, abs_tol: f64, rel_tol: f64, max_refinement_depth: u32) -> Result<Self> {
        let spec = Self {
            rule,
            abs_tol,
            rel_tol,
            max_refinement_depth,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.abs_tol >= 0.0
            && self.rel_tol >= 0.0
            && self.abs_tol.is_finite()
            && self.rel_tol.is_finite()
            && (self.abs_tol > 0.0 || self.rel_tol > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "quadrature tolerances must be non-negative with one strictly positive \
                 (abs_tol={}, rel_tol={})",
                self.abs_tol, self.rel_tol
            )))
        }
    }

    pub fn with_rule(mut self, rule: Rule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    /// Accepted error for an integral whose current estimate is `value`.
    pub fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Result of a converged quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub err_estimate: f64,
}

/// Integrates `f` over `(a, b)`. Either bound may be infinite.
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    if a.is_nan() || b.is_nan() {
        return Err(Error::InvalidArgument("NaN integration bound".into()));
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            err_estimate: 0.0,
        });
    }
    if a > b {
        let q = integrate(f, b, a, spec)?;
        return Ok(Quadrature {
            value: -q.value,
            err_estimate: q.err_estimate,
        });
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => adaptive(&f, a, b, spec),
        (true, false) => half_line(&f, a, spec),
        (false, true) => half_line(&|y: f64| f(-y), -b, spec),
        (false, false) => {
            let right = half_line(&f, 0.0, spec)?;
            let left = half_line(&|y: f64| f(-y), 0.0, spec)?;
            Ok(Quadrature {
                value: right.value + left.value,
                err_estimate: right.err_estimate + left.err_estimate,
            })
        }
    }
}

/// Outcome of scanning a half-line integrand for a truncation point.
enum Cutoff {
    At(f64),
    None,
}

const SCAN_START: f64 = 0.01;
const SCAN_RATIO: f64 = 1.05;
const SCAN_SPAN: f64 = 1000.0;
const QUIET_RATIO: f64 = 1.5;

/// Walks the geometric grid `a + 0.01·1.05^k` up to `a + 1000` and cuts at
/// 1.5 times the offset of the last sample with `|f|` above `threshold`.
/// The whole window is scanned so that rounding noise near `a` cannot pass
/// for a decayed tail; a non-finite sample ends the scan early.
fn find_cutoff(f: &dyn Fn(f64) -> f64, a: f64, threshold: f64) -> Cutoff {
    let mut offset = SCAN_START;
    let mut last_big: Option<f64> = None;
    while offset <= SCAN_SPAN {
        let v = f(a + offset);
        if !v.is_finite() {
            // Overflow far out is harmless once the quiet stretch is long enough.
            return match last_big {
                Some(big) if offset >= QUIET_RATIO * big => Cutoff::At(a + QUIET_RATIO * big),
                _ => Cutoff::None,
            };
        }
        if v.abs() > threshold {
            last_big = Some(offset);
        }
        offset *= SCAN_RATIO;
    }
    match last_big {
        // Negligible over the whole window.
        None => Cutoff::At(a + SCAN_SPAN),
        Some(big) if QUIET_RATIO * big <= SCAN_SPAN => Cutoff::At(a + QUIET_RATIO * big),
        Some(_) => Cutoff::None,
    }
}

fn half_line(f: &dyn Fn(f64) -> f64, a: f64, spec: &QuadratureSpec) -> Result<Quadrature> {
    let threshold = spec.abs_tol / 1000.0;
    if threshold > 0.0 {
        if let Cutoff::At(x) = find_cutoff(f, a, threshold) {
            return adaptive(f, a, x, spec);
        }
    }
    // x = a + t/(1-t), dx = dt/(1-t)^2.
    let mapped = |t: f64| {
        let s = 1.0 - t;
        if s <= 0.0 {
            return 0.0;
        }
        f(a + t / s) / (s * s)
    };
    adaptive(&mapped, 0.0, 1.0, spec)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: u32,
}

const MAX_PANELS: usize = 4000;
/// Splits allowed without halving the total error estimate.
const STALL_WINDOW: usize = 256;

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Quadrature> {
    let panel = |a: f64, b: f64, depth: u32| -> Result<Panel> {
        let local_tol = spec.tolerance(0.0) * (b - a) / (b - a).max(1.0);
        let (value, err) = match spec.rule {
            Rule::GaussKronrod => gauss_kronrod_21(f, a, b),
            Rule::TanhSinh => tanh_sinh(f, a, b, local_tol.max(spec.rel_tol * 1e-3)),
        };
        if !value.is_finite() || !err.is_finite() {
            return Err(Error::NonConvergent {
                value,
                err_estimate: err,
            });
        }
        Ok(Panel {
            a,
            b,
            value,
            err,
            depth,
        })
    };

    let mut panels = vec![panel(a, b, 0)?];
    let mut checkpoint = f64::INFINITY;
    for split in 0usize.. {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        if err <= spec.tolerance(value) {
            return Ok(Quadrature {
                value,
                err_estimate: err,
            });
        }
        // Rounding noise keeps the estimate flat however fine the panels get.
        if split % STALL_WINDOW == 0 {
            if split > 0 && err > 0.5 * checkpoint {
                return Err(Error::NonConvergent {
                    value,
                    err_estimate: err,
                });
            }
            checkpoint = err;
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.depth < spec.max_refinement_depth)
            .max_by(|(_, x), (_, y)| x.err.total_cmp(&y.err))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            return Err(Error::NonConvergent {
                value,
                err_estimate: err,
            });
        };
        if panels.len() >= MAX_PANELS {
            return Err(Error::NonConvergent {
                value,
                err_estimate: err,
            });
        }
        let p = panels.swap_remove(i);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::NonConvergent {
                value,
                err_estimate: err,
            });
        }
        panels.push(panel(p.a, mid, p.depth + 1)?);
        panels.push(panel(mid, p.b, p.depth + 1)?);
    }
    unreachable!("the split counter is unbounded")
}

/// Kronrod abscissae on `[-1, 1]`; odd indices are the Gauss nodes.
pub(crate) const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

pub(crate) const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_846_543,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// 21-point Kronrod estimate and `|K21 - G10|` as the error estimate.
fn gauss_kronrod_21(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK21[10] * fc;
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK21[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK21[j] * pair;
        if j % 2 == 1 {
            gauss += WG10[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates a smooth function over `[a, b]` with the Kronrod rule alone.
/// Exact for polynomials of degree ≤ 31; used where the interval is short
/// compared with the integrand's scale.
pub(crate) fn kronrod_21(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = WGK21[10] * f(center);
    for j in 0..10 {
        let dx = half * XGK21[j];
        sum += WGK21[j] * (f(center - dx) + f(center + dx));
    }
    sum * half
}

const TS_TMAX: f64 = 3.6;
const TS_MAX_LEVEL: u32 = 7;

/// Tanh-sinh quadrature with step halving. Nodes are placed by their
/// distance to the nearest endpoint so that integrable endpoint
/// singularities are never sampled exactly at the endpoint.
fn tanh_sinh(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let term = |t: f64| -> f64 {
        if t == 0.0 {
            return FRAC_PI_2 * f(center);
        }
        let u = FRAC_PI_2 * t.abs().sinh();
        let q = (-2.0 * u).exp();
        // 1 - tanh(u) and the weight cosh(t)·(π/2)/cosh²(u).
        let delta = 2.0 * q / (1.0 + q);
        let weight = FRAC_PI_2 * t.cosh() * 4.0 * q / ((1.0 + q) * (1.0 + q));
        let offset = half * delta;
        let x = if t < 0.0 { a + offset } else { b - offset };
        if x <= a || x >= b || weight == 0.0 {
            return 0.0;
        }
        weight * f(x)
    };

    let mut h = 1.0;
    let jmax = (TS_TMAX / h) as i64;
    let mut sum: f64 = (-jmax..=jmax).map(|j| term(j as f64 * h)).sum();
    let mut estimate = sum * h * half;
    let mut err = f64::INFINITY;
    for level in 1..=TS_MAX_LEVEL {
        h *= 0.5;
        let jmax = (TS_TMAX / h) as i64;
        let mut fresh = 0.0;
        let mut j = 1;
        while j <= jmax {
            let t = j as f64 * h;
            fresh += term(t) + term(-t);
            j += 2;
        }
        sum += fresh;
        let next = sum * h * half;
        err = (next - estimate).abs();
        estimate = next;
        if level >= 3 && err <= tol {
            break;
        }
    }
    (estimate, err)
}
