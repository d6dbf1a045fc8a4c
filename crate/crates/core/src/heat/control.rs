use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Breakpoints closer than this (relative to the horizon) are fused when
/// controls are combined.
const FUSE_TOL: f64 = 1e-15;

/// Piecewise-constant function on `[0, T]`.
///
/// `levels[j]` is the value on `(breakpoints[j], breakpoints[j + 1])`.
/// Breakpoints run from `0` to `T` and are non-decreasing; zero-length
/// pieces are allowed and ignored by every evaluation.
///
/// The same type carries both a boundary control `u(t)` and its time
/// reversal `v(ξ) = u(T - ξ)`; see [`StepControl::reverse`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ControlFile", into = "ControlFile")]
pub struct StepControl {
    horizon: f64,
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
}

/// On-disk layout: `{"T": .., "breakpoints": [..], "levels": [..]}`.
#[derive(Serialize, Deserialize)]
struct ControlFile {
    #[serde(rename = "T")]
    horizon: f64,
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
}

impl TryFrom<ControlFile> for StepControl {
    type Error = Error;

    fn try_from(file: ControlFile) -> Result<Self> {
        StepControl::new(file.horizon, file.breakpoints, file.levels)
    }
}

impl From<StepControl> for ControlFile {
    fn from(c: StepControl) -> Self {
        ControlFile {
            horizon: c.horizon,
            breakpoints: c.breakpoints,
            levels: c.levels,
        }
    }
}

impl StepControl {
    /// Builds a control from breakpoints and levels.
    ///
    /// Breakpoints must be sorted and lie in `[0, T]`. If they do not start
    /// at `0` or end at `T`, the missing stretch is filled with level `0`.
    /// Empty `breakpoints` and `levels` give the zero control.
    pub fn new(horizon: f64, mut breakpoints: Vec<f64>, mut levels: Vec<f64>) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidControl(format!("horizon must be positive, got {horizon}")));
        }
        if breakpoints.is_empty() && levels.is_empty() {
            return Ok(Self::zero(horizon));
        }
        if breakpoints.len() != levels.len() + 1 {
            return Err(Error::InvalidControl(format!(
                "{} breakpoints need {} levels, got {}",
                breakpoints.len(),
                breakpoints.len().saturating_sub(1),
                levels.len()
            )));
        }
        if let Some(c) = levels.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidControl(format!("non-finite level {c}")));
        }
        if let Some(t) = breakpoints.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidControl(format!("non-finite breakpoint {t}")));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[1] < w[0]) {
            return Err(Error::InvalidControl(format!(
                "breakpoints not sorted: {} follows {}",
                w[1], w[0]
            )));
        }
        let slack = FUSE_TOL * horizon.max(1.0);
        let (first, last) = (breakpoints[0], breakpoints[breakpoints.len() - 1]);
        if first < -slack || last > horizon + slack {
            return Err(Error::InvalidControl(format!(
                "breakpoints [{first}, {last}] leave [0, {horizon}]"
            )));
        }
        if first > slack {
            breakpoints.insert(0, 0.0);
            levels.insert(0, 0.0);
        } else {
            breakpoints[0] = 0.0;
        }
        let n = breakpoints.len();
        if breakpoints[n - 1] < horizon - slack {
            breakpoints.push(horizon);
            levels.push(0.0);
        } else {
            breakpoints[n - 1] = horizon;
        }
        Ok(Self {
            horizon,
            breakpoints,
            levels,
        })
    }

    pub fn zero(horizon: f64) -> Self {
        Self::constant(horizon, 0.0)
    }

    pub fn constant(horizon: f64, level: f64) -> Self {
        Self {
            horizon,
            breakpoints: vec![0.0, horizon],
            levels: vec![level],
        }
    }

    /// Level `value` on `[a, b]`, zero elsewhere on `[0, T]`.
    pub fn indicator(horizon: f64, a: f64, b: f64, value: f64) -> Result<Self> {
        Self::new(horizon, vec![a, b], vec![value])
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Non-empty pieces `(a, b, level)`.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.levels)
            .filter(|(w, _)| w[1] > w[0])
            .map(|(w, &c)| (w[0], w[1], c))
    }

    pub fn is_zero(&self) -> bool {
        self.pieces().all(|(_, _, c)| c == 0.0)
    }

    /// `sup |u|` over non-empty pieces.
    pub fn linf_norm(&self) -> f64 {
        self.pieces().map(|(_, _, c)| c.abs()).fold(0.0, f64::max)
    }

    /// Right-continuous value at `t`; the last piece also owns `t = T`.
    /// Zero outside `[0, T]`.
    pub fn value_at(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.horizon {
            return 0.0;
        }
        let mut value = 0.0;
        for (a, b, c) in self.pieces() {
            if t >= a && (t < b || b == self.horizon) {
                value = c;
                if t < b {
                    break;
                }
            }
        }
        value
    }

    /// The time reversal `t ↦ u(T - t)`.
    pub fn reverse(&self) -> Self {
        let breakpoints = self.breakpoints.iter().rev().map(|t| self.horizon - t).collect();
        let levels = self.levels.iter().rev().copied().collect();
        Self {
            horizon: self.horizon,
            breakpoints,
            levels,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            horizon: self.horizon,
            breakpoints: self.breakpoints.clone(),
            levels: self.levels.iter().map(|c| c * factor).collect(),
        }
    }

    /// Pointwise sum on the merged breakpoint set, in canonical form.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.horizon - other.horizon).abs() > FUSE_TOL * self.horizon.max(1.0) {
            return Err(Error::InvalidControl(format!(
                "cannot add controls on horizons {} and {}",
                self.horizon, other.horizon
            )));
        }
        let mut points: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(&other.breakpoints)
            .copied()
            .collect();
        points.sort_by(f64::total_cmp);
        let fused = fuse(points, FUSE_TOL * self.horizon.max(1.0));
        let levels = fused
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                self.value_at(mid) + other.value_at(mid)
            })
            .collect();
        Ok(Self {
            horizon: self.horizon,
            breakpoints: fused,
            levels,
        }
        .canonical())
    }

    /// Sum of several controls on a common horizon.
    pub fn sum<'a>(horizon: f64, controls: impl IntoIterator<Item = &'a Self>) -> Result<Self> {
        controls
            .into_iter()
            .try_fold(Self::zero(horizon), |acc, c| acc.add(c))
    }

    /// Restriction to `[0, t]`, as a control with horizon `t`.
    pub fn restrict(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t <= self.horizon) {
            return Err(Error::InvalidControl(format!(
                "restriction time {t} outside (0, {}]",
                self.horizon
            )));
        }
        let mut breakpoints = vec![0.0];
        let mut levels = Vec::new();
        for (a, b, c) in self.pieces() {
            if a >= t {
                break;
            }
            breakpoints.push(b.min(t));
            levels.push(c);
        }
        if levels.is_empty() {
            return Ok(Self::zero(t));
        }
        *breakpoints.last_mut().unwrap() = t;
        Ok(Self {
            horizon: t,
            breakpoints,
            levels,
        })
    }

    /// Drops empty pieces and merges neighbours with equal levels.
    pub fn canonical(&self) -> Self {
        let mut breakpoints = vec![0.0];
        let mut levels: Vec<f64> = Vec::new();
        for (_, b, c) in self.pieces() {
            if levels.last() == Some(&c) {
                *breakpoints.last_mut().unwrap() = b;
            } else {
                breakpoints.push(b);
                levels.push(c);
            }
        }
        if levels.is_empty() {
            return Self::zero(self.horizon);
        }
        Self {
            horizon: self.horizon,
            breakpoints,
            levels,
        }
    }
}

fn fuse(sorted: Vec<f64>, tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(sorted.len());
    for t in sorted {
        match out.last() {
            Some(&last) if t - last <= tol => {}
            _ => out.push(t),
        }
    }
    out
}
