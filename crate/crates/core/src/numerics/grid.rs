use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where the abscissae of a [`Grid`] are allowed to live.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    /// `[0, ∞)`
    HalfLine,
    FullLine,
    /// Closed interval `[a, b]`.
    Interval(f64, f64),
}

impl Domain {
    fn contains(&self, x: f64) -> bool {
        match *self {
            Domain::HalfLine => x >= 0.0 && x.is_finite(),
            Domain::FullLine => x.is_finite(),
            Domain::Interval(a, b) => x >= a && x <= b,
        }
    }
}

/// Strictly increasing abscissae inside a tagged domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    points: Vec<f64>,
    domain: Domain,
}

impl Grid {
    pub fn new(points: Vec<f64>, domain: Domain) -> Result<Self> {
        if let Domain::Interval(a, b) = domain {
            if !(a <= b) {
                return Err(Error::InvalidGrid(format!("empty interval ({a}, {b})")));
            }
        }
        if let Some(w) = points.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidGrid(format!(
                "points must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if let Some(p) = points.iter().find(|p| !domain.contains(**p)) {
            return Err(Error::InvalidGrid(format!("point {p} lies outside {domain:?}")));
        }
        Ok(Self { points, domain })
    }

    /// `count` equally spaced points from `start` to `end` inclusive.
    pub fn linspace(start: f64, end: f64, count: usize, domain: Domain) -> Result<Self> {
        let points = match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => {
                let step = (end - start) / (count - 1) as f64;
                (0..count)
                    .map(|i| if i + 1 == count { end } else { start + step * i as f64 })
                    .collect()
            }
        };
        Self::new(points, domain)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Piecewise-linear interpolation of `values` sampled on this grid; zero
    /// outside the sampled range.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let pts = &self.points;
        if pts.is_empty() || x < pts[0] || x > pts[pts.len() - 1] {
            return 0.0;
        }
        let i = pts.partition_point(|&p| p <= x);
        if i == 0 {
            return values[0];
        }
        if i == pts.len() {
            return values[pts.len() - 1];
        }
        let (x0, x1) = (pts[i - 1], pts[i]);
        let w = (x - x0) / (x1 - x0);
        values[i - 1] * (1.0 - w) + values[i] * w
    }
}
