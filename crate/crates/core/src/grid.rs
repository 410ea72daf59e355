use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Geometric grid `start · ratio^k`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeomGrid {
    pub start: f64,
    pub ratio: f64,
    pub count: usize,
}

impl GeomGrid {
    pub fn new(start: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(start > 0.0 && start.is_finite()) {
            return domain(format!("grid start must be positive, got {start}"));
        }
        if !(ratio > 0.0 && ratio.is_finite() && ratio != 1.0) {
            return domain(format!("grid ratio must be positive and != 1, got {ratio}"));
        }
        if count == 0 {
            return domain("grid needs at least one point");
        }
        Ok(Self { start, ratio, count })
    }

    /// Grid with `count` points from `a` to `b` inclusive (either direction).
    pub fn spanning(a: f64, b: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return domain("spanning grid needs at least two points");
        }
        if !(a > 0.0 && b > 0.0) || a == b {
            return domain(format!("spanning grid needs distinct positive ends, got {a}, {b}"));
        }
        Self::new(a, (b / a).powf(1.0 / (count - 1) as f64), count)
    }

    /// Grid from `a` to `b` with `per_decade` points per factor of ten.
    pub fn per_decade(a: f64, b: f64, per_decade: usize) -> Result<Self> {
        let decades = (b / a).log10().abs();
        let count = ((decades * per_decade as f64).ceil() as usize).max(1) + 1;
        Self::spanning(a, b, count)
    }

    pub fn points(&self) -> Vec<f64> {
        // exp/ln form keeps the endpoints reproducible regardless of count
        let (l0, lr) = (self.start.ln(), self.ratio.ln());
        (0..self.count).map(|k| (l0 + k as f64 * lr).exp()).collect()
    }

    pub fn last(&self) -> f64 {
        (self.start.ln() + (self.count - 1) as f64 * self.ratio.ln()).exp()
    }

    pub fn toward_zero(&self) -> bool {
        self.ratio < 1.0
    }
}

/// `count` equally spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..count)
            .map(|k| a + (b - a) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}
