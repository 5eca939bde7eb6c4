use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A two-sided interval estimate at confidence (or credibility) `level`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, level: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(domain(format!("interval bounds out of order: ({lo}, {hi})")));
        }
        Ok(Self { lo, hi, level })
    }

    /// Build from two bounds in either order.
    pub fn ordered(a: f64, b: f64, level: f64) -> Self {
        Self {
            lo: a.min(b),
            hi: a.max(b),
            level,
        }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn clamp_unit(self) -> Self {
        Self {
            lo: self.lo.clamp(0.0, 1.0),
            hi: self.hi.clamp(0.0, 1.0),
            level: self.level,
        }
    }
}

pub(crate) fn check_level(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(domain(format!("eta must lie in (0,1), got {eta}")));
    }
    Ok(())
}
