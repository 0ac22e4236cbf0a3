//! Discrete action grids.
//!
//! Actions are indices into an evenly spaced grid of real values. The grid is
//! stored as (lo, step, count) so values are computed, never tabulated, and
//! `value(index_of(v)) == v` round-trips exactly for on-grid inputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSpace {
    lo: f64,
    step: f64,
    n: usize,
}

impl ActionSpace {
    /// Grid from `lo` to `hi` inclusive with the given step. `hi` must land on
    /// the grid (within one part in 1e9 of a step).
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || !step.is_finite() {
            return Err(Error::Config("action grid bounds and step must be finite".into()));
        }
        if step <= 0.0 {
            return Err(Error::Config(format!("action grid step must be positive, got {step}")));
        }
        if hi <= lo {
            return Err(Error::Config(format!("action grid needs hi > lo, got [{lo}, {hi}]")));
        }
        let span = (hi - lo) / step;
        let k = span.round();
        if (span - k).abs() > 1e-9 * k.max(1.0) {
            return Err(Error::Config(format!(
                "grid upper bound {hi} is not reachable from {lo} in steps of {step}"
            )));
        }
        Ok(ActionSpace { lo, step, n: k as usize + 1 })
    }

    /// Integer grid `{lo, lo+1, ..., hi}`.
    pub fn integers(lo: i64, hi: i64) -> Result<Self> {
        ActionSpace::new(lo as f64, hi as f64, 1.0)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.value(self.n - 1)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Real value of an action index. Panics if the index is out of range.
    pub fn value(&self, index: usize) -> f64 {
        assert!(index < self.n, "action index {index} out of range for grid of {}", self.n);
        self.lo + self.step * index as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.value(i))
    }

    /// Index of an on-grid value, or `None` if the value misses the grid by
    /// more than one part in 1e6 of a step or lies outside it.
    pub fn index_of(&self, value: f64) -> Option<usize> {
        if !value.is_finite() {
            return None;
        }
        let pos = (value - self.lo) / self.step;
        let k = pos.round();
        if (pos - k).abs() > 1e-6 {
            return None;
        }
        if k < 0.0 || k as usize >= self.n {
            return None;
        }
        Some(k as usize)
    }

    /// Index of the grid point nearest to `value`, clamping values outside the
    /// grid to its ends. Used when binning continuous outcomes such as prices.
    pub fn nearest_index(&self, value: f64) -> usize {
        let pos = ((value - self.lo) / self.step).round();
        if pos < 0.0 {
            0
        } else if pos as usize >= self.n {
            self.n - 1
        } else {
            pos as usize
        }
    }
}
