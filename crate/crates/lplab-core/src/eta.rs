//! Finite windows of the compatibility sequence η.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaSequence {
    pub n_lo: i32,
    pub values: Vec<f64>,
}

impl EtaSequence {
    pub fn new(n_lo: i32, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return arg("eta window is empty");
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return arg("eta values must be finite and nonnegative");
        }
        Ok(EtaSequence { n_lo, values })
    }

    pub fn from_fn(n_lo: i32, n_hi: i32, f: impl Fn(i32) -> f64) -> Result<Self> {
        if n_hi < n_lo {
            return arg("eta window is empty");
        }
        EtaSequence::new(n_lo, (n_lo..=n_hi).map(f).collect())
    }

    pub fn n_hi(&self) -> i32 {
        self.n_lo + self.values.len() as i32 - 1
    }

    /// η_n inside the window, 0 outside (in particular for n ≤ −5).
    pub fn value(&self, n: i32) -> f64 {
        if n < self.n_lo || n > self.n_hi() || n <= -5 {
            0.0
        } else {
            self.values[(n - self.n_lo) as usize]
        }
    }

    /// Convention η_n = η_0 for n ≤ 0.
    pub fn meta_value(&self, n: i32) -> f64 {
        self.value(n.max(0).max(self.n_lo))
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    /// Smallest C with η_{n+1}/C ≤ η_n ≤ C η_{n+1} over the window.
    pub fn regularity_constant(&self) -> f64 {
        let mut c: f64 = 1.0;
        for w in self.values.windows(2) {
            if w[0] == 0.0 && w[1] == 0.0 {
                continue;
            }
            if w[0] == 0.0 || w[1] == 0.0 {
                return f64::INFINITY;
            }
            c = c.max(w[0] / w[1]).max(w[1] / w[0]);
        }
        c
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}
