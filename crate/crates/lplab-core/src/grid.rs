use alloc::vec::Vec;
use core::f64::consts::PI;
use serde::{Deserialize, Serialize};

use crate::error::{arg, LabError, Result};

/// Periodic box [0, 2πL)^d sampled with n points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub n: usize,
    pub l: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, l: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return arg("dimension must be 2 or 3");
        }
        if n < 4 || !n.is_power_of_two() {
            return arg("points per axis must be a power of two >= 4");
        }
        if !(l.is_finite() && l > 0.0) {
            return arg("box scale L must be positive");
        }
        Ok(Grid { dim, n, l })
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Signed frequency index of storage position `i` along one axis.
    #[inline]
    pub fn freq_index(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Storage position of signed index `k` along one axis.
    #[inline]
    pub fn storage_index(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// Integer frequency multi-index (k_0, k_1, k_2) at linear position, unused axes 0.
    pub fn multi_index(&self, idx: usize) -> [i64; 3] {
        let mut out = [0i64; 3];
        let mut rest = idx;
        for a in (0..self.dim).rev() {
            out[a] = self.freq_index(rest % self.n);
            rest /= self.n;
        }
        out
    }

    /// Grid-point multi-index (unsigned) at linear position.
    pub fn point_index(&self, idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut rest = idx;
        for a in (0..self.dim).rev() {
            out[a] = rest % self.n;
            rest /= self.n;
        }
        out
    }

    pub fn linear(&self, pos: [usize; 3]) -> usize {
        let mut idx = 0;
        for p in pos.iter().take(self.dim) {
            idx = idx * self.n + p;
        }
        idx
    }

    /// Linear storage position of frequency multi-index, if representable.
    pub fn linear_of_freq(&self, k: [i64; 3]) -> Option<usize> {
        let half = (self.n / 2) as i64;
        let mut pos = [0usize; 3];
        for a in 0..self.dim {
            if k[a] < -half || k[a] >= half {
                return None;
            }
            pos[a] = self.storage_index(k[a]);
        }
        Some(self.linear(pos))
    }

    /// |k|² in integer units.
    pub fn k2_int(&self, idx: usize) -> i64 {
        let k = self.multi_index(idx);
        k.iter().map(|v| v * v).sum()
    }

    /// |ξ|² per storage position, ξ = k / L.
    pub fn xi2_table(&self) -> Vec<f64> {
        let l2 = self.l * self.l;
        (0..self.len())
            .map(|i| self.k2_int(i) as f64 / l2)
            .collect()
    }

    /// Wavevector ξ = k / L at storage position.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let k = self.multi_index(idx);
        [
            k[0] as f64 / self.l,
            k[1] as f64 / self.l,
            k[2] as f64 / self.l,
        ]
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI * self.l / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        libm::pow(self.spacing(), self.dim as f64)
    }

    pub fn box_volume(&self) -> f64 {
        libm::pow(2.0 * PI * self.l, self.dim as f64)
    }

    /// Physical coordinates of grid point.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let p = self.point_index(idx);
        let h = self.spacing();
        [p[0] as f64 * h, p[1] as f64 * h, p[2] as f64 * h]
    }

    /// Smallest band j with 2^{j-1} ≥ 1/L.
    pub fn j_min(&self) -> i32 {
        let mut j = libm::ceil(1.0 - libm::log2(self.l)) as i32 - 1;
        while libm::ldexp(1.0, j - 1) < 1.0 / self.l {
            j += 1;
        }
        while libm::ldexp(1.0, j - 2) >= 1.0 / self.l {
            j -= 1;
        }
        j
    }

    /// Largest band j with 2^{j+1} ≤ N/(2L).
    pub fn j_max(&self) -> i32 {
        let cap = self.n as f64 / (2.0 * self.l);
        let mut j = libm::floor(libm::log2(cap)) as i32;
        while libm::ldexp(1.0, j + 1) > cap {
            j -= 1;
        }
        while libm::ldexp(1.0, j + 2) <= cap {
            j += 1;
        }
        j
    }

    /// Band indices accepted by direct operator calls, [j_min − 2, j_max + 2].
    pub fn band_window(&self) -> (i32, i32) {
        (self.j_min() - 2, self.j_max() + 2)
    }

    pub fn check_band(&self, j: i32) -> Result<()> {
        let (lo, hi) = self.band_window();
        if j < lo || j > hi {
            return Err(LabError::BandRange { j, lo, hi });
        }
        Ok(())
    }

    pub fn bands(&self) -> core::ops::RangeInclusive<i32> {
        let (lo, hi) = self.band_window();
        lo..=hi
    }

    /// Same box at twice the resolution (used for dealiased products).
    pub fn padded(&self) -> Grid {
        Grid {
            dim: self.dim,
            n: 2 * self.n,
            l: self.l,
        }
    }

    pub fn same_as(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(LabError::GridMismatch)
        }
    }

    /// Periodic distance between physical points.
    pub fn torus_distance(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        let period = 2.0 * PI * self.l;
        let mut s = 0.0;
        for i in 0..self.dim {
            let mut d = crate::grid::wrap(a[i] - b[i], period);
            if d > 0.5 * period {
                d = period - d;
            }
            s += d * d;
        }
        libm::sqrt(s)
    }
}

/// x reduced to [0, p).
pub(crate) fn wrap(x: f64, p: f64) -> f64 {
    let r = x - p * libm::floor(x / p);
    if r >= p {
        0.0
    } else {
        r
    }
}
