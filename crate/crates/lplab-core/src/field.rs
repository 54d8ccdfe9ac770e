//! Spectral fields on a periodic grid and the exact Littlewood–Paley
//! multipliers acting on them.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cutoff;
use crate::error::{arg, LabError, Result};
use crate::fft::{fft_nd, Direction};
use crate::grid::Grid;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Fourier amplitudes: f(x) = Σ_ξ coef(ξ) e^{iξ·x}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    pub grid: Grid,
    coef: Vec<Complex64>,
    pub mean_zero: bool,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        SpectralField {
            grid,
            coef: vec![ZERO; grid.len()],
            mean_zero: true,
        }
    }

    /// Wraps coefficients; with `mean_zero` the zero mode is forced to 0.
    pub fn from_coef(grid: Grid, mut coef: Vec<Complex64>, mean_zero: bool) -> Result<Self> {
        if coef.len() != grid.len() {
            return Err(LabError::Shape(
                "coefficient count does not match grid".into(),
            ));
        }
        if coef.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return arg("coefficients must be finite");
        }
        if mean_zero {
            coef[0] = ZERO;
        }
        Ok(SpectralField {
            grid,
            coef,
            mean_zero,
        })
    }

    /// Plane wave amp·e^{ik·x/L} for integer multi-index k.
    pub fn plane_wave(grid: Grid, k: [i64; 3], amp: Complex64) -> Result<Self> {
        let idx = grid
            .linear_of_freq(k)
            .ok_or_else(|| LabError::Range("plane-wave frequency outside grid".into()))?;
        let mut f = SpectralField::zeros(grid);
        f.coef[idx] = amp;
        f.mean_zero = idx != 0;
        Ok(f)
    }

    pub fn constant(grid: Grid, c: Complex64) -> Self {
        let mut f = SpectralField::zeros(grid);
        f.coef[0] = c;
        f.mean_zero = c == ZERO;
        f
    }

    /// Forward transform of grid samples (divides by N^d).
    pub fn from_physical(grid: Grid, mut values: Vec<Complex64>, mean_zero: bool) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LabError::Shape("sample count does not match grid".into()));
        }
        fft_nd(&mut values, grid.n, grid.dim, Direction::Forward);
        let scale = 1.0 / grid.len() as f64;
        for v in values.iter_mut() {
            *v *= scale;
        }
        SpectralField::from_coef(grid, values, mean_zero)
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> Complex64, mean_zero: bool) -> Result<Self> {
        let vals = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        SpectralField::from_physical(grid, vals, mean_zero)
    }

    pub fn coef(&self) -> &[Complex64] {
        &self.coef
    }

    pub fn coef_mut(&mut self) -> &mut [Complex64] {
        &mut self.coef
    }

    pub fn into_coef(self) -> Vec<Complex64> {
        self.coef
    }

    /// Grid samples f(x_m).
    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut v = self.coef.clone();
        fft_nd(&mut v, self.grid.n, self.grid.dim, Direction::Inverse);
        v
    }

    /// Grid samples of the same function on an m-times finer grid (m power of two).
    pub fn to_physical_refined(&self, factor: usize) -> Vec<Complex64> {
        if factor == 1 {
            return self.to_physical();
        }
        let fine = Grid {
            dim: self.grid.dim,
            n: self.grid.n * factor,
            l: self.grid.l,
        };
        self.embed(fine).to_physical()
    }

    /// Copies coefficients into a larger grid with the same box (zero elsewhere).
    pub fn embed(&self, fine: Grid) -> SpectralField {
        let mut out = SpectralField::zeros(fine);
        for (i, c) in self.coef.iter().enumerate() {
            if *c != ZERO {
                let k = self.grid.multi_index(i);
                if let Some(j) = fine.linear_of_freq(k) {
                    out.coef[j] = *c;
                }
            }
        }
        out.mean_zero = self.mean_zero;
        out
    }

    /// Keeps the coefficients representable on a coarser grid with the same box.
    pub fn truncate(&self, coarse: Grid) -> SpectralField {
        let mut out = SpectralField::zeros(coarse);
        for (i, c) in self.coef.iter().enumerate() {
            if *c != ZERO {
                let k = self.grid.multi_index(i);
                if let Some(j) = coarse.linear_of_freq(k) {
                    out.coef[j] = *c;
                }
            }
        }
        out.mean_zero = out.coef[0] == ZERO;
        out
    }

    pub fn zero_mode(&self) -> Complex64 {
        self.coef[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coef.iter().all(|c| *c == ZERO)
    }

    pub fn nonzero_count(&self) -> usize {
        self.coef.iter().filter(|c| **c != ZERO).count()
    }

    /// Largest |k_a| over the support, per axis.
    pub fn support_extent(&self) -> [i64; 3] {
        let mut ext = [0i64; 3];
        for (i, c) in self.coef.iter().enumerate() {
            if *c != ZERO {
                let k = self.grid.multi_index(i);
                for a in 0..3 {
                    ext[a] = ext[a].max(k[a].abs());
                }
            }
        }
        ext
    }

    /// Largest |ξ| over the support.
    pub fn max_frequency(&self) -> f64 {
        let mut m = 0i64;
        for (i, c) in self.coef.iter().enumerate() {
            if *c != ZERO {
                m = m.max(self.grid.k2_int(i));
            }
        }
        libm::sqrt(m as f64) / self.grid.l
    }

    /// Multiplication by e^{i k·x/L}: every coefficient moves by the integer vector `k`.
    pub fn translate_spectrum(&self, k: [i64; 3]) -> Result<SpectralField> {
        let g = self.grid;
        let mut out = vec![ZERO; g.len()];
        for (i, c) in self.coef.iter().enumerate() {
            if *c == ZERO {
                continue;
            }
            let m = g.multi_index(i);
            let t = [m[0] + k[0], m[1] + k[1], m[2] + k[2]];
            match g.linear_of_freq(t) {
                Some(j) => out[j] = *c,
                None => return Err(LabError::Range("shifted spectrum leaves the grid".into())),
            }
        }
        let mean_zero = out[0] == ZERO;
        SpectralField::from_coef(g, out, mean_zero)
    }

    /// Applies a real multiplier depending on |ξ|².
    pub fn radial_multiplier(&self, m: impl Fn(f64) -> f64) -> SpectralField {
        let l2 = self.grid.l * self.grid.l;
        let mut out = self.clone();
        for (i, c) in out.coef.iter_mut().enumerate() {
            if *c != ZERO {
                *c *= m(self.grid.k2_int(i) as f64 / l2);
            }
        }
        out.mean_zero = out.coef[0] == ZERO;
        out
    }

    pub fn scale(&self, s: Complex64) -> SpectralField {
        let mut out = self.clone();
        for c in out.coef.iter_mut() {
            *c *= s;
        }
        out
    }

    pub fn scale_real(&self, s: f64) -> SpectralField {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.grid.same_as(&other.grid)?;
        let mut out = self.clone();
        for (a, b) in out.coef.iter_mut().zip(&other.coef) {
            *a += b;
        }
        out.mean_zero = self.mean_zero && other.mean_zero;
        Ok(out)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.grid.same_as(&other.grid)?;
        let mut out = self.clone();
        for (a, b) in out.coef.iter_mut().zip(&other.coef) {
            *a -= b;
        }
        out.mean_zero = self.mean_zero && other.mean_zero;
        Ok(out)
    }

    /// self += s·other
    pub fn axpy(&mut self, s: Complex64, other: &SpectralField) -> Result<()> {
        self.grid.same_as(&other.grid)?;
        for (a, b) in self.coef.iter_mut().zip(&other.coef) {
            *a += s * b;
        }
        self.mean_zero = self.mean_zero && other.mean_zero;
        Ok(())
    }

    /// Box-volume-weighted Σ|coef|² = ‖f‖²_{L²}.
    pub fn l2_norm_spectral(&self) -> f64 {
        let s: f64 = self.coef.iter().map(|c| c.norm_sqr()).sum();
        libm::sqrt(s * self.grid.box_volume())
    }

    /// Largest coefficient modulus.
    pub fn max_abs_coef(&self) -> f64 {
        self.coef.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Translation f(· − a) by a lattice vector given in grid cells.
    pub fn translate_cells(&self, shift: [i64; 3]) -> SpectralField {
        let g = self.grid;
        let mut out = self.clone();
        for (i, c) in out.coef.iter_mut().enumerate() {
            if *c != ZERO {
                let k = g.multi_index(i);
                let mut phase = 0i64;
                for a in 0..g.dim {
                    phase += k[a] * shift[a];
                }
                let ph = phase.rem_euclid(g.n as i64);
                let ang = -2.0 * core::f64::consts::PI * ph as f64 / g.n as f64;
                *c *= Complex64::new(libm::cos(ang), libm::sin(ang));
            }
        }
        out
    }
}

/// Δ_j f.
pub fn delta_j(f: &SpectralField, j: i32) -> Result<SpectralField> {
    f.grid.check_band(j)?;
    Ok(f.radial_multiplier(|k2| cutoff::delta_mult(j, k2)))
}

/// S_j f.
pub fn s_j(f: &SpectralField, j: i32) -> Result<SpectralField> {
    f.grid.check_band(j)?;
    Ok(f.radial_multiplier(|k2| cutoff::s_mult(j, k2)))
}

/// Δ̃_j f = (Δ_{j-2} + … + Δ_{j+2}) f.
pub fn tilde_delta_j(f: &SpectralField, j: i32) -> Result<SpectralField> {
    f.grid.check_band(j)?;
    Ok(f.radial_multiplier(|k2| cutoff::tilde_mult(j, k2)))
}

/// Unchecked band multipliers for internal sums that may step outside the window.
pub(crate) fn delta_unchecked(f: &SpectralField, j: i32) -> SpectralField {
    f.radial_multiplier(|k2| cutoff::delta_mult(j, k2))
}

pub(crate) fn s_unchecked(f: &SpectralField, j: i32) -> SpectralField {
    f.radial_multiplier(|k2| cutoff::s_mult(j, k2))
}

pub(crate) fn tilde_unchecked(f: &SpectralField, j: i32) -> SpectralField {
    f.radial_multiplier(|k2| cutoff::tilde_mult(j, k2))
}

/// Heat semigroup e^{tΔ}.
pub fn heat(f: &SpectralField, t: f64) -> Result<SpectralField> {
    if !(t >= 0.0 && t.is_finite()) {
        return arg("heat time must be a finite nonnegative number");
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    Ok(f.radial_multiplier(|k2| libm::exp(-t * k2)))
}

/// Sum of Δ_j f over the whole band window.
pub fn reconstruct(f: &SpectralField) -> SpectralField {
    let mut out = SpectralField::zeros(f.grid);
    for j in f.grid.bands() {
        let b = delta_unchecked(f, j);
        out.axpy(Complex64::new(1.0, 0.0), &b).expect("same grid");
    }
    out
}

/// Represents 2^m f(2^m x) on the box shrunk by 2^m: coefficients are kept
/// in place and multiplied by 2^m; the lattice ξ = k/L doubles with each step.
pub fn dyadic_rescale(f: &SpectralField, m: i32) -> Result<SpectralField> {
    if m.abs() > 60 {
        return Err(LabError::Range("rescale exponent too large".into()));
    }
    let grid = Grid {
        dim: f.grid.dim,
        n: f.grid.n,
        l: libm::ldexp(f.grid.l, -m),
    };
    let s = libm::ldexp(1.0, m);
    let coef = f.coef.iter().map(|c| c * s).collect();
    Ok(SpectralField {
        grid,
        coef,
        mean_zero: f.mean_zero,
    })
}

/// Same-box variant: moves the coefficient at k to 2^m k. Needs m bands of
/// headroom (m > 0) or divisibility of the support by 2^{|m|} (m < 0).
pub fn dyadic_rescale_in_box(f: &SpectralField, m: i32) -> Result<SpectralField> {
    let g = f.grid;
    let mut out = SpectralField::zeros(g);
    let s = libm::ldexp(1.0, m);
    for (i, c) in f.coef.iter().enumerate() {
        if *c == ZERO {
            continue;
        }
        let k = g.multi_index(i);
        let mut k2 = [0i64; 3];
        for a in 0..g.dim {
            k2[a] = if m >= 0 {
                k[a] << m
            } else {
                let d = 1i64 << (-m);
                if k[a] % d != 0 {
                    return Err(LabError::Range(
                        "frequency support not divisible by the downscaling factor".into(),
                    ));
                }
                k[a] / d
            };
        }
        let j = g.linear_of_freq(k2).ok_or_else(|| {
            LabError::Range(alloc::format!(
                "insufficient headroom: rescaled support must stay within band {}",
                g.j_max() + 1
            ))
        })?;
        out.coef[j] = c * s;
    }
    out.mean_zero = f.mean_zero;
    Ok(out)
}
