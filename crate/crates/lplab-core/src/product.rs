//! Pointwise products of spectral fields without aliasing.

use alloc::vec;
use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::fft::{fft_nd, Direction};
use crate::field::SpectralField;
use crate::grid::Grid;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Band ceiling below which two fields multiply without leaving the grid.
pub fn safe_ceiling(grid: &Grid) -> i32 {
    grid.j_max() - 1
}

/// Whether the product of f and g is exactly representable on the grid.
pub fn product_fits(f: &SpectralField, g: &SpectralField) -> bool {
    let (a, b) = (f.support_extent(), g.support_extent());
    let half = (f.grid.n / 2) as i64;
    (0..f.grid.dim).all(|i| a[i] + b[i] < half)
}

/// Galerkin product: the exact product fg projected onto the grid modes.
pub fn product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.grid.same_as(&g.grid)?;
    let grid = f.grid;
    let (nf, ng) = (f.nonzero_count(), g.nonzero_count());
    if nf == 0 || ng == 0 {
        return Ok(SpectralField::zeros(grid));
    }
    let mean_zero_hint = false;
    let out = if (nf as u64) * (ng as u64) <= 4 * grid.len() as u64 {
        sparse_product(f, g)
    } else if product_fits(f, g) {
        let a = f.to_physical();
        let b = g.to_physical();
        let prod = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        SpectralField::from_physical(grid, prod, mean_zero_hint)?
    } else {
        let fine = grid.padded();
        let a = f.embed(fine).to_physical();
        let b = g.embed(fine).to_physical();
        let mut prod: alloc::vec::Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        fft_nd(&mut prod, fine.n, fine.dim, Direction::Forward);
        let s = 1.0 / fine.len() as f64;
        prod.iter_mut().for_each(|v| *v *= s);
        SpectralField::from_coef(fine, prod, false)?.truncate(grid)
    };
    let mut out = out;
    out.mean_zero = out.zero_mode() == ZERO;
    Ok(out)
}

/// Product that refuses to truncate.
pub fn product_exact(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.grid.same_as(&g.grid)?;
    if !product_fits(f, g) {
        return Err(LabError::Aliasing {
            ceiling: safe_ceiling(&f.grid),
        });
    }
    product(f, g)
}

/// Direct convolution over the nonzero coefficients, truncated to the grid.
pub fn sparse_product(f: &SpectralField, g: &SpectralField) -> SpectralField {
    let grid = f.grid;
    let fa: alloc::vec::Vec<([i64; 3], Complex64)> = f
        .coef()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != ZERO)
        .map(|(i, c)| (grid.multi_index(i), *c))
        .collect();
    let ga: alloc::vec::Vec<([i64; 3], Complex64)> = g
        .coef()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != ZERO)
        .map(|(i, c)| (grid.multi_index(i), *c))
        .collect();
    let mut coef = vec![ZERO; grid.len()];
    for (ka, ca) in &fa {
        for (kb, cb) in &ga {
            let k = [ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]];
            if let Some(idx) = grid.linear_of_freq(k) {
                coef[idx] += ca * cb;
            }
        }
    }
    SpectralField::from_coef(grid, coef, false).expect("finite")
}
