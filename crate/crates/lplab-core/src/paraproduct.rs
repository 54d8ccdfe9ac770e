//! Bony splitting of band products and empirical compatibility sequences.

use alloc::vec::Vec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cutoff::pow2;
use crate::error::{arg, LabError, Result};
use crate::field::{delta_unchecked, s_unchecked, tilde_unchecked, SpectralField};
use crate::grid::Grid;
use crate::norms::{norm, Exp, SpaceSpec};
use crate::product::{product_exact, product_fits, safe_ceiling};
use crate::quad::{log2_slope, median};
use crate::rng::LabRng;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct ProductSplit {
    pub j: i32,
    /// Δ_j Σ_{|k−j|≤2} Δ_k f · S_{k−2} g
    pub lowhigh: SpectralField,
    /// Δ_j Σ_{|k−j|≤2} S_{k−2} f · Δ_k g
    pub highlow: SpectralField,
    /// Δ_j Σ_{k≥j−4} Δ_k f · Δ̃_k g
    pub diagonal: SpectralField,
}

impl ProductSplit {
    pub fn total(&self) -> SpectralField {
        let mut t = self.lowhigh.clone();
        t.axpy(ONE, &self.highlow).expect("same grid");
        t.axpy(ONE, &self.diagonal).expect("same grid");
        t
    }
}

/// Exact three-way split of Δ_j(fg). Only the bands |k − j| ≤ 2 feed the
/// paraproduct terms; lower k contribute nothing after Δ_j.
pub fn bony_split(f: &SpectralField, g: &SpectralField, j: i32) -> Result<ProductSplit> {
    f.grid.same_as(&g.grid)?;
    f.grid.check_band(j)?;
    if !product_fits(f, g) {
        return Err(LabError::Aliasing {
            ceiling: safe_ceiling(&f.grid),
        });
    }
    let grid = f.grid;
    let mut lowhigh = SpectralField::zeros(grid);
    let mut highlow = SpectralField::zeros(grid);
    let mut diagonal = SpectralField::zeros(grid);
    for k in (j - 2)..=(j + 2) {
        let df = delta_unchecked(f, k);
        let dg = delta_unchecked(g, k);
        if !df.is_zero() {
            lowhigh.axpy(ONE, &product_exact(&df, &s_unchecked(g, k - 2))?)?;
        }
        if !dg.is_zero() {
            highlow.axpy(ONE, &product_exact(&s_unchecked(f, k - 2), &dg)?)?;
        }
    }
    let (_, hi) = grid.band_window();
    for k in (j - 4)..=hi {
        let df = delta_unchecked(f, k);
        if df.is_zero() {
            continue;
        }
        let tg = tilde_unchecked(g, k);
        if !tg.is_zero() {
            diagonal.axpy(ONE, &product_exact(&df, &tg)?)?;
        }
    }
    Ok(ProductSplit {
        j,
        lowhigh: delta_unchecked(&lowhigh, j),
        highlow: delta_unchecked(&highlow, j),
        diagonal: delta_unchecked(&diagonal, j),
    })
}

/// Reference log₂-slope of η_n for the spaces with a known rate.
pub fn theory_rate(spec: &SpaceSpec) -> Option<f64> {
    match spec {
        SpaceSpec::Lebesgue { p: Exp::Finite(p) } if (*p - 3.0).abs() < 1e-12 => Some(-2.0),
        SpaceSpec::Lorentz { p, .. } if (*p - 3.0).abs() < 1e-12 => Some(-2.0),
        SpaceSpec::BesovHom { p, .. } if p_at_least_two(p) => Some(-6.0 * p.recip()),
        SpaceSpec::TriebelHom { p, .. } if *p >= 2.0 => Some(-6.0 / p),
        SpaceSpec::Morrey { p, q } if (*p - 3.0).abs() < 1e-12 => {
            Some(if *q >= 2.0 { -2.0 } else { -*q })
        }
        SpaceSpec::BesovOverMorrey { p, q, .. } => {
            Some(if *q >= 2.0 { -6.0 / p } else { -3.0 * q / p })
        }
        SpaceSpec::FourierFq { q } => Some(-3.0 * (1.0 - q.recip())),
        _ => None,
    }
}

fn p_at_least_two(p: &Exp) -> bool {
    match p {
        Exp::Inf => true,
        Exp::Finite(v) => *v >= 2.0,
    }
}

/// Setup for η measurement: output band j and spectral caps of radius 2^{j−1}
/// centred at ±2^k e₁, so that fg lands on Γ_j while f, g sit on Γ_k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaSetup {
    pub grid: Grid,
    pub j: i32,
}

impl Default for EtaSetup {
    fn default() -> Self {
        EtaSetup {
            grid: Grid {
                dim: 2,
                n: 256,
                l: 1.0,
            },
            j: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaRow {
    pub n: i32,
    pub trials: usize,
    pub ratio_max: f64,
    pub ratio_median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaMeasurement {
    pub seed: u64,
    pub rows: Vec<EtaRow>,
    pub theory_rate: Option<f64>,
}

impl EtaMeasurement {
    /// Fitted log₂ slope of ratio_max against n.
    pub fn slope(&self) -> f64 {
        let x: Vec<f64> = self.rows.iter().map(|r| r.n as f64).collect();
        let y: Vec<f64> = self.rows.iter().map(|r| r.ratio_max).collect();
        log2_slope(&x, &y)
    }
}

fn stream(tag: u64, n: i32, trial: usize) -> u64 {
    (tag << 48) ^ (((n as i64 as u64) & 0xffff) << 32) ^ trial as u64
}

/// max and median over trials of ‖Δ_j(fg)‖_E / (4^k 2^{−j} ‖f‖_E ‖g‖_E), n = k − j.
pub fn eta_estimate(
    spec: &SpaceSpec,
    setup: &EtaSetup,
    offsets: core::ops::RangeInclusive<i32>,
    trials: usize,
    seed: u64,
) -> Result<EtaMeasurement> {
    if trials == 0 {
        return arg("at least one trial is required");
    }
    spec.validate()?;
    let grid = setup.grid;
    let j = setup.j;
    let rho = pow2(j - 1);
    let mut rows = Vec::new();
    for n in offsets {
        let k = j + n;
        let centre = pow2(k);
        if centre + rho > (grid.n / 2 - 1) as f64 / grid.l || k > grid.j_max() + 1 {
            return Err(LabError::Range("offset exceeds grid headroom".into()));
        }
        grid.check_band(k)?;
        let mut ratios = Vec::with_capacity(trials);
        for t in 0..trials {
            let mut rng = LabRng::new(seed, stream(1, n, t));
            let f = rng.cap_field(grid, [centre, 0.0, 0.0], rho);
            let g = rng.cap_field(grid, [-centre, 0.0, 0.0], rho);
            let (nf, ng) = (norm(&f, spec)?, norm(&g, spec)?);
            if nf == 0.0 || ng == 0.0 {
                continue;
            }
            let fg = crate::product::product(&f.scale_real(1.0 / nf), &g.scale_real(1.0 / ng))?;
            let mut out = delta_unchecked(&fg, j);
            out.coef_mut()[0] = Complex64::new(0.0, 0.0);
            out.mean_zero = true;
            let num = norm(&out, spec)?;
            ratios.push(num / (pow2(2 * k) * pow2(-j)));
        }
        rows.push(EtaRow {
            n,
            trials: ratios.len(),
            ratio_max: ratios.iter().cloned().fold(0.0, f64::max),
            ratio_median: median(&ratios),
        });
    }
    Ok(EtaMeasurement {
        seed,
        rows,
        theory_rate: theory_rate(spec),
    })
}

/// Max over trials of ‖fg‖_E / (2^l ‖f‖_E ‖g‖_E) for f on shell Γ_k, g on shell Γ_l, l ≤ k − 3.
pub fn separation_constant(
    spec: &SpaceSpec,
    grid: &Grid,
    k: i32,
    l: i32,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return arg("at least one trial is required");
    }
    if l > k - 3 {
        return arg("separation needs l <= k - 3");
    }
    spec.validate()?;
    grid.check_band(k)?;
    grid.check_band(l)?;
    let mut best: f64 = 0.0;
    for t in 0..trials {
        let mut rng = LabRng::new(seed, stream(2, k * 64 + l, t));
        let f = rng.bandlimited_field(*grid, k, k);
        let g = rng.bandlimited_field(*grid, l, l);
        let (nf, ng) = (norm(&f, spec)?, norm(&g, spec)?);
        if nf == 0.0 || ng == 0.0 {
            continue;
        }
        let fg = product_exact(&f, &g)?;
        best = best.max(norm(&fg, spec)? / (pow2(l) * nf * ng));
    }
    Ok(best)
}
