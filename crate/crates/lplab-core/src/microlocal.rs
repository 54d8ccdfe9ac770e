//! Density function of a closed set, the Dini test, the induced η sequence, a
//! convolution-stability check and pointwise decay of solutions near the set.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{arg, LabError, Result};
use crate::eta::EtaSequence;
use crate::geometry::{ball_averages, Convolver, DistanceField, PointSet};
use crate::grid::Grid;
use crate::quad::{gauss_legendre_on, linear_fit, log2_slope, spread};
use crate::solver::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProfileSource {
    Grid { dim: usize, n: usize, l: f64 },
    Analytic(String),
}

/// ε_S(2^{−m}) for m = 0..=m_max, stored with δ decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub deltas: Vec<f64>,
    pub values: Vec<f64>,
    pub source: ProfileSource,
}

impl DensityProfile {
    pub fn analytic(name: &str, m_max: u32, eps: impl Fn(f64) -> f64) -> Self {
        let deltas: Vec<f64> = (0..=m_max).map(|m| libm::ldexp(1.0, -(m as i32))).collect();
        let values = deltas.iter().map(|d| eps(*d)).collect();
        DensityProfile {
            deltas,
            values,
            source: ProfileSource::Analytic(name.into()),
        }
    }

    /// (δr)^d / r^d for a single point in dimension d.
    pub fn point_oracle(dim: usize, m_max: u32) -> Self {
        Self::analytic("point", m_max, |d| libm::pow(d, dim as f64))
    }

    /// Volume fraction of the slab |x₁| ≤ δr inside a ball centred on the plane (3-d).
    pub fn plane_oracle(m_max: u32) -> Self {
        Self::analytic("plane", m_max, |d| 1.5 * d * (1.0 - d * d / 3.0))
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn in_unit_range(&self) -> bool {
        self.values.iter().all(|v| (0.0..=1.0).contains(v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySampling {
    /// Ball radii in cells.
    pub radii_cells: Vec<f64>,
    /// Only pairs with δr at least this many cells enter the sup.
    pub min_cells: f64,
}

impl DensitySampling {
    /// Radii 4·2^{i/2} cells up to N/2.
    pub fn for_grid(grid: &Grid) -> Self {
        let mut radii = Vec::new();
        let mut i = 0;
        loop {
            let r = 4.0 * libm::exp2(i as f64 / 2.0);
            if r > grid.n as f64 / 2.0 + 1e-9 {
                break;
            }
            radii.push(r);
            i += 1;
        }
        DensitySampling {
            radii_cells: radii,
            min_cells: 2.0,
        }
    }
}

/// sup over all grid centres x and sampled radii r of |{y ∈ B(x,r) : d_S(y) ≤ δr}| / |B(x,r)|.
pub fn density_function(
    grid: &Grid,
    set: &PointSet,
    m_max: u32,
    sampling: &DensitySampling,
) -> Result<DensityProfile> {
    let dist = DistanceField::new(grid, set)?;
    let h = grid.spacing();
    let deltas: Vec<f64> = (0..=m_max).map(|m| libm::ldexp(1.0, -(m as i32))).collect();
    let mut values = Vec::with_capacity(deltas.len());
    for &d in &deltas {
        let mut best: f64 = 0.0;
        for &rc in &sampling.radii_cells {
            if d * rc < sampling.min_cells {
                continue;
            }
            let thr = d * rc * h;
            let ind: Vec<f64> = dist
                .values
                .iter()
                .map(|v| if *v <= thr * (1.0 + 1e-12) { 1.0 } else { 0.0 })
                .collect();
            let avg = ball_averages(grid, &ind, rc * h);
            best = best.max(avg.iter().cloned().fold(0.0, f64::max));
        }
        values.push(best.min(1.0));
    }
    Ok(DensityProfile {
        deltas,
        values,
        source: ProfileSource::Grid {
            dim: grid.dim,
            n: grid.n,
            l: grid.l,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiniReport {
    /// Σ_m ε(2^{−m}) over the profile
    pub dyadic_sum: f64,
    /// log2 slope of ε(2^{−m}) against m over the second half of the profile
    pub tail_slope: f64,
    pub pass: bool,
}

/// Geometric decay of the tail (slope below this) counts as summable.
pub const TAIL_SLOPE_PASS: f64 = -0.25;

fn tail_slope(values: &[f64]) -> f64 {
    let start = values.len() / 2;
    let x: Vec<f64> = (start..values.len()).map(|m| m as f64).collect();
    let y = &values[start..];
    if y.iter().any(|v| !(*v > 0.0)) {
        // exact zeros in the tail: faster than any geometric rate
        return f64::NEG_INFINITY;
    }
    log2_slope(&x, y)
}

pub fn dini_check(profile: &DensityProfile) -> Result<DiniReport> {
    if profile.values.len() < 4 {
        return arg("profile needs at least four dyadic samples");
    }
    if !profile.is_monotone() {
        return Err(LabError::Precondition(
            "density profile is not monotone".into(),
        ));
    }
    let s = tail_slope(&profile.values);
    Ok(DiniReport {
        dyadic_sum: profile.values.iter().sum(),
        tail_slope: s,
        pass: s < TAIL_SLOPE_PASS,
    })
}

/// η_n = Σ_{m=0}^{n} 2^{−2s′(n−m)} ε(2^{−m}), with C = 1.
pub fn eta_from_density(s_prime: f64, profile: &DensityProfile) -> Result<EtaSequence> {
    if !(s_prime > 0.0) {
        return arg("s' must be positive");
    }
    let v = &profile.values;
    let eta: Vec<f64> = (0..v.len())
        .map(|n| {
            (0..=n)
                .map(|m| libm::exp2(-2.0 * s_prime * (n - m) as f64) * v[m])
                .sum()
        })
        .collect();
    EtaSequence::new(0, eta)
}

/// Tail-trend ℓ¹ verdict, as in the Dini check.
pub fn eta_summable(eta: &EtaSequence) -> bool {
    tail_slope(&eta.values) < TAIL_SLOPE_PASS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionRow {
    pub j: i32,
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionReport {
    pub rows: Vec<ConvolutionRow>,
    pub spread: f64,
}

/// ∫_{ℝ^d} (1 + |y|)^{−N} dy.
fn kernel_mass(dim: usize, n: f64) -> f64 {
    let sphere = match dim {
        1 => 2.0,
        2 => 2.0 * core::f64::consts::PI,
        _ => 4.0 * core::f64::consts::PI,
    };
    // ∫₀^∞ r^{d−1}(1+r)^{−N} dr = B(d, N − d), via r = u/(1−u)
    let (u, w) = gauss_legendre_on(64, 0.0, 1.0);
    let d = dim as f64;
    let radial: f64 = u
        .iter()
        .zip(&w)
        .map(|(u, w)| w * libm::pow(*u, d - 1.0) * libm::pow(1.0 - u, n - d - 1.0))
        .sum();
    sphere * radial
}

/// sup_x (k_j ∗ w_j)(x)/w_j(x) with w_j = (1 + 2^j d_S)^{−s′} and k_j = 2^{dj}(1 + 2^j|x|)^{−N},
/// the discrete kernel rescaled to its continuum mass.
pub fn convolution_stability(
    grid: &Grid,
    set: &PointSet,
    s_prime: f64,
    n_exp: f64,
    js: &[i32],
) -> Result<ConvolutionReport> {
    let d = grid.dim as f64;
    if !(n_exp > d + s_prime) {
        return arg("kernel exponent must exceed d + s'");
    }
    let dist = DistanceField::new(grid, set)?;
    let conv = Convolver::new(*grid);
    let mass = kernel_mass(grid.dim, n_exp);
    let origin = [0.0; 3];
    let mut rows = Vec::new();
    for &j in js {
        let sc = libm::ldexp(1.0, j);
        let mut k: Vec<f64> = (0..grid.len())
            .map(|i| {
                let r = grid.torus_distance(&grid.point(i), &origin);
                libm::pow(1.0 + sc * r, -n_exp)
            })
            .collect();
        let total: f64 = k.iter().sum::<f64>() * grid.cell_volume();
        let norm = libm::pow(sc, -d) * mass / total;
        for v in k.iter_mut() {
            *v *= norm * libm::pow(sc, d) * grid.cell_volume();
        }
        let w: Vec<f64> = dist
            .values
            .iter()
            .map(|r| libm::pow(1.0 + sc * r, -s_prime))
            .collect();
        let kw = conv.apply(&conv.spectrum(&k), &conv.spectrum(&w));
        let c = kw.iter().zip(&w).map(|(a, b)| a / b).fold(0.0, f64::max);
        rows.push(ConvolutionRow { j, constant: c });
    }
    let cs: Vec<f64> = rows.iter().map(|r| r.constant).collect();
    Ok(ConvolutionReport {
        spread: spread(&cs),
        rows,
    })
}

/// Odd-sign datum on the ξ₁ axis: coefficient −i·amp·sign(k₁), the grid analogue of v.p. 1/x₁.
pub fn sawtooth_datum(grid: Grid, amp: f64) -> crate::field::SpectralField {
    use num_complex::Complex64;
    let half = (grid.n / 2) as i64;
    let mut c = vec![Complex64::new(0.0, 0.0); grid.len()];
    for k1 in (1 - half)..half {
        if k1 == 0 {
            continue;
        }
        let idx = grid.linear_of_freq([k1, 0, 0]).expect("on the grid");
        c[idx] = Complex64::new(0.0, -amp * if k1 > 0 { 1.0 } else { -1.0 });
    }
    crate::field::SpectralField::from_coef(grid, c, true).expect("grid-sized")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub t: f64,
    /// sup_x |u|(√t + d_S)·(case factor)
    pub constant_u: f64,
    /// sup_x |w|(√t + d_S)^σ (√t)^{1−σ}
    pub constant_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub s_prime: f64,
    pub sigma: f64,
    pub rows: Vec<DecayRow>,
    pub spread_u: f64,
    pub spread_w: f64,
    /// decay exponents in d_S at the middle sample time, for Su₀ and w = u − Su₀
    pub exponent_heat: f64,
    pub exponent_w: f64,
    pub fit_time: f64,
    pub note: Option<String>,
}

/// Exponent p in |f| ≈ C d_S^{−p}, fitted over grid points with 4√t ≤ d_S ≤ d_max.
fn decay_exponent(values: &[f64], dist: &[f64], t: f64, d_max: f64) -> Option<f64> {
    let lo = 4.0 * libm::sqrt(t);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (v, d) in values.iter().zip(dist) {
        if *d >= lo && *d <= d_max && *v > 0.0 {
            x.push(libm::log(*d));
            y.push(libm::log(*v));
        }
    }
    if x.len() < 4 {
        return None;
    }
    Some(-linear_fit(&x, &y).0)
}

/// u is the solved trajectory and a = Su₀ on the same sample grid; `times` selects samples.
pub fn decay_check(
    u: &Path,
    a: &Path,
    set: &PointSet,
    s_prime: f64,
    times: &[f64],
) -> Result<DecayReport> {
    if !(s_prime > 0.0) {
        return arg("s' must be positive");
    }
    if u.times != a.times {
        return Err(LabError::Shape(
            "trajectories on different time grids".into(),
        ));
    }
    let grid = u.grid();
    let dist = DistanceField::new(&grid, set)?;
    let sigma = (2.0 * s_prime).min(s_prime + 1.0);
    let w = u.sub(a)?;
    let mut rows = Vec::new();
    let mut note = None;
    if (s_prime - 1.0).abs() < 1e-12 {
        note = Some("s' = 1 sits on the logarithmic case and is not separated here".into());
    }
    let mut chosen = Vec::new();
    for &t in times {
        let idx = u
            .times
            .iter()
            .position(|s| (s - t).abs() <= 1e-12 * t.max(1e-300))
            .ok_or_else(|| LabError::Argument(alloc::format!("t = {t} is not a sample time")))?;
        if t <= 0.0 {
            return arg("decay samples need t > 0");
        }
        chosen.push(idx);
        let st = libm::sqrt(t);
        let uv = u.fields[idx].to_physical();
        let wv = w.fields[idx].to_physical();
        let mut cu: f64 = 0.0;
        let mut cw: f64 = 0.0;
        for i in 0..grid.len() {
            let r = st + dist.values[i];
            // s′ < 1 trades (√t)^{s′−1} for the weaker envelope
            let case = if s_prime < 1.0 {
                libm::pow(st, 1.0 - s_prime) * libm::pow(r, s_prime)
            } else {
                r
            };
            cu = cu.max(uv[i].norm() * case);
            cw = cw.max(wv[i].norm() * libm::pow(r, sigma) * libm::pow(st, 1.0 - sigma));
        }
        rows.push(DecayRow {
            t,
            constant_u: cu,
            constant_w: cw,
        });
    }
    let mid = chosen[chosen.len() / 2];
    let t_fit = u.times[mid];
    let d_max = 0.25 * core::f64::consts::PI * grid.l;
    let av: Vec<f64> = a.fields[mid]
        .to_physical()
        .iter()
        .map(|v| v.norm())
        .collect();
    let wv: Vec<f64> = w.fields[mid]
        .to_physical()
        .iter()
        .map(|v| v.norm())
        .collect();
    let cu: Vec<f64> = rows.iter().map(|r| r.constant_u).collect();
    let cw: Vec<f64> = rows.iter().map(|r| r.constant_w).collect();
    Ok(DecayReport {
        s_prime,
        sigma,
        spread_u: spread(&cu),
        spread_w: spread(&cw),
        exponent_heat: decay_exponent(&av, &dist.values, t_fit, d_max).unwrap_or(f64::NAN),
        exponent_w: decay_exponent(&wv, &dist.values, t_fit, d_max).unwrap_or(f64::NAN),
        fit_time: t_fit,
        rows,
        note,
    })
}
