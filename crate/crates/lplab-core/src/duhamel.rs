//! The Duhamel bilinear operator B(u,v)(t) = ∫₀ᵗ e^{(t−τ)Δ} P(D)(u v)(τ) dτ and its
//! per-band diagnostics.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cutoff::pow2;
use crate::error::{arg, LabError, Result};
use crate::eta::EtaSequence;
use crate::fft::{fft_nd, Direction};
use crate::field::{delta_unchecked, heat, SpectralField};
use crate::grid::Grid;
use crate::norms::{lp_of_values, norm, SpaceSpec};
use crate::product::{product, product_exact};
use crate::quad::gauss_legendre_on;
use crate::symbol::{apply_symbol, SymbolSpec};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Nodes on (0, t): τ = t s² for s ∈ (0, 1/√2) and τ = t(1 − r²) for r ∈ (0, 1/√2),
/// each with half of the Gauss–Legendre points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeQuadrature {
    pub t: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TimeQuadrature {
    pub fn new(t: f64, count: usize) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return arg("quadrature time must be positive");
        }
        if count < 2 || count % 2 == 1 {
            return arg("node count must be even and at least 2");
        }
        let (s, w) = gauss_legendre_on(count / 2, 0.0, core::f64::consts::FRAC_1_SQRT_2);
        let mut nodes = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for (si, wi) in s.iter().zip(&w) {
            nodes.push(t * si * si);
            weights.push(2.0 * t * si * wi);
        }
        for (ri, wi) in s.iter().zip(&w).rev() {
            nodes.push(t * (1.0 - ri * ri));
            weights.push(2.0 * t * ri * wi);
        }
        Ok(TimeQuadrature { t, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// ε(s) = Σ_{n ≥ −4} η_n min(1, 4^n s) over the window of η.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonFunction {
    pub eta: EtaSequence,
}

impl EpsilonFunction {
    pub fn new(eta: EtaSequence) -> Self {
        EpsilonFunction { eta }
    }
}

pub fn epsilon_eval(eps: &EpsilonFunction, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return arg("epsilon argument must be nonnegative");
    }
    let lo = eps.eta.n_lo.max(-4);
    let mut acc = 0.0;
    for n in lo..=eps.eta.n_hi() {
        let m = libm::ldexp(s, 2 * n);
        acc += eps.eta.value(n) * if m < 1.0 { m } else { 1.0 };
    }
    Ok(acc)
}

/// t ↦ u(t).
#[derive(Debug, Clone, PartialEq)]
pub enum Trajectory {
    Zero(Grid),
    Constant(SpectralField),
    /// e^{tΔ} u₀
    Heat(SpectralField),
    /// Samples at increasing times starting at 0, linear in √t between them.
    Sampled {
        times: Vec<f64>,
        fields: Vec<SpectralField>,
    },
    /// Σ_k (1 + 2^k √t)^{−N} f_k for band pieces f_k.
    Weighted {
        parts: Vec<(i32, SpectralField)>,
        power: u32,
    },
}

impl Trajectory {
    pub fn sampled(times: Vec<f64>, fields: Vec<SpectralField>) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(LabError::Shape("times and fields must match".into()));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return arg("sample times must start at 0 and increase");
        }
        let g = fields[0].grid;
        for f in &fields {
            g.same_as(&f.grid)?;
        }
        Ok(Trajectory::Sampled { times, fields })
    }

    pub fn grid(&self) -> Grid {
        match self {
            Trajectory::Zero(g) => *g,
            Trajectory::Constant(f) | Trajectory::Heat(f) => f.grid,
            Trajectory::Sampled { fields, .. } => fields[0].grid,
            Trajectory::Weighted { parts, .. } => parts[0].1.grid,
        }
    }

    pub fn t_max(&self) -> f64 {
        match self {
            Trajectory::Sampled { times, .. } => *times.last().expect("nonempty"),
            _ => f64::INFINITY,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Trajectory::Zero(_) => true,
            Trajectory::Constant(f) | Trajectory::Heat(f) => f.is_zero(),
            Trajectory::Sampled { fields, .. } => fields.iter().all(|f| f.is_zero()),
            Trajectory::Weighted { parts, .. } => parts.iter().all(|(_, f)| f.is_zero()),
        }
    }

    pub fn eval(&self, t: f64) -> Result<SpectralField> {
        if !(t >= 0.0) || t > self.t_max() * (1.0 + 1e-12) {
            return Err(LabError::Range("time outside trajectory domain".into()));
        }
        Ok(match self {
            Trajectory::Zero(g) => SpectralField::zeros(*g),
            Trajectory::Constant(f) => f.clone(),
            Trajectory::Heat(f) => heat(f, t)?,
            Trajectory::Sampled { times, fields } => {
                let (a, alpha) = locate(times, t);
                if alpha == 1.0 {
                    fields[a].clone()
                } else {
                    let mut out = fields[a].scale_real(alpha);
                    out.axpy(Complex64::new(1.0 - alpha, 0.0), &fields[a + 1])?;
                    out
                }
            }
            Trajectory::Weighted { parts, power } => {
                let st = libm::sqrt(t);
                let mut out = SpectralField::zeros(parts[0].1.grid);
                for (k, f) in parts {
                    let w = libm::pow(1.0 + pow2(*k) * st, -(*power as f64));
                    out.axpy(Complex64::new(w, 0.0), f)?;
                }
                out
            }
        })
    }
}

/// Interval index a and weight α with u(t) = α u_a + (1 − α) u_{a+1}, interpolating in √t.
pub(crate) fn locate(times: &[f64], t: f64) -> (usize, f64) {
    let last = times.len() - 1;
    if t >= times[last] {
        return (last, 1.0);
    }
    let a = match times.binary_search_by(|x| x.total_cmp(&t)) {
        Ok(i) => return (i, 1.0),
        Err(i) => i - 1,
    };
    let (s0, s1, s) = (
        libm::sqrt(times[a]),
        libm::sqrt(times[a + 1]),
        libm::sqrt(t),
    );
    (a, (s1 - s) / (s1 - s0))
}

/// Memoising wrapper; evaluations are keyed by the bit pattern of t.
#[derive(Debug)]
pub struct CachedTrajectory {
    pub inner: Trajectory,
    cache: RefCell<BTreeMap<u64, SpectralField>>,
}

impl CachedTrajectory {
    pub fn new(inner: Trajectory) -> Self {
        CachedTrajectory {
            inner,
            cache: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn eval(&self, t: f64) -> Result<SpectralField> {
        if let Some(f) = self.cache.borrow().get(&t.to_bits()) {
            return Ok(f.clone());
        }
        let f = self.inner.eval(t)?;
        self.cache.borrow_mut().insert(t.to_bits(), f.clone());
        Ok(f)
    }

    pub fn cached_len(&self) -> usize {
        self.cache.borrow().len()
    }
}

/// How products of trajectory values treat modes beyond the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProductMode {
    /// Refuse products that leave the grid.
    Exact,
    /// Project the exact product back onto the grid.
    Galerkin,
}

fn mul(a: &SpectralField, b: &SpectralField, mode: ProductMode) -> Result<SpectralField> {
    match mode {
        ProductMode::Exact => product_exact(a, b),
        ProductMode::Galerkin => product(a, b),
    }
}

/// Σ_w w · e^{(t−τ)Δ} P(D)(u(τ)v(τ)).
pub fn bilinear_b(
    u: &Trajectory,
    v: &Trajectory,
    t: f64,
    quad: &TimeQuadrature,
    sym: SymbolSpec,
) -> Result<SpectralField> {
    bilinear_b_with(u, v, t, quad, sym, ProductMode::Exact)
}

pub fn bilinear_b_with(
    u: &Trajectory,
    v: &Trajectory,
    t: f64,
    quad: &TimeQuadrature,
    sym: SymbolSpec,
    mode: ProductMode,
) -> Result<SpectralField> {
    let grid = u.grid();
    grid.same_as(&v.grid())?;
    if sym.is_vector() {
        return Err(LabError::Shape(
            "vector symbol applied to a scalar field".into(),
        ));
    }
    if (quad.t - t).abs() > 1e-12 * t {
        return arg("quadrature built for a different time");
    }
    if t > u.t_max() * (1.0 + 1e-12) || t > v.t_max() * (1.0 + 1e-12) {
        return Err(LabError::Range(
            "quadrature node outside trajectory domain".into(),
        ));
    }
    let mut acc = vec![ZERO; grid.len()];
    if !(u.is_zero() || v.is_zero()) {
        let xi2 = grid.xi2_table();
        for (tau, w) in quad.nodes.iter().zip(&quad.weights) {
            let p = mul(&u.eval(*tau)?, &v.eval(*tau)?, mode)?;
            let dt = t - tau;
            for ((a, c), x2) in acc.iter_mut().zip(p.coef()).zip(&xi2) {
                if *c != ZERO {
                    *a += c * (w * libm::exp(-dt * x2));
                }
            }
        }
    }
    let out = SpectralField::from_coef(grid, acc, true)?;
    apply_symbol(&out, sym)
}

/// R_j, C_j and the comparison envelopes at one (j, t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandDiagnostic {
    pub j: i32,
    pub t: f64,
    pub rj: f64,
    pub cj: f64,
    /// min(1, 4^j t)(1 + 2^j√t)^{−N}
    pub envelope_r: f64,
    /// ε(4^j t)(1 + 2^j√t)^{−N}
    pub envelope_c: f64,
    /// ‖Δ_j B(u,v)(t)‖_E
    pub band_b: f64,
}

impl BandDiagnostic {
    pub fn ratio_r(&self) -> f64 {
        self.rj / self.envelope_r
    }
    pub fn ratio_c(&self) -> f64 {
        self.cj / self.envelope_c
    }
    pub fn ratio_b(&self) -> f64 {
        self.band_b / self.envelope_c
    }
}

/// Per-node band data needed for every j at once.
struct NodeBands {
    /// ‖Δ_j u · S_{j−2} v‖_E per j in `js`
    low_high: Vec<f64>,
    /// ‖Δ_j(Σ_{k ≥ j−4} Δ_k u Δ̃_k v)‖_E per j
    diag: Vec<f64>,
}

/// S_{k−2} f on the fine grid for every k, as zero mode plus the lower band pieces.
fn low_parts(
    f: &SpectralField,
    bands: &[i32],
    d: &[Vec<Complex64>],
    n: usize,
) -> Vec<Vec<Complex64>> {
    let mut acc = vec![f.zero_mode(); n];
    let mut out = Vec::with_capacity(bands.len());
    let mut next = 0;
    for k in bands {
        while next < bands.len() && bands[next] < k - 2 {
            for (a, x) in acc.iter_mut().zip(&d[next]) {
                *a += x;
            }
            next += 1;
        }
        out.push(acc.clone());
    }
    out
}

/// Physical samples of a field on the doubled grid.
fn padded_physical(f: &SpectralField) -> Vec<Complex64> {
    f.embed(f.grid.padded()).to_physical()
}

fn node_bands(
    u: &SpectralField,
    v: &SpectralField,
    js: &[i32],
    spec: &SpaceSpec,
) -> Result<NodeBands> {
    let grid = u.grid;
    let fine = grid.padded();
    let (lo, hi) = grid.band_window();
    // Δ_k u, S_{k−2} v, Δ_k v, S_{k−2} u on the fine grid for all bands in the window.
    let bands: Vec<i32> = (lo..=hi).collect();
    let du: Vec<Vec<Complex64>> = bands
        .iter()
        .map(|k| padded_physical(&delta_unchecked(u, *k)))
        .collect();
    let dv: Vec<Vec<Complex64>> = bands
        .iter()
        .map(|k| padded_physical(&delta_unchecked(v, *k)))
        .collect();
    let n = fine.len();
    let su = low_parts(u, &bands, &du, n);
    let sv = low_parts(v, &bands, &dv, n);
    let uu = padded_physical(u);
    let vv = padded_physical(v);
    // diagonal remainder D = uv − Σ_k Δ_k u S_{k−2} v − Σ_k S_{k−2} u Δ_k v
    let mut d: Vec<Complex64> = (0..n).map(|i| uu[i] * vv[i]).collect();
    for b in 0..bands.len() {
        for i in 0..n {
            d[i] -= du[b][i] * sv[b][i] + su[b][i] * dv[b][i];
        }
    }
    fft_nd(&mut d, fine.n, fine.dim, Direction::Forward);
    let s = 1.0 / n as f64;
    d.iter_mut().for_each(|x| *x *= s);
    let dfield = SpectralField::from_coef(fine, d, false)?.truncate(grid);
    let fine_cell = fine.cell_volume();
    let mut low_high = Vec::with_capacity(js.len());
    let mut diag = Vec::with_capacity(js.len());
    for j in js {
        let b = (j - lo) as usize;
        let vals: Vec<f64> = (0..n).map(|i| (du[b][i] * sv[b][i]).norm()).collect();
        low_high.push(physical_norm(&vals, fine_cell, spec)?);
        let mut dj = delta_unchecked(&dfield, *j);
        dj.coef_mut()[0] = ZERO;
        dj.mean_zero = true;
        diag.push(norm(&dj, spec)?);
    }
    Ok(NodeBands { low_high, diag })
}

fn physical_norm(vals: &[f64], cell: f64, spec: &SpaceSpec) -> Result<f64> {
    match spec {
        SpaceSpec::Lebesgue { p } => Ok(lp_of_values(vals, cell, *p)),
        _ => Err(LabError::Unsupported(
            "band diagnostics use a Lebesgue base space".into(),
        )),
    }
}

/// R_j(t), C_j(t) with weight (1 + 2^j√(t−τ))^{−2N} and the band norm of B(u,v)(t), for
/// every j in `js` and t in `ts`.
#[allow(clippy::too_many_arguments)]
pub fn band_diagnostics(
    u: &Trajectory,
    v: &Trajectory,
    ts: &[f64],
    js: &[i32],
    spec: &SpaceSpec,
    eps: &EpsilonFunction,
    n_exp: u32,
    nodes: usize,
    sym: SymbolSpec,
) -> Result<Vec<BandDiagnostic>> {
    let grid = u.grid();
    grid.same_as(&v.grid())?;
    for j in js {
        grid.check_band(*j)?;
    }
    let p = 2.0 * n_exp as f64;
    let mut out = Vec::new();
    for &t in ts {
        let quad = TimeQuadrature::new(t, nodes)?;
        let mut rj = vec![0.0; js.len()];
        let mut cj = vec![0.0; js.len()];
        for (tau, w) in quad.nodes.iter().zip(&quad.weights) {
            let nb = node_bands(&u.eval(*tau)?, &v.eval(*tau)?, js, spec)?;
            for (i, j) in js.iter().enumerate() {
                let k = pow2(*j) * libm::pow(1.0 + pow2(*j) * libm::sqrt(t - tau), -p);
                rj[i] += w * k * nb.low_high[i];
                cj[i] += w * k * nb.diag[i];
            }
        }
        let b = bilinear_b_with(u, v, t, &quad, sym, ProductMode::Galerkin)?;
        for (i, j) in js.iter().enumerate() {
            let decay = libm::pow(1.0 + pow2(*j) * libm::sqrt(t), -(n_exp as f64));
            let s = libm::ldexp(t, 2 * j);
            out.push(BandDiagnostic {
                j: *j,
                t,
                rj: rj[i],
                cj: cj[i],
                envelope_r: s.min(1.0) * decay,
                envelope_c: epsilon_eval(eps, s)? * decay,
                band_b: norm(&delta_unchecked(&b, *j), spec)?,
            });
        }
    }
    Ok(out)
}

/// Pairing ⟨B(u,v)(t), φ⟩ = box-volume-weighted Σ coef · conj(φ̂).
pub fn pairing(f: &SpectralField, test: &SpectralField) -> Result<Complex64> {
    f.grid.same_as(&test.grid)?;
    let s: Complex64 = f
        .coef()
        .iter()
        .zip(test.coef())
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(s * f.grid.box_volume())
}

/// Trajectory whose band norms saturate the time weight: (1 + 2^k√t)^{−N} per band,
/// built from the unit-normalised band pieces of `f`.
pub fn saturating_trajectory(
    f: &SpectralField,
    base: &SpaceSpec,
    power: u32,
) -> Result<Trajectory> {
    let mut parts = Vec::new();
    for k in f.grid.bands() {
        let b = delta_unchecked(f, k);
        if b.is_zero() {
            continue;
        }
        let nb = norm(&b, base)?;
        parts.push((k, b.scale_real(1.0 / nb)));
    }
    if parts.is_empty() {
        return Ok(Trajectory::Zero(f.grid));
    }
    Ok(Trajectory::Weighted { parts, power })
}
