//! Finite building blocks of the non-solvability construction: the band-k blow-up pair,
//! the δ-sequence, an orthonormal bump lattice, lacunary superpositions and the
//! one-dimensional kernel bound.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::RangeInclusive;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{arg, LabError, Result};
use crate::eta::EtaSequence;
use crate::field::{delta_j, SpectralField};
use crate::geometry::ball_averages;
use crate::grid::Grid;
use crate::norms::{norm, Exp, SpaceSpec};
use crate::product::sparse_product;
use crate::quad::gauss_legendre_on;
use crate::rng::LabRng;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Low-frequency profile with coefficients 1 at 0 and ¼ at ±e_i/L (requires 1/L ≤ ½).
pub fn prop19_profile(grid: Grid) -> Result<SpectralField> {
    if 1.0 / grid.l > 0.5 + 1e-12 {
        return arg("profile needs the lowest mode 1/L <= 1/2");
    }
    let mut f = SpectralField::constant(grid, Complex64::new(1.0, 0.0));
    f.mean_zero = false;
    for a in 0..grid.dim {
        for s in [-1i64, 1] {
            let mut k = [0i64; 3];
            k[a] = s;
            f.coef_mut()[grid.linear_of_freq(k).expect("lowest mode")] = Complex64::new(0.25, 0.0);
        }
    }
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop19Pair {
    pub k: i32,
    pub phi: SpectralField,
    pub f: SpectralField,
    pub g: SpectralField,
}

impl Prop19Pair {
    /// f = 2^k e^{−i2^k x₁}φ, g = conj-phase partner; φ must have spectrum in |ξ| ≤ ½.
    pub fn new(phi: &SpectralField, k: i32) -> Result<Self> {
        let grid = phi.grid;
        if k < 1 || k > grid.j_max() - 1 {
            return Err(LabError::BandRange {
                j: k,
                lo: 1,
                hi: grid.j_max() - 1,
            });
        }
        if phi.max_frequency() > 0.5 + 1e-12 {
            return arg("profile spectrum leaves the ball of radius 1/2");
        }
        let shift = libm::ldexp(grid.l, k);
        if libm::fabs(shift - libm::round(shift)) > 1e-9 {
            return arg("2^k is not a lattice frequency");
        }
        let s = libm::round(shift) as i64;
        let amp = libm::ldexp(1.0, k);
        let f = phi.translate_spectrum([-s, 0, 0])?.scale_real(amp);
        let g = phi.translate_spectrum([s, 0, 0])?.scale_real(amp);
        Ok(Prop19Pair {
            k,
            phi: phi.clone(),
            f,
            g,
        })
    }

    /// ‖Δ₀(fg)‖_∞
    pub fn ratio(&self) -> Result<f64> {
        let fg = sparse_product(&self.f, &self.g);
        Ok(sup_abs(&delta_j(&fg, 0)?))
    }

    pub fn besov_norms(&self) -> Result<(f64, f64)> {
        let spec = SpaceSpec::critical_besov(Exp::Inf, Exp::Inf);
        Ok((norm(&self.f, &spec)?, norm(&self.g, &spec)?))
    }
}

pub fn prop19_ratio(k: i32, phi: &SpectralField) -> Result<f64> {
    if phi.is_zero() {
        return Ok(0.0);
    }
    Prop19Pair::new(phi, k)?.ratio()
}

fn sup_abs(f: &SpectralField) -> f64 {
    f.to_physical().iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSequence {
    pub eta: EtaSequence,
    pub dim: u32,
    pub j0: i32,
    pub j1: i32,
    /// σ_n = min_{n ≤ k ≤ j1} 2^{dk} η_k² for n in [0, j1]
    pub sigma: Vec<f64>,
    /// δ_j² for j in [j0, j1]
    pub delta2: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// η_n² − Σ_{j0 ≤ j ≤ n} 2^{d(j−n)} δ_j²
    pub slack: Vec<f64>,
    /// partial sums of Σ_{n ≥ 0} 2^{−dn} σ_n
    pub hypothesis_sums: Vec<f64>,
    pub hypothesis_divergent: bool,
}

impl DeltaSequence {
    pub fn delta2_at(&self, j: i32) -> f64 {
        if j < self.j0 || j > self.j1 {
            0.0
        } else {
            self.delta2[(j - self.j0) as usize]
        }
    }

    pub fn sigma_at(&self, n: i32) -> f64 {
        self.sigma[n as usize]
    }

    /// Σ_{j0 ≤ j ≤ J} 2^{dj} δ_j², which telescopes to σ_J.
    pub fn weighted_sum(&self, upto: i32) -> f64 {
        (self.j0..=upto.min(self.j1))
            .map(|j| libm::ldexp(self.delta2_at(j), self.dim as i32 * j))
            .sum()
    }
}

pub fn delta_sequence(eta: &EtaSequence, window: RangeInclusive<i32>) -> Result<DeltaSequence> {
    delta_sequence_dim(eta, window, 3)
}

/// δ_{j0}² = 2^{−d j0} σ_{j0}, δ_j² = 2^{−dj}(σ_j − σ_{j−1}).
pub fn delta_sequence_dim(
    eta: &EtaSequence,
    window: RangeInclusive<i32>,
    dim: u32,
) -> Result<DeltaSequence> {
    let (j0, j1) = (*window.start(), *window.end());
    if j0 < 0 || j1 < j0 || eta.n_lo > 0 || eta.n_hi() < j1 {
        return arg("window must satisfy 0 <= j0 <= j1 inside the eta window");
    }
    if !eta.is_nonincreasing() {
        return Err(LabError::Precondition("eta must be nonincreasing".into()));
    }
    if (0..=j1).any(|n| !(eta.value(n) > 0.0)) {
        return Err(LabError::Precondition(
            "eta must be positive on the window".into(),
        ));
    }
    let d = dim as i32;
    let w = |k: i32| libm::ldexp(eta.value(k) * eta.value(k), d * k);
    let mut sigma = vec![0.0; (j1 + 1) as usize];
    let mut run = f64::INFINITY;
    for n in (0..=j1).rev() {
        run = run.min(w(n));
        sigma[n as usize] = run;
    }
    let mut delta2 = Vec::new();
    for j in j0..=j1 {
        let v = if j == j0 {
            sigma[j as usize]
        } else {
            sigma[j as usize] - sigma[(j - 1) as usize]
        };
        delta2.push(libm::ldexp(v, -d * j));
    }
    let mut partial_sums = Vec::new();
    let mut acc = 0.0;
    for v in &delta2 {
        acc += v;
        partial_sums.push(acc);
    }
    let mut slack = Vec::new();
    for n in j0..=j1 {
        let s: f64 = (j0..=n)
            .map(|j| libm::ldexp(delta2[(j - j0) as usize], d * (j - n)))
            .sum();
        slack.push(eta.value(n) * eta.value(n) - s);
    }
    let mut hypothesis_sums = Vec::new();
    let mut acc = 0.0;
    for n in 0..=j1 {
        acc += libm::ldexp(sigma[n as usize], -d * n);
        hypothesis_sums.push(acc);
    }
    // finite-window proxy: the second half still contributes a visible share
    let mid = (j1 / 2) as usize;
    let total = *hypothesis_sums.last().unwrap();
    let head = hypothesis_sums[mid];
    let hypothesis_divergent = total > 0.0 && (total - head) >= 0.05 * head;
    Ok(DeltaSequence {
        eta: eta.clone(),
        dim,
        j0,
        j1,
        sigma,
        delta2,
        partial_sums,
        slack,
        hypothesis_sums,
        hypothesis_divergent,
    })
}

/// Bump lattice on a box of side P (unit lattice spacing), built from a radial ĥ
/// supported in the annulus (lo, hi).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthonormalBump {
    pub grid: Grid,
    pub period: usize,
    pub profile: Annulus,
    pub m0: SpectralField,
    pub m: SpectralField,
}

fn smooth_step(s: f64) -> f64 {
    let rho = |t: f64| if t > 0.0 { libm::exp(-1.0 / t) } else { 0.0 };
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        rho(s) / (rho(s) + rho(1.0 - s))
    }
}

/// Radial ĥ: 1 on the plateau [b, c], smooth tapers down to 0 at a and d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Default for Annulus {
    fn default() -> Self {
        Annulus {
            a: 0.7 * PI,
            b: 0.9 * PI,
            c: 2.1 * PI,
            d: 2.4 * PI,
        }
    }
}

impl Annulus {
    pub fn eval(&self, r: f64) -> f64 {
        smooth_step((r - self.a) / (self.b - self.a))
            * smooth_step((self.d - r) / (self.d - self.c))
    }
}

impl OrthonormalBump {
    pub fn new(dim: usize, n: usize, period: usize) -> Result<Self> {
        Self::with_profile(dim, n, period, Annulus::default())
    }

    pub fn with_profile(dim: usize, n: usize, period: usize, profile: Annulus) -> Result<Self> {
        if period == 0 || !n.is_multiple_of(period) {
            return arg("grid size must be a multiple of the period");
        }
        let grid = Grid::new(dim, n, period as f64 / (2.0 * PI))?;
        let nyq = PI * (n / period) as f64;
        let (lo, hi) = (profile.a, profile.d);
        if !(lo > 0.0 && profile.b > lo && profile.c > profile.b && hi > profile.c && hi < nyq) {
            return arg("annulus must satisfy 0 < a < b < c < d < Nyquist");
        }
        let reach = libm::ceil(hi / (2.0 * PI)) as i64 + 1;
        let pd = libm::pow(period as f64, dim as f64);
        let xi2 = grid.xi2_table();
        let mut c0 = vec![ZERO; grid.len()];
        let mut c = vec![ZERO; grid.len()];
        for i in 0..grid.len() {
            let h = profile.eval(libm::sqrt(xi2[i]));
            if h == 0.0 {
                continue;
            }
            let xi = grid.wavevector(i);
            let mut sigma = 0.0;
            let mut l = [-reach; 3];
            for a in dim..3 {
                l[a] = 0;
            }
            loop {
                let mut r2 = 0.0;
                for a in 0..dim {
                    let v = xi[a] + 2.0 * PI * l[a] as f64;
                    r2 += v * v;
                }
                let hv = profile.eval(libm::sqrt(r2));
                if hv > 0.0 {
                    sigma += libm::exp(-2.0 * r2) * hv * hv;
                }
                if !odometer(&mut l, dim, reach) {
                    break;
                }
            }
            let m0 = h / libm::sqrt(sigma);
            c0[i] = Complex64::new(m0 / pd, 0.0);
            c[i] = Complex64::new(libm::exp(-xi2[i]) * m0 / pd, 0.0);
        }
        Ok(OrthonormalBump {
            grid,
            period,
            profile,
            m0: SpectralField::from_coef(grid, c0, true)?,
            m: SpectralField::from_coef(grid, c, true)?,
        })
    }

    pub fn cells_per_unit(&self) -> usize {
        self.grid.n / self.period
    }

    /// max over grid frequencies in the central cell of |Σ_l |m̂(ξ + 2πl)|² − 1|.
    pub fn periodization_residual(&self) -> f64 {
        let g = self.grid;
        let p = self.period as i64;
        let pd = libm::pow(self.period as f64, g.dim as f64);
        let half = (g.n / 2) as i64;
        let reach = half / p + 1;
        let mut worst: f64 = 0.0;
        for i in 0..g.len() {
            let k = g.multi_index(i);
            if (0..g.dim).any(|a| k[a] < -p / 2 || k[a] >= p - p / 2) {
                continue;
            }
            let mut sum = 0.0;
            let mut l = [-reach; 3];
            for a in g.dim..3 {
                l[a] = 0;
            }
            loop {
                let mut kk = [0i64; 3];
                let mut inside = true;
                for a in 0..g.dim {
                    kk[a] = k[a] + p * l[a];
                    inside &= kk[a] >= -half && kk[a] < half;
                }
                if inside {
                    if let Some(idx) = g.linear_of_freq(kk) {
                        sum += (self.m.coef()[idx] * pd).norm_sqr();
                    }
                }
                if !odometer(&mut l, g.dim, reach) {
                    break;
                }
            }
            worst = worst.max(libm::fabs(sum - 1.0));
        }
        worst
    }

    /// max |⟨m(· − l), m(· − l′)⟩ − δ_{ll′}| over pairs from `shifts`, on grid points.
    pub fn gram_residual(&self, shifts: &[[i64; 3]]) -> f64 {
        let g = self.grid;
        let cpu = self.cells_per_unit() as i64;
        let vals: Vec<f64> = self.m.to_physical().iter().map(|v| v.re).collect();
        let shifted: Vec<Vec<f64>> = shifts
            .iter()
            .map(|l| {
                let mut out = vec![0.0; g.len()];
                for (i, o) in out.iter_mut().enumerate() {
                    let p = g.point_index(i);
                    let mut q = [0usize; 3];
                    for a in 0..g.dim {
                        q[a] = (p[a] as i64 - l[a] * cpu).rem_euclid(g.n as i64) as usize;
                    }
                    *o = vals[g.linear(q)];
                }
                out
            })
            .collect();
        let cell = g.cell_volume();
        let mut worst: f64 = 0.0;
        for a in 0..shifts.len() {
            for b in a..shifts.len() {
                let ip: f64 = shifted[a]
                    .iter()
                    .zip(&shifted[b])
                    .map(|(x, y)| x * y)
                    .sum::<f64>()
                    * cell;
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max(libm::fabs(ip - want));
            }
        }
        worst
    }
}

/// Advances a multi-index over [−r, r]^dim; false after the last one.
fn odometer(l: &mut [i64; 3], dim: usize, r: i64) -> bool {
    for a in 0..dim {
        if l[a] < r {
            l[a] += 1;
            return true;
        }
        l[a] = -r;
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SignPattern {
    AllPlus,
    Random(u64),
}

/// Which translate family carries the lacunary coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum BumpBasis {
    /// m = e^Δ m₀, orthonormal and localised at unit scale
    #[default]
    Smoothed,
    /// m₀ itself; its spatial spread is comparable to a 64-unit box
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LacunaryParams {
    pub x1: f64,
    pub alpha: f64,
    pub shells: Vec<i32>,
    pub basis: BumpBasis,
}

impl LacunaryParams {
    pub fn new(x1: f64, alpha: f64, shells: Vec<i32>) -> Self {
        LacunaryParams {
            x1,
            alpha,
            shells,
            basis: BumpBasis::Smoothed,
        }
    }
}

/// Lattice sites of shell j: l₁ ∈ 2^j x₁ ± α2^j/√2, |l′_i| ≤ α2^j/√2.
pub fn shell_sites(dim: usize, j: i32, x1: f64, alpha: f64) -> Vec<[i64; 3]> {
    let w = alpha * libm::ldexp(1.0, j) / core::f64::consts::SQRT_2;
    let c = x1 * libm::ldexp(1.0, j);
    let (a1, b1) = (libm::ceil(c - w) as i64, libm::floor(c + w) as i64);
    let r = libm::floor(w) as i64;
    let mut out = Vec::new();
    for l1 in a1..=b1 {
        let mut rest = [-r; 3];
        for a in dim..3 {
            rest[a] = 0;
        }
        rest[0] = 0;
        loop {
            let mut site = [0i64; 3];
            site[0] = l1;
            let mut ok = true;
            let mut r2 = 0.0;
            for a in 1..dim {
                site[a] = rest[a];
                r2 += (rest[a] * rest[a]) as f64;
            }
            if r2 > w * w {
                ok = false;
            }
            if ok {
                out.push(site);
            }
            // advance over axes 1..dim
            let mut moved = false;
            for a in 1..dim {
                if rest[a] < r {
                    rest[a] += 1;
                    moved = true;
                    break;
                }
                rest[a] = -r;
            }
            if !moved {
                break;
            }
        }
    }
    out
}

/// a = Σ_l ε_l c_l b(· − l) with c_l = δ_j on shell j and b the chosen bump.
pub fn lacunary_field(
    delta: &DeltaSequence,
    params: &LacunaryParams,
    signs: SignPattern,
    bump: &OrthonormalBump,
) -> Result<SpectralField> {
    let g = bump.grid;
    let p = bump.period as i64;
    let cpu = bump.cells_per_unit() as i64;
    let mut comb = vec![ZERO; g.len()];
    let mut rng = match signs {
        SignPattern::Random(s) => Some(LabRng::new(s, 0x1ac)),
        SignPattern::AllPlus => None,
    };
    let mut any = false;
    for &j in &params.shells {
        let c = libm::sqrt(delta.delta2_at(j));
        for site in shell_sites(g.dim, j, params.x1, params.alpha) {
            if site[0] < 0 || site[0] >= p || (1..g.dim).any(|a| 2 * site[a].abs() >= p) {
                return Err(LabError::Range(alloc::format!(
                    "shell {j} overflows the box"
                )));
            }
            let eps = rng.as_mut().map_or(1.0, |r| r.sign());
            let mut q = [0usize; 3];
            for a in 0..g.dim {
                q[a] = (site[a] * cpu).rem_euclid(g.n as i64) as usize;
            }
            comb[g.linear(q)] += Complex64::new(eps * c, 0.0);
            any |= c != 0.0;
        }
    }
    if !any {
        return Ok(SpectralField::zeros(g));
    }
    let total = g.len() as f64;
    let comb = SpectralField::from_physical(g, comb, false)?;
    let base = match params.basis {
        BumpBasis::Smoothed => &bump.m,
        BumpBasis::Raw => &bump.m0,
    };
    let coef: Vec<Complex64> = comb
        .coef()
        .iter()
        .zip(base.coef())
        .map(|(s, m)| s * total * m)
        .collect();
    SpectralField::from_coef(g, coef, true)
}

/// max over centres and k with 2^k ≤ half the box side of avg_{B(y,2^k)} |a|² / η_k².
pub fn ball_criterion(a: &SpectralField, eta: &EtaSequence) -> Result<f64> {
    let g = a.grid;
    let sq: Vec<f64> = a.to_physical().iter().map(|v| v.norm_sqr()).collect();
    if sq.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let half = PI * g.l;
    let mut best: f64 = 0.0;
    let mut k = 0;
    while libm::ldexp(1.0, k) <= half * (1.0 + 1e-12) {
        let e = eta.value(k);
        if !(e > 0.0) {
            return Err(LabError::Precondition(
                "eta vanishes inside the radius range".into(),
            ));
        }
        let avg = ball_averages(&g, &sq, libm::ldexp(1.0, k));
        let m = avg.iter().cloned().fold(0.0, f64::max);
        best = best.max(m / (e * e));
        k += 1;
    }
    Ok(best)
}

/// θ(x) = φ(x₁)ψ′(x′) with Gaussian factors of the given widths; ∫φ = 1 and ψ′(0) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelProfile {
    pub phi_width: f64,
    pub psi_width: f64,
}

impl Default for KernelProfile {
    fn default() -> Self {
        KernelProfile {
            phi_width: 1.0,
            psi_width: 1.0,
        }
    }
}

impl KernelProfile {
    pub fn phi(&self, v: f64) -> f64 {
        let s = self.phi_width;
        libm::exp(-0.5 * v * v / (s * s)) / (s * libm::sqrt(2.0 * PI))
    }

    pub fn psi(&self, y: f64, z: f64) -> f64 {
        let s = self.psi_width;
        libm::exp(-0.5 * (y * y + z * z) / (s * s))
    }

    pub fn theta(&self, x: [f64; 3]) -> f64 {
        self.phi(x[0]) * self.psi(x[1], x[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub x1: f64,
    pub l: [f64; 3],
    /// ∫₀¹ θ(x − τl) τ² dτ
    pub integral: f64,
    pub ratio: f64,
    pub sign: f64,
    pub distance: f64,
    pub in_cone: bool,
}

/// Distance from p to the segment [0, l].
pub fn segment_distance(p: [f64; 3], l: [f64; 3]) -> f64 {
    let ll: f64 = l.iter().map(|v| v * v).sum();
    let t = if ll == 0.0 {
        0.0
    } else {
        (p[0] * l[0] + p[1] * l[1] + p[2] * l[2]) / ll
    };
    let t = t.clamp(0.0, 1.0);
    let d2: f64 = (0..3).map(|a| (p[a] - t * l[a]) * (p[a] - t * l[a])).sum();
    libm::sqrt(d2)
}

pub fn kernel_lower_bound(
    x1: f64,
    l: [f64; 3],
    profile: &KernelProfile,
    alpha: f64,
) -> Result<KernelValue> {
    if !(x1 > 0.0) || !(l[0] > 0.0) {
        return arg("need x1 > 0 and l1 > 0");
    }
    let x = [x1, 0.0, 0.0];
    let panels = 512;
    let (s, w) = gauss_legendre_on(8, 0.0, 1.0 / panels as f64);
    let mut integral = 0.0;
    for p in 0..panels {
        let off = p as f64 / panels as f64;
        for (si, wi) in s.iter().zip(&w) {
            let tau = off + si;
            let y = [x[0] - tau * l[0], x[1] - tau * l[1], x[2] - tau * l[2]];
            integral += wi * profile.theta(y) * tau * tau;
        }
    }
    let distance = segment_distance(x, l);
    let scale = x1 * x1 / (l[0] * l[0] * l[0]);
    Ok(KernelValue {
        x1,
        l,
        integral,
        ratio: libm::fabs(integral) / scale,
        sign: if integral >= 0.0 { 1.0 } else { -1.0 },
        distance,
        in_cone: l[0] >= 4.0 * x1 && distance <= alpha,
    })
}

/// The 20-point cone sample: x₁ ∈ {2, 3, 4, 5}, l₁ ∈ {4, 6, 8, 12, 16}·x₁, small transverse l′.
pub fn cone_sample() -> Vec<(f64, [f64; 3])> {
    let mut out = Vec::new();
    let trans = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-1.0, 1.0]];
    for (a, x1) in [2.0, 3.0, 4.0, 5.0].iter().enumerate() {
        for (b, m) in [4.0, 6.0, 8.0, 12.0, 16.0].iter().enumerate() {
            let t = trans[(a + b) % trans.len()];
            out.push((*x1, [m * x1, t[0], t[1]]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_sequence_harmonic() {
        let eta = EtaSequence::from_fn(0, 40, |n| 1.0 / libm::sqrt((n + 1) as f64)).unwrap();
        let d = delta_sequence(&eta, 4..=40).unwrap();
        assert!((d.delta2_at(4) - 0.2).abs() < 1e-15);
        for j in 5..=40 {
            let want = 1.0 / (j + 1) as f64 - 1.0 / (8 * j) as f64;
            assert!((d.delta2_at(j) - want).abs() < 1e-14);
        }
        assert!(d.slack.iter().all(|s| *s >= -1e-15));
        assert!(d.hypothesis_divergent);
        for j in 4..=40 {
            assert!((d.weighted_sum(j) / d.sigma_at(j) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_sequence_geometric_fails_hypothesis() {
        let eta = EtaSequence::from_fn(0, 40, |n| libm::ldexp(1.0, -n)).unwrap();
        let d = delta_sequence(&eta, 4..=40).unwrap();
        assert!(!d.hypothesis_divergent);
        assert!((d.sigma_at(10) - 1024.0).abs() < 1e-9);
        assert!(d.slack.iter().all(|s| *s >= -1e-15));
    }

    #[test]
    fn delta_sequence_rejects_increasing() {
        let eta = EtaSequence::from_fn(0, 10, |n| (n + 1) as f64).unwrap();
        assert!(matches!(
            delta_sequence(&eta, 4..=10),
            Err(LabError::Precondition(_))
        ));
    }

    #[test]
    fn kernel_l_cubed_law() {
        let p = KernelProfile::default();
        let a = kernel_lower_bound(3.0, [24.0, 0.0, 0.0], &p, 1.0).unwrap();
        let b = kernel_lower_bound(3.0, [48.0, 0.0, 0.0], &p, 1.0).unwrap();
        let r = a.integral / b.integral;
        assert!(r > 8.0 / 1.5 && r < 8.0 * 1.5, "{r}");
        assert!(a.in_cone && a.sign > 0.0);
        let far = kernel_lower_bound(3.0, [24.0, 10.0, 0.0], &p, 1.0).unwrap();
        assert!(!far.in_cone);
    }

    #[test]
    fn shell_sites_in_window() {
        let s = shell_sites(2, 4, 1.5, 0.5);
        let w = 0.5 * 16.0 / core::f64::consts::SQRT_2;
        assert!(!s.is_empty());
        for v in &s {
            assert!((v[0] as f64 - 24.0).abs() <= w && (v[1] as f64).abs() <= w && v[2] == 0);
        }
    }

    #[test]
    fn bump_small_2d() {
        let b = OrthonormalBump::new(2, 64, 16).unwrap();
        assert!(b.periodization_residual() < 1e-10);
        let shifts = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [3, 5, 0]];
        assert!(b.gram_residual(&shifts) < 1e-8);
    }
}
