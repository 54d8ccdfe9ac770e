//! Fixed-point solution of u = Su₀ + B(u,u): explicit multilinear series, Picard
//! iteration, local-in-time solve and smoothing diagnostics.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::duhamel::{locate, saturating_trajectory, Trajectory};
use crate::error::{arg, LabError, Result};
use crate::field::{heat, SpectralField};
use crate::grid::Grid;
use crate::norms::{time_weighted_norm, SpaceSpec};
use crate::product::product;
use crate::quad::{gauss_legendre_on, log2_slope};
use crate::rng::LabRng;
use crate::symbol::{apply_symbol, SymbolSpec};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// c_k = (2k − 2)! / (k! (k − 1)!).
pub fn catalan(k: u32) -> Result<BigUint> {
    if k == 0 {
        return arg("Catalan index starts at 1");
    }
    let mut num = BigUint::one();
    for i in (k + 1)..=(2 * k - 2) {
        num *= i;
    }
    let mut den = BigUint::one();
    for i in 2..=(k - 1) {
        den *= i;
    }
    Ok(num / den)
}

/// c_1..=c_K from the quadratic recursion c_k = Σ_{l=1}^{k−1} c_l c_{k−l}.
pub fn catalan_recursive(kmax: u32) -> Vec<BigUint> {
    let mut c: Vec<BigUint> = vec![BigUint::zero(), BigUint::one()];
    for k in 2..=kmax as usize {
        let mut s = BigUint::zero();
        for l in 1..k {
            s += &c[l] * &c[k - l];
        }
        c.push(s);
    }
    c.into_iter().skip(1).collect()
}

/// ¼ − Σ_{k=2}^{K} c_k 4^{−k}, exact up to the final conversion.
pub fn catalan_quarter_gap(kmax: u32) -> Result<f64> {
    if kmax < 2 {
        return arg("partial sum starts at k = 2");
    }
    // 4^K(¼ − S_K) = 4^{K−1} − Σ c_k 4^{K−k}
    let mut acc = BigUint::zero();
    let mut c = BigUint::one(); // c_1
    for k in 1..kmax {
        // c_{k+1} = c_k · 2(2k − 1) / (k + 1)
        c = c * (2 * (2 * k - 1)) / (k + 1);
        acc += &c << (2 * (kmax - k - 1)) as usize;
    }
    let total = BigUint::one() << (2 * (kmax - 1)) as usize;
    if acc > total {
        return Err(LabError::Precondition(
            "partial sum exceeded one quarter".into(),
        ));
    }
    Ok(ratio_to_f64(&(total - acc), 2 * kmax as u64))
}

/// n / 2^shift as f64.
fn ratio_to_f64(n: &BigUint, shift: u64) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return 0.0;
    }
    let drop = bits.saturating_sub(60);
    let top = (n >> drop as usize).to_u64().expect("fits") as f64;
    libm::ldexp(top, drop as i32 - shift as i32)
}

/// (1 − √(1 − 4‖B‖‖a‖)) / (2‖B‖).
pub fn series_bound(norm_b: f64, norm_a: f64) -> Result<f64> {
    if !(norm_b > 0.0) || !(norm_a >= 0.0) {
        return arg("need ||B|| > 0 and ||a|| >= 0");
    }
    let m = 4.0 * norm_b * norm_a;
    if m > 1.0 {
        return Err(LabError::Precondition("4||B|| ||a|| exceeds 1".into()));
    }
    // rationalised form, exact at a = 0
    Ok(2.0 * norm_a / (1.0 + libm::sqrt(1.0 - m)))
}

/// Σ_{k ≤ K} c_k ‖B‖^{k−1} ‖a‖^k.
pub fn series_bound_truncated(norm_b: f64, norm_a: f64, kmax: u32) -> f64 {
    let z = norm_b * norm_a;
    let mut ck = 1.0;
    let mut zk = z;
    let mut sum = 0.0;
    for k in 1..=kmax {
        sum += ck * zk;
        ck *= 2.0 * (2 * k - 1) as f64 / (k + 1) as f64;
        zk *= z;
    }
    sum / norm_b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: Grid,
    pub base: SpaceSpec,
    /// Exponent N of the time weight (1 + 2^j√t)^N.
    pub n_exp: u32,
    pub k_max: u32,
    pub tol: f64,
    pub max_iter: usize,
    pub quad_nodes: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub samples_per_octave: usize,
    pub probes: usize,
    pub seed: u64,
    pub sym: SymbolSpec,
    /// Run past a margin above 1 and only report.
    pub allow_large: bool,
}

impl SolverConfig {
    pub fn new(grid: Grid) -> Self {
        let (lo, hi) = (grid.j_min(), grid.j_max());
        SolverConfig {
            grid,
            base: SpaceSpec::l3(),
            n_exp: 4,
            k_max: 12,
            tol: 1e-8,
            max_iter: 60,
            quad_nodes: 32,
            t_min: libm::ldexp(1.0, -2 * (hi + 1)),
            t_max: libm::ldexp(1.0, -2 * (lo - 2)),
            samples_per_octave: 2,
            probes: 32,
            seed: 1,
            sym: SymbolSpec::Scalar1,
            allow_large: false,
        }
    }

    pub fn space(&self) -> SpaceSpec {
        SpaceSpec::cn(self.base.clone(), self.n_exp)
    }
}

/// Sample times {0} ∪ {t_min 2^{i/k}} up to t_max.
pub fn time_grid(t_min: f64, t_max: f64, per_octave: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max >= t_min) || per_octave == 0 {
        return arg("time grid needs 0 < t_min <= t_max and a positive density");
    }
    let mut v = vec![0.0];
    let mut i = 0;
    loop {
        let t = t_min * libm::exp2(i as f64 / per_octave as f64);
        if t > t_max * (1.0 + 1e-12) {
            break;
        }
        v.push(t);
        i += 1;
    }
    Ok(v)
}

/// Trajectory on a fixed sample grid; index 0 is t = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub times: Vec<f64>,
    pub fields: Vec<SpectralField>,
}

impl Path {
    pub fn zeros(grid: Grid, times: &[f64]) -> Self {
        Path {
            times: times.to_vec(),
            fields: times.iter().map(|_| SpectralField::zeros(grid)).collect(),
        }
    }

    pub fn from_trajectory(tr: &Trajectory, times: &[f64]) -> Result<Self> {
        Ok(Path {
            times: times.to_vec(),
            fields: times.iter().map(|t| tr.eval(*t)).collect::<Result<_>>()?,
        })
    }

    pub fn heat(u0: &SpectralField, times: &[f64]) -> Result<Self> {
        Ok(Path {
            times: times.to_vec(),
            fields: times.iter().map(|t| heat(u0, *t)).collect::<Result<_>>()?,
        })
    }

    pub fn grid(&self) -> Grid {
        self.fields[0].grid
    }

    pub fn trajectory(&self) -> Trajectory {
        Trajectory::Sampled {
            times: self.times.clone(),
            fields: self.fields.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.fields.iter().all(|f| f.is_zero())
    }

    pub fn add(&self, o: &Path) -> Result<Path> {
        self.axpy(1.0, o)
    }

    pub fn sub(&self, o: &Path) -> Result<Path> {
        self.axpy(-1.0, o)
    }

    /// self + s·o
    pub fn axpy(&self, s: f64, o: &Path) -> Result<Path> {
        if self.times != o.times {
            return Err(LabError::Shape("paths on different time grids".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.fields.iter_mut().zip(&o.fields) {
            a.axpy(Complex64::new(s, 0.0), b)?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Path {
        Path {
            times: self.times.clone(),
            fields: self.fields.iter().map(|f| f.scale_real(s)).collect(),
        }
    }

    /// Restriction to samples t ≤ t_end.
    pub fn truncate(&self, t_end: f64) -> Path {
        let n = self
            .times
            .iter()
            .take_while(|t| **t <= t_end * (1.0 + 1e-12))
            .count();
        Path {
            times: self.times[..n].to_vec(),
            fields: self.fields[..n].to_vec(),
        }
    }
}

/// The 𝓕-norm: sup over sample times t > 0 of the time-weighted band norm.
pub fn path_norm(p: &Path, space: &SpaceSpec) -> Result<f64> {
    let mut best: f64 = 0.0;
    for (t, f) in p.times.iter().zip(&p.fields).skip(1) {
        best = best.max(time_weighted_norm(f, *t, space)?);
    }
    Ok(best)
}

/// Discrete B on a sample grid: Gauss–Legendre in two graded clusters per sample
/// time, fields interpolated linearly in √τ, products projected onto the grid.
#[derive(Debug, Clone)]
pub struct DiscreteB {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub sym: SymbolSpec,
    /// per sample i ≥ 1: (interval, α, weight, t_i − τ)
    rules: Vec<Vec<(usize, f64, f64, f64)>>,
    xi2: Vec<f64>,
}

impl DiscreteB {
    pub fn new(grid: Grid, times: &[f64], nodes: usize, sym: SymbolSpec) -> Result<Self> {
        if sym.is_vector() {
            return Err(LabError::Shape(
                "vector symbol applied to a scalar field".into(),
            ));
        }
        if nodes < 2 || nodes % 2 == 1 {
            return arg("node count must be even and at least 2");
        }
        let (s, w) = gauss_legendre_on(nodes / 2, 0.0, core::f64::consts::FRAC_1_SQRT_2);
        let mut rules = vec![Vec::new()];
        for &t in times.iter().skip(1) {
            let mut r = Vec::with_capacity(nodes);
            for (si, wi) in s.iter().zip(&w) {
                let tau = t * si * si;
                let (a, al) = locate(times, tau);
                r.push((a, al, 2.0 * t * si * wi, t - tau));
            }
            for (ri, wi) in s.iter().zip(&w) {
                let tau = t * (1.0 - ri * ri);
                let (a, al) = locate(times, tau);
                r.push((a, al, 2.0 * t * ri * wi, t * ri * ri));
            }
            rules.push(r);
        }
        Ok(DiscreteB {
            grid,
            times: times.to_vec(),
            sym,
            rules,
            xi2: grid.xi2_table(),
        })
    }

    /// B(u, v) sampled on the same grid.
    pub fn apply(&self, u: &Path, v: &Path) -> Result<Path> {
        if u.times != self.times || v.times != self.times {
            return Err(LabError::Shape(
                "path not on the operator's time grid".into(),
            ));
        }
        let m = self.times.len();
        if u.is_zero() || v.is_zero() {
            return Ok(Path::zeros(self.grid, &self.times));
        }
        let diag: Vec<SpectralField> = (0..m)
            .map(|a| product(&u.fields[a], &v.fields[a]))
            .collect::<Result<_>>()?;
        let mut cross: Vec<SpectralField> = Vec::with_capacity(m.saturating_sub(1));
        for a in 0..m.saturating_sub(1) {
            let mut c = product(&u.fields[a], &v.fields[a + 1])?;
            c.axpy(ONE, &product(&u.fields[a + 1], &v.fields[a])?)?;
            cross.push(c);
        }
        let mut out = vec![SpectralField::zeros(self.grid)];
        let len = self.grid.len();
        for rule in self.rules.iter().skip(1) {
            let mut acc = vec![ZERO; len];
            for &(a, al, w, dt) in rule {
                let be = 1.0 - al;
                let (c0, c1, c2) = (w * al * al, w * al * be, w * be * be);
                let pa = diag[a].coef();
                let has_next = be != 0.0;
                for i in 0..len {
                    let mut s = pa[i] * c0;
                    if has_next {
                        s += cross[a].coef()[i] * c1 + diag[a + 1].coef()[i] * c2;
                    }
                    if s != ZERO {
                        acc[i] += s * libm::exp(-dt * self.xi2[i]);
                    }
                }
            }
            let f = SpectralField::from_coef(self.grid, acc, true)?;
            out.push(apply_symbol(&f, self.sym)?);
        }
        Ok(Path {
            times: self.times.clone(),
            fields: out,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub norm_b: f64,
    pub norm_a: f64,
    pub margin: f64,
    pub uniqueness_radius: f64,
    pub term_norms: Vec<f64>,
    pub catalan_bounds: Vec<f64>,
    /// ‖T_k‖‖B‖k^{3/2}/(4‖B‖‖a‖)^k per k ≥ 2
    pub fitted_constants: Vec<f64>,
    pub picard_distances: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub final_residual: f64,
    pub solution_norm: f64,
    pub in_uniqueness_ball: bool,
    pub refused: bool,
    pub note: Option<alloc::string::String>,
}

impl SolverReport {
    fn new(norm_b: f64, norm_a: f64) -> Self {
        SolverReport {
            norm_b,
            norm_a,
            margin: 4.0 * norm_b * norm_a,
            uniqueness_radius: 1.0 / (2.0 * norm_b),
            term_norms: Vec::new(),
            catalan_bounds: Vec::new(),
            fitted_constants: Vec::new(),
            picard_distances: Vec::new(),
            iterations: 0,
            converged: false,
            final_residual: f64::NAN,
            solution_norm: f64::NAN,
            in_uniqueness_ball: false,
            refused: false,
            note: None,
        }
    }
}

/// Operator, time grid, datum trajectory a = Su₀ and the measured ‖B‖.
#[derive(Debug, Clone)]
pub struct Problem {
    pub cfg: SolverConfig,
    pub op: DiscreteB,
    pub a: Path,
    pub norm_b: f64,
    pub norm_a: f64,
}

impl Problem {
    pub fn new(u0: &SpectralField, cfg: &SolverConfig) -> Result<Self> {
        cfg.grid.same_as(&u0.grid)?;
        cfg.space().validate()?;
        let times = time_grid(cfg.t_min, cfg.t_max, cfg.samples_per_octave)?;
        let op = DiscreteB::new(cfg.grid, &times, cfg.quad_nodes, cfg.sym)?;
        let a = Path::heat(u0, &times)?;
        let space = cfg.space();
        let norm_a = path_norm(&a, &space)?;
        let norm_b = measure_norm_b(&op, &a, &space, cfg.probes, cfg.seed)?;
        Ok(Problem {
            cfg: cfg.clone(),
            op,
            a,
            norm_b,
            norm_a,
        })
    }

    pub fn norm(&self, p: &Path) -> Result<f64> {
        path_norm(p, &self.cfg.space())
    }

    pub fn b(&self, u: &Path, v: &Path) -> Result<Path> {
        self.op.apply(u, v)
    }

    /// ‖u − a − B(u,u)‖.
    pub fn residual(&self, u: &Path) -> Result<f64> {
        let r = u.sub(&self.a)?.sub(&self.b(u, u)?)?;
        self.norm(&r)
    }

    fn report(&self) -> SolverReport {
        SolverReport::new(self.norm_b, self.norm_a)
    }

    fn refuse(&self, mut rep: SolverReport) -> Result<SolverReport> {
        if rep.margin > 1.0 && !self.cfg.allow_large {
            rep.refused = true;
            rep.note = Some(alloc::format!(
                "smallness margin {:.4} exceeds 1",
                rep.margin
            ));
            return Err(LabError::Precondition(alloc::format!(
                "smallness margin 4||B|| ||a|| = {:.4} exceeds 1",
                rep.margin
            )));
        }
        Ok(rep)
    }
}

/// max over probe pairs of ‖B(u,v)‖/(‖u‖‖v‖); the first pair is (a, a), the others are
/// heat flows of random data spread over the resolvable bands.
pub fn measure_norm_b(
    op: &DiscreteB,
    a: &Path,
    space: &SpaceSpec,
    probes: usize,
    seed: u64,
) -> Result<f64> {
    let grid = op.grid;
    let mut best: f64 = 0.0;
    let ratio = |u: &Path, v: &Path| -> Result<f64> {
        let (nu, nv) = (path_norm(u, space)?, path_norm(v, space)?);
        if nu == 0.0 || nv == 0.0 {
            return Ok(0.0);
        }
        Ok(path_norm(&op.apply(u, v)?, space)? / (nu * nv))
    };
    if probes == 0 {
        return arg("at least one probe is required");
    }
    if !a.is_zero() {
        best = best.max(ratio(a, a)?);
    }
    let (lo, hi) = (grid.j_min(), grid.j_max());
    for p in 1..probes.max(2) {
        let mut rng = LabRng::new(seed, 0x5000 + p as u64);
        let j1 = lo + (rng.next_u64() % (hi - lo + 1) as u64) as i32;
        let j2 = lo + (rng.next_u64() % (hi - lo + 1) as u64) as i32;
        let f = rng.bandlimited_field(grid, lo.min(j1), j1);
        let g = rng.bandlimited_field(grid, lo.min(j2), j2);
        let u = Path::heat(&f, &op.times)?;
        let v = Path::heat(&g, &op.times)?;
        best = best.max(ratio(&u, &v)?);
    }
    Ok(best)
}

/// T_1 = a, T_k = Σ_{l=1}^{k−1} B(T_l, T_{k−l}).
pub fn tk_series(u0: &SpectralField, cfg: &SolverConfig) -> Result<(Vec<Path>, SolverReport)> {
    let pb = Problem::new(u0, cfg)?;
    tk_series_in(&pb)
}

pub fn tk_series_in(pb: &Problem) -> Result<(Vec<Path>, SolverReport)> {
    let mut rep = pb.refuse(pb.report())?;
    let mut terms: Vec<Path> = vec![pb.a.clone()];
    for k in 2..=pb.cfg.k_max as usize {
        let mut acc = Path::zeros(pb.cfg.grid, &pb.a.times);
        for l in 1..=k / 2 {
            let b = pb.b(&terms[l - 1], &terms[k - l - 1])?;
            let w = if 2 * l == k { 1.0 } else { 2.0 };
            acc = acc.axpy(w, &b)?;
        }
        terms.push(acc);
    }
    let (nb, na) = (pb.norm_b, pb.norm_a);
    for (i, t) in terms.iter().enumerate() {
        let k = (i + 1) as f64;
        let nt = pb.norm(t)?;
        rep.term_norms.push(nt);
        let geo = libm::pow(4.0 * nb * na, k);
        // c_k ≤ 4^k k^{−3/2}/(4√π); the envelope is stated with C = 1
        rep.catalan_bounds.push(libm::pow(k, -1.5) * geo / nb);
        if i >= 1 && geo > 0.0 {
            rep.fitted_constants.push(nt * nb * libm::pow(k, 1.5) / geo);
        }
    }
    rep.converged = true;
    Ok((terms, rep))
}

/// Σ_k T_k.
pub fn series_sum(terms: &[Path]) -> Result<Path> {
    let mut acc = terms[0].clone();
    for t in &terms[1..] {
        acc = acc.add(t)?;
    }
    Ok(acc)
}

/// Initial iterate for Picard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PicardStart {
    Zero,
    Datum,
    /// c·a
    Scaled(f64),
}

/// u_{m+1} = a + B(u_m, u_m) until the 𝓕-distance drops below tol.
pub fn picard_solve(u0: &SpectralField, cfg: &SolverConfig) -> Result<(Path, SolverReport)> {
    let pb = Problem::new(u0, cfg)?;
    picard_in(&pb, PicardStart::Datum)
}

pub fn picard_in(pb: &Problem, start: PicardStart) -> Result<(Path, SolverReport)> {
    let mut rep = pb.refuse(pb.report())?;
    let mut u = match start {
        PicardStart::Zero => Path::zeros(pb.cfg.grid, &pb.a.times),
        PicardStart::Datum => pb.a.clone(),
        PicardStart::Scaled(c) => pb.a.scale(c),
    };
    for it in 1..=pb.cfg.max_iter {
        let next = pb.a.add(&pb.b(&u, &u)?)?;
        let d = pb.norm(&next.sub(&u)?)?;
        rep.picard_distances.push(d);
        u = next;
        rep.iterations = it;
        if !d.is_finite() {
            break;
        }
        if d < pb.cfg.tol {
            rep.converged = true;
            break;
        }
    }
    if !rep.converged {
        rep.note = Some("no convergence within the iteration budget".into());
    }
    rep.final_residual = pb.residual(&u)?;
    rep.solution_norm = pb.norm(&u)?;
    rep.in_uniqueness_ball = rep.solution_norm <= rep.uniqueness_radius + pb.cfg.tol;
    Ok((u, rep))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalReport {
    pub t_end: f64,
    /// (T', measured ‖L‖ on (0, T']) for T' = T, T/4, T/16
    pub l_norms: Vec<(f64, f64)>,
    /// sup over j ≥ j_hi of ‖Δ_j u₀‖_E relative to the largest band norm
    pub tail_ratio: f64,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    pub distances: Vec<f64>,
    pub note: Option<alloc::string::String>,
}

/// ‖v ↦ 2B(a, v)‖ on probe paths restricted to (0, T]: saturating band weights and heat flows.
pub fn measure_l_norm(pb: &Problem, t_end: f64, probes: usize) -> Result<f64> {
    let a = pb.a.truncate(t_end);
    let op = DiscreteB::new(pb.cfg.grid, &a.times, pb.cfg.quad_nodes, pb.cfg.sym)?;
    let space = pb.cfg.space();
    let grid = pb.cfg.grid;
    let (lo, hi) = (grid.j_min(), grid.j_max());
    let mut best: f64 = 0.0;
    for p in 0..probes.max(2) {
        let mut rng = LabRng::new(pb.cfg.seed, 0x7000 + p as u64);
        let f = rng.bandlimited_field(grid, lo, hi);
        let v = if p % 2 == 0 {
            Path::from_trajectory(
                &saturating_trajectory(&f, &pb.cfg.base, pb.cfg.n_exp)?,
                &a.times,
            )?
        } else {
            Path::heat(&f, &a.times)?
        };
        let nv = path_norm(&v, &space)?;
        if nv > 0.0 {
            best = best.max(2.0 * path_norm(&op.apply(&a, &v)?, &space)? / nv);
        }
    }
    Ok(best)
}

/// Solves v = B(a,a) + 2B(a,v) + B(v,v) on (0, T] and returns u = a + v.
pub fn local_solve(
    u0: &SpectralField,
    t_end: f64,
    cfg: &SolverConfig,
) -> Result<(Path, LocalReport)> {
    if !(t_end > cfg.t_min) {
        return arg("T must exceed the smallest sample time");
    }
    let mut c = cfg.clone();
    c.t_max = t_end;
    let pb = Problem::new(u0, &c)?;
    let band = crate::norms::band_norms(u0, &cfg.base)?;
    let top = band.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    let j_hi = cfg.grid.j_max();
    let tail = band
        .iter()
        .filter(|(j, _)| *j >= j_hi)
        .map(|(_, v)| *v)
        .fold(0.0, f64::max);
    let mut rep = LocalReport {
        t_end,
        l_norms: Vec::new(),
        tail_ratio: if top > 0.0 { tail / top } else { 0.0 },
        iterations: 0,
        converged: false,
        residual: f64::NAN,
        distances: Vec::new(),
        note: None,
    };
    for s in [1.0, 0.25, 0.0625] {
        let te = t_end * s;
        if te >= cfg.t_min {
            rep.l_norms.push((te, measure_l_norm(&pb, te, 8)?));
        }
    }
    let times = pb.a.times.clone();
    let mut v = Path::zeros(c.grid, &times);
    if pb.a.is_zero() {
        rep.converged = true;
        rep.residual = 0.0;
        return Ok((pb.a.clone(), rep));
    }
    if rep.l_norms[0].1 >= 1.0 {
        rep.note = Some(alloc::format!(
            "||L|| = {:.3} >= 1 at T; try a smaller T",
            rep.l_norms[0].1
        ));
    }
    let baa = pb.b(&pb.a, &pb.a)?;
    for it in 1..=c.max_iter {
        let next = baa.axpy(2.0, &pb.b(&pb.a, &v)?)?.add(&pb.b(&v, &v)?)?;
        let d = pb.norm(&next.sub(&v)?)?;
        rep.distances.push(d);
        v = next;
        rep.iterations = it;
        if !d.is_finite() {
            break;
        }
        if d < c.tol {
            rep.converged = true;
            break;
        }
    }
    let u = pb.a.add(&v)?;
    rep.residual = pb.residual(&u)?;
    Ok((u, rep))
}

/// Real datum with coefficients amp·|ξ|^{1−d}: the grid analogue of amp/|x|, up to a constant.
pub fn critical_datum(grid: Grid, amp: f64) -> SpectralField {
    let half = (grid.n / 2) as i64;
    let xi2 = grid.xi2_table();
    let mut c = vec![ZERO; grid.len()];
    for (i, v) in c.iter_mut().enumerate() {
        let k = grid.multi_index(i);
        if k.iter().take(grid.dim).any(|x| *x == -half) {
            continue;
        }
        let r = libm::sqrt(xi2[i]);
        if r > 0.0 {
            *v = Complex64::new(amp * libm::pow(r, 1.0 - grid.dim as f64), 0.0);
        }
    }
    SpectralField::from_coef(grid, c, true).expect("grid-sized")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingRow {
    pub order: [u32; 3],
    pub times: Vec<f64>,
    pub sup_values: Vec<f64>,
    pub slope: f64,
    pub expected: f64,
}

/// sup_x |D^α u(t, x)| over the sample times in [t_lo, t_hi] and its log-log slope.
pub fn smoothing_check(
    u: &Path,
    orders: &[[u32; 3]],
    t_lo: f64,
    t_hi: f64,
) -> Result<Vec<SmoothingRow>> {
    let grid = u.grid();
    let mut out = Vec::new();
    for ord in orders {
        let mut times = Vec::new();
        let mut sups = Vec::new();
        for (t, f) in u.times.iter().zip(&u.fields) {
            if *t < t_lo || *t > t_hi || *t == 0.0 {
                continue;
            }
            let mut d = f.clone();
            for (i, c) in d.coef_mut().iter_mut().enumerate() {
                let xi = grid.wavevector(i);
                let mut m = ONE;
                for a in 0..grid.dim {
                    for _ in 0..ord[a] {
                        m *= Complex64::new(0.0, xi[a]);
                    }
                }
                *c *= m;
            }
            let s = d.to_physical().iter().map(|v| v.norm()).fold(0.0, f64::max);
            times.push(*t);
            sups.push(s);
        }
        let x: Vec<f64> = times.iter().map(|t| libm::log2(*t)).collect();
        let order: u32 = ord.iter().sum();
        out.push(SmoothingRow {
            order: *ord,
            slope: log2_slope(&x, &sups),
            expected: -(order as f64 + 1.0) / 2.0,
            times,
            sup_values: sups,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_values() {
        let want = [1u32, 1, 2, 5, 14, 42];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(catalan(k as u32 + 1).unwrap(), BigUint::from(*w));
        }
        assert!(catalan(0).is_err());
        let rec = catalan_recursive(20);
        for k in 1..=20u32 {
            assert_eq!(rec[k as usize - 1], catalan(k).unwrap());
        }
    }

    #[test]
    fn quarter_gap_small_cases() {
        // ¼ − c₂/16 = 3/16
        assert!((catalan_quarter_gap(2).unwrap() - 0.1875).abs() < 1e-15);
        assert!((catalan_quarter_gap(3).unwrap() - (0.1875 - 2.0 / 64.0)).abs() < 1e-15);
    }

    #[test]
    fn series_bound_values() {
        assert_eq!(series_bound(2.0, 0.0).unwrap(), 0.0);
        assert!((series_bound(2.0, 0.125).unwrap() - 0.25).abs() < 1e-15);
        assert!(series_bound(2.0, 0.2).is_err());
        let exact = series_bound(1.5, 0.5 / 6.0).unwrap();
        assert!((series_bound_truncated(1.5, 0.5 / 6.0, 40) - exact).abs() < 1e-6);
    }

    #[test]
    fn time_grid_shape() {
        let t = time_grid(0.01, 0.16, 2).unwrap();
        assert_eq!(t.len(), 10);
        assert_eq!(t[0], 0.0);
        assert!((t[9] - 0.16).abs() < 1e-15);
    }

    #[test]
    fn discrete_b_matches_generic_quadrature_on_heat_flows() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let f = LabRng::new(1, 0).bandlimited_field(g, 0, 1);
        let times = time_grid(1.0 / 64.0, 1.0, 8).unwrap();
        let op = DiscreteB::new(g, &times, 32, SymbolSpec::Scalar1).unwrap();
        let a = Path::heat(&f, &times).unwrap();
        let b = op.apply(&a, &a).unwrap();
        let tr = a.trajectory();
        let i = times.len() - 1;
        let q = crate::duhamel::TimeQuadrature::new(times[i], 32).unwrap();
        let direct = crate::duhamel::bilinear_b_with(
            &tr,
            &tr,
            times[i],
            &q,
            SymbolSpec::Scalar1,
            crate::duhamel::ProductMode::Galerkin,
        )
        .unwrap();
        let err = direct.sub(&b.fields[i]).unwrap().l2_norm_spectral() / direct.l2_norm_spectral();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn zero_datum() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let mut cfg = SolverConfig::new(g);
        cfg.probes = 4;
        cfg.k_max = 4;
        let z = SpectralField::zeros(g);
        let (u, rep) = picard_solve(&z, &cfg).unwrap();
        assert!(u.is_zero() && rep.iterations == 1 && rep.converged);
        let (terms, _) = tk_series(&z, &cfg).unwrap();
        assert!(terms.iter().all(|t| t.is_zero()));
        let (u, lrep) = local_solve(&z, 0.5, &cfg).unwrap();
        assert!(u.is_zero() && lrep.converged);
    }
}
