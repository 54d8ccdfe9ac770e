//! Function-space norms evaluated on grid data.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::cutoff::pow2;
use crate::error::{arg, LabError, Result};
use crate::eta::EtaSequence;
use crate::field::{delta_unchecked, s_unchecked, tilde_unchecked, SpectralField};
use crate::geometry::{ball_averages, morrey_radii, DistanceField, PointSet};
use crate::grid::Grid;

/// Integrability exponent, with ∞ as its own case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exp {
    Finite(f64),
    Inf,
}

impl Exp {
    pub fn is_inf(&self) -> bool {
        matches!(self, Exp::Inf)
    }

    /// 1/p (0 for ∞).
    pub fn recip(&self) -> f64 {
        match self {
            Exp::Finite(p) => 1.0 / p,
            Exp::Inf => 0.0,
        }
    }

    fn check(&self, lo: f64) -> Result<()> {
        match self {
            Exp::Finite(p) if !(p.is_finite() && *p >= lo) => {
                arg(format!("exponent must be at least {lo}"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpaceSpec {
    Lebesgue {
        p: Exp,
    },
    Lorentz {
        p: f64,
        q: Exp,
    },
    BesovHom {
        s: f64,
        p: Exp,
        q: Exp,
    },
    TriebelHom {
        s: f64,
        p: f64,
        q: f64,
    },
    Morrey {
        p: f64,
        q: f64,
    },
    /// ℓ^r over j of 2^{j(3/p−1)} ‖Δ̃_j f‖ in M^p_q.
    BesovOverMorrey {
        p: f64,
        q: f64,
        r: Exp,
    },
    FourierFq {
        q: Exp,
    },
    MetaEta {
        eta: EtaSequence,
    },
    TwoMicrolocal {
        sp: f64,
        set: PointSet,
    },
    DerivedCN {
        base: Box<SpaceSpec>,
        n: u32,
    },
    DerivedBN {
        base: Box<SpaceSpec>,
        n: u32,
    },
}

impl SpaceSpec {
    pub fn l3() -> Self {
        SpaceSpec::Lebesgue {
            p: Exp::Finite(3.0),
        }
    }

    /// Critical Besov space with regularity 3/p − 1.
    pub fn critical_besov(p: Exp, q: Exp) -> Self {
        SpaceSpec::BesovHom {
            s: 3.0 * p.recip() - 1.0,
            p,
            q,
        }
    }

    pub fn cn(base: SpaceSpec, n: u32) -> Self {
        SpaceSpec::DerivedCN {
            base: Box::new(base),
            n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceSpec::Lebesgue { p } => p.check(1.0),
            SpaceSpec::Lorentz { p, q } => {
                if !(p.is_finite() && *p >= 1.0) {
                    return arg("Lorentz p must be finite and at least 1");
                }
                q.check(1.0)
            }
            SpaceSpec::BesovHom { s, p, q } => {
                if !s.is_finite() {
                    return arg("regularity must be finite");
                }
                p.check(1.0)?;
                q.check(1.0)
            }
            SpaceSpec::TriebelHom { s, p, q } => {
                if !s.is_finite() || !(p.is_finite() && *p >= 1.0) || !(q.is_finite() && *q >= 1.0)
                {
                    return arg("Triebel parameters need finite s, 1 <= p, q < inf");
                }
                Ok(())
            }
            SpaceSpec::Morrey { p, q } => {
                if !(*q >= 1.0 && q <= p && p.is_finite()) {
                    return arg("Morrey parameters need 1 <= q <= p < inf");
                }
                Ok(())
            }
            SpaceSpec::BesovOverMorrey { p, q, r } => {
                if !(*q >= 1.0 && q <= p && p.is_finite()) {
                    return arg("Morrey parameters need 1 <= q <= p < inf");
                }
                r.check(1.0)
            }
            SpaceSpec::FourierFq { q } => q.check(1.0),
            SpaceSpec::MetaEta { eta } => {
                if !eta.is_nonincreasing() {
                    return Err(LabError::Precondition("eta must be nonincreasing".into()));
                }
                if eta.n_lo > 0 {
                    return arg("eta window must contain n = 0");
                }
                Ok(())
            }
            SpaceSpec::TwoMicrolocal { sp, set } => {
                if !(*sp > 0.0) {
                    return arg("s' must be positive");
                }
                if set.is_empty() {
                    return Err(LabError::DegenerateSet);
                }
                Ok(())
            }
            SpaceSpec::DerivedCN { base, n } | SpaceSpec::DerivedBN { base, n } => {
                if *n < 4 || n % 2 == 1 {
                    return arg("N must be an even integer >= 4");
                }
                if matches!(
                    **base,
                    SpaceSpec::DerivedCN { .. } | SpaceSpec::DerivedBN { .. }
                ) {
                    return arg("derived spaces cannot be nested");
                }
                base.validate()
            }
        }
    }

    /// Spaces whose definition discards the zero mode and therefore require mean-zero data.
    pub fn is_homogeneous(&self) -> bool {
        match self {
            SpaceSpec::Lebesgue { .. } | SpaceSpec::Lorentz { .. } | SpaceSpec::Morrey { .. } => {
                false
            }
            SpaceSpec::DerivedCN { base, .. } => base.is_homogeneous(),
            SpaceSpec::DerivedBN { .. } => false,
            _ => true,
        }
    }

    /// Invariant under f ↦ λf(λ·) in three dimensions.
    pub fn is_invariant(&self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        match self {
            SpaceSpec::Lebesgue { p } => matches!(p, Exp::Finite(v) if close(*v, 3.0)),
            SpaceSpec::Lorentz { p, .. } => close(*p, 3.0),
            SpaceSpec::BesovHom { s, p, .. } => close(*s, 3.0 * p.recip() - 1.0),
            SpaceSpec::TriebelHom { s, p, .. } => close(*s, 3.0 / p - 1.0),
            SpaceSpec::Morrey { p, .. } => close(*p, 3.0),
            SpaceSpec::BesovOverMorrey { .. }
            | SpaceSpec::FourierFq { .. }
            | SpaceSpec::MetaEta { .. } => true,
            _ => false,
        }
    }
}

/// Physical samples |f(x)|.
pub fn abs_values(f: &SpectralField) -> Vec<f64> {
    f.to_physical().iter().map(|v| v.norm()).collect()
}

/// Quadrature L^p norm of grid values.
pub fn lp_of_values(values: &[f64], cell: f64, p: Exp) -> f64 {
    match p {
        Exp::Inf => values.iter().cloned().fold(0.0, f64::max),
        Exp::Finite(p) => {
            let s: f64 = values.iter().map(|v| libm::pow(*v, p)).sum();
            libm::pow(s * cell, 1.0 / p)
        }
    }
}

fn lq_sum(terms: impl Iterator<Item = f64>, q: Exp) -> f64 {
    match q {
        Exp::Inf => terms.fold(0.0, f64::max),
        Exp::Finite(q) => libm::pow(terms.map(|v| libm::pow(v, q)).sum::<f64>(), 1.0 / q),
    }
}

/// Decreasing rearrangement on the grid: cell values sorted, each of measure `cell`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rearrangement {
    pub values: Vec<f64>,
    pub cell: f64,
}

impl Rearrangement {
    /// f*(t) = inf{s ≥ 0 : |{|f| > s}| ≤ t}.
    pub fn at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.values.first().cloned().unwrap_or(0.0);
        }
        let i = libm::floor(t / self.cell * (1.0 + 1e-15)) as usize;
        self.values.get(i).cloned().unwrap_or(0.0)
    }

    pub fn total_measure(&self) -> f64 {
        self.values.len() as f64 * self.cell
    }

    /// Lorentz quasi-norm ((q/p)∫(t^{1/p} f*)^q dt/t)^{1/q}, exact for the step profile.
    pub fn lorentz(&self, p: f64, q: Exp) -> f64 {
        let c = self.cell;
        match q {
            Exp::Inf => self
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| v * libm::pow((i + 1) as f64 * c, 1.0 / p))
                .fold(0.0, f64::max),
            Exp::Finite(q) => {
                let r = q / p;
                let cr = libm::pow(c, r);
                let s: f64 = self
                    .values
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v > 0.0)
                    .map(|(i, v)| {
                        libm::pow(*v, q)
                            * cr
                            * (libm::pow((i + 1) as f64, r) - libm::pow(i as f64, r))
                    })
                    .sum();
                libm::pow(s, 1.0 / q)
            }
        }
    }
}

pub fn rearrangement(f: &SpectralField) -> Rearrangement {
    rearrange_values(abs_values(f), f.grid.cell_volume())
}

pub fn rearrange_values(mut values: Vec<f64>, cell: f64) -> Rearrangement {
    values.sort_by(|a, b| b.total_cmp(a));
    Rearrangement { values, cell }
}

/// sup_R R^{3/p} (avg_{B(x,R)} |v|^q)^{1/q} over all centres and the dyadic radius family.
pub fn morrey_of_values(grid: &Grid, values: &[f64], p: f64, q: f64) -> f64 {
    let pow: Vec<f64> = values.iter().map(|v| libm::pow(*v, q)).collect();
    let mut best: f64 = 0.0;
    for r in morrey_radii(grid) {
        let avg = ball_averages(grid, &pow, r);
        let m = avg.iter().cloned().fold(0.0, f64::max);
        best = best.max(libm::pow(r, 3.0 / p) * libm::pow(m, 1.0 / q));
    }
    best
}

fn band_fields(f: &SpectralField) -> impl Iterator<Item = (i32, SpectralField)> + '_ {
    f.grid
        .bands()
        .map(move |j| (j, delta_unchecked(f, j)))
        .filter(|(_, b)| !b.is_zero())
}

/// F_q weight applied to ‖(Δ_j f)^‖_{L^q(dξ)} with f̂ = (2πL)^d coef on the lattice of spacing 1/L.
fn fq_band(band: &SpectralField, q: Exp) -> f64 {
    let g = band.grid;
    let vol = g.box_volume();
    let mods = band.coef().iter().map(|c| c.norm() * vol);
    match q {
        Exp::Inf => mods.fold(0.0, f64::max),
        Exp::Finite(q) => {
            let meas = libm::pow(g.l, -(g.dim as f64));
            libm::pow(mods.map(|m| libm::pow(m, q)).sum::<f64>() * meas, 1.0 / q)
        }
    }
}

fn check_input(f: &SpectralField, spec: &SpaceSpec) -> Result<()> {
    spec.validate()?;
    if spec.is_homogeneous() && f.zero_mode() != num_complex::Complex64::new(0.0, 0.0) {
        return Err(LabError::Precondition(
            "homogeneous norm needs mean-zero input".into(),
        ));
    }
    Ok(())
}

/// Discrete evaluation of ‖f‖ in the given space.
pub fn norm(f: &SpectralField, spec: &SpaceSpec) -> Result<f64> {
    check_input(f, spec)?;
    norm_unchecked(f, spec)
}

fn norm_unchecked(f: &SpectralField, spec: &SpaceSpec) -> Result<f64> {
    let g = f.grid;
    Ok(match spec {
        SpaceSpec::Lebesgue { p } => lp_of_values(&abs_values(f), g.cell_volume(), *p),
        SpaceSpec::Lorentz { p, q } => rearrangement(f).lorentz(*p, *q),
        SpaceSpec::BesovHom { s, p, q } => lq_sum(
            band_fields(f)
                .map(|(j, b)| pow2_f(j, *s) * lp_of_values(&abs_values(&b), g.cell_volume(), *p)),
            *q,
        ),
        SpaceSpec::TriebelHom { s, p, q } => {
            let mut acc = alloc::vec![0.0; g.len()];
            for (j, b) in band_fields(f) {
                let w = pow2_f(j, *s);
                for (a, v) in acc.iter_mut().zip(abs_values(&b)) {
                    *a += libm::pow(w * v, *q);
                }
            }
            let pt: Vec<f64> = acc.iter().map(|a| libm::pow(*a, 1.0 / q)).collect();
            lp_of_values(&pt, g.cell_volume(), Exp::Finite(*p))
        }
        SpaceSpec::Morrey { p, q } => morrey_of_values(&g, &abs_values(f), *p, *q),
        SpaceSpec::BesovOverMorrey { p, q, r } => {
            let s = 3.0 / p - 1.0;
            let terms: Vec<f64> = g
                .bands()
                .map(|j| (j, tilde_unchecked(f, j)))
                .filter(|(_, b)| !b.is_zero())
                .map(|(j, b)| pow2_f(j, s) * morrey_of_values(&g, &abs_values(&b), *p, *q))
                .collect();
            lq_sum(terms.into_iter(), *r)
        }
        SpaceSpec::FourierFq { q } => band_fields(f)
            .map(|(j, b)| pow2_f(j, 2.0 - 3.0 * q.recip()) * fq_band(&b, *q))
            .fold(0.0, f64::max),
        SpaceSpec::MetaEta { eta } => m_eta_unchecked(f, eta),
        SpaceSpec::TwoMicrolocal { sp, set } => {
            let d = DistanceField::new(&g, set)?;
            let mut best: f64 = 0.0;
            for (j, b) in band_fields(f) {
                let tj = pow2(j);
                for (v, ds) in abs_values(&b).iter().zip(&d.values) {
                    best = best.max(v / tj * libm::pow(1.0 + tj * ds, *sp));
                }
            }
            best
        }
        SpaceSpec::DerivedCN { base, n } => band_fields(f)
            .map(|(j, b)| Ok(libm::pow(1.0 + pow2(j), *n as f64) * norm_unchecked(&b, base)?))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max),
        SpaceSpec::DerivedBN { .. } => time_weighted_unchecked(f, 1.0, spec)?,
    })
}

/// 2^{j s}.
fn pow2_f(j: i32, s: f64) -> f64 {
    libm::exp2(j as f64 * s)
}

/// ‖f‖_{t} for the derived spaces: sup_j (1 + 2^j√t)^N ‖Δ_j f‖_E, or the split form for DerivedBN.
pub fn time_weighted_norm(f: &SpectralField, t: f64, spec: &SpaceSpec) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return arg("time must be positive");
    }
    if !matches!(
        spec,
        SpaceSpec::DerivedCN { .. } | SpaceSpec::DerivedBN { .. }
    ) {
        return arg("time-weighted norm needs a derived space");
    }
    check_input(f, spec)?;
    time_weighted_unchecked(f, t, spec)
}

/// ‖Δ_j f‖_E for every nonempty band in the window.
pub fn band_norms(f: &SpectralField, base: &SpaceSpec) -> Result<Vec<(i32, f64)>> {
    band_fields(f)
        .map(|(j, b)| Ok((j, norm_unchecked(&b, base)?)))
        .collect()
}

fn time_weighted_unchecked(f: &SpectralField, t: f64, spec: &SpaceSpec) -> Result<f64> {
    let st = libm::sqrt(t);
    match spec {
        SpaceSpec::DerivedCN { base, n } => Ok(band_norms(f, base)?
            .into_iter()
            .map(|(j, v)| libm::pow(1.0 + pow2(j) * st, *n as f64) * v)
            .fold(0.0, f64::max)),
        SpaceSpec::DerivedBN { base, n } => {
            let jt = split_index(t);
            let low = norm_unchecked(&s_unchecked(f, jt), base)?;
            let mut high: f64 = 0.0;
            for (j, b) in band_fields(f) {
                if j >= jt {
                    high = high.max(libm::pow(pow2(j) * st, *n as f64) * norm_unchecked(&b, base)?);
                }
            }
            Ok(low + high)
        }
        _ => arg("time-weighted norm needs a derived space"),
    }
}

/// j(t) with 2^{−j(t)} ≤ √t < 2^{−j(t)+1}.
pub fn split_index(t: f64) -> i32 {
    let st = libm::sqrt(t);
    let mut j = -(libm::floor(libm::log2(st)) as i32);
    while libm::ldexp(1.0, -j) > st {
        j += 1;
    }
    while libm::ldexp(1.0, -j + 1) <= st {
        j -= 1;
    }
    j
}

/// Smallest C with avg_{B(x, 2^{−j'})} |Δ_j f|² ≤ C² η²_{j−j'} 4^j over all grid centres,
/// bands j in the window and j' ≤ j with radius at most half the box side.
pub fn m_eta_norm(f: &SpectralField, eta: &EtaSequence) -> Result<f64> {
    let spec = SpaceSpec::MetaEta { eta: eta.clone() };
    check_input(f, &spec)?;
    Ok(m_eta_unchecked(f, eta))
}

fn m_eta_unchecked(f: &SpectralField, eta: &EtaSequence) -> f64 {
    let g = f.grid;
    let half_side = core::f64::consts::PI * g.l;
    let mut best: f64 = 0.0;
    for (j, b) in band_fields(f) {
        let sq: Vec<f64> = abs_values(&b).iter().map(|v| v * v).collect();
        let mut n = 0;
        loop {
            let radius = pow2(n - j);
            if radius > half_side * (1.0 + 1e-12) || n > eta.n_hi() {
                break;
            }
            let avg = ball_averages(&g, &sq, radius);
            let m = avg.iter().cloned().fold(0.0, f64::max);
            let e = eta.meta_value(n);
            if m > 0.0 {
                if e == 0.0 {
                    return f64::INFINITY;
                }
                best = best.max(libm::sqrt(m) / (e * pow2(j)));
            }
            n += 1;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{delta_j, dyadic_rescale};
    use crate::geometry::ball_average_direct;
    use crate::rng::LabRng;
    use num_complex::Complex64;

    fn g2() -> Grid {
        Grid::new(2, 64, 1.0).unwrap()
    }

    #[test]
    fn constant_lebesgue() {
        let g = g2();
        let c = SpectralField::constant(g, Complex64::new(-2.0, 0.0));
        let v = g.box_volume();
        for p in [1.0, 2.0, 3.0, 7.5] {
            let want = 2.0 * libm::pow(v, 1.0 / p);
            assert!(
                (norm(&c, &SpaceSpec::Lebesgue { p: Exp::Finite(p) }).unwrap() - want).abs()
                    < 1e-10 * want
            );
        }
        assert!((norm(&c, &SpaceSpec::Lebesgue { p: Exp::Inf }).unwrap() - 2.0).abs() < 1e-12);
        assert!(norm(&c, &SpaceSpec::critical_besov(Exp::Finite(6.0), Exp::Inf)).is_err());
    }

    #[test]
    fn single_band_besov() {
        let g = Grid::new(2, 256, 1.0).unwrap();
        let f = SpectralField::plane_wave(g, [8, 0, 0], Complex64::new(1.0, 0.0)).unwrap();
        let f = f
            .add(&f.translate_cells([3, 0, 0]).scale_real(0.0))
            .unwrap();
        let j = 3;
        let b = delta_j(&f, j).unwrap();
        for (s, p) in [
            (-1.0, Exp::Inf),
            (0.5, Exp::Finite(2.0)),
            (-0.5, Exp::Finite(6.0)),
        ] {
            let want = libm::exp2(j as f64 * s) * lp_of_values(&abs_values(&b), g.cell_volume(), p);
            let got = norm(
                &f,
                &SpaceSpec::BesovHom {
                    s,
                    p,
                    q: Exp::Finite(2.0),
                },
            )
            .unwrap();
            assert!((got - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn lorentz_pp_is_lebesgue_and_rearrangement_squares() {
        let g = g2();
        let f = LabRng::new(1, 2).bandlimited_field(g, 1, 4);
        for p in [2.0, 3.0, 4.5] {
            let a = norm(
                &f,
                &SpaceSpec::Lorentz {
                    p,
                    q: Exp::Finite(p),
                },
            )
            .unwrap();
            let b = norm(&f, &SpaceSpec::Lebesgue { p: Exp::Finite(p) }).unwrap();
            assert!((a - b).abs() < 1e-10 * b);
        }
        let r = rearrangement(&f);
        let sq: Vec<f64> = abs_values(&f).iter().map(|v| v * v).collect();
        let r2 = rearrange_values(sq, g.cell_volume());
        for t in [0.0, 0.3, 1.7, 12.0, 30.0] {
            assert!((r2.at(t) - r.at(t) * r.at(t)).abs() <= 1e-12 * (1.0 + r2.at(t)));
        }
    }

    #[test]
    fn rearrangement_of_half_indicator() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let vals: Vec<f64> = (0..g.len())
            .map(|i| if g.point_index(i)[0] < 8 { 1.0 } else { 0.0 })
            .collect();
        let r = rearrange_values(vals, g.cell_volume());
        let v = g.box_volume();
        assert_eq!(r.at(0.49 * v), 1.0);
        assert_eq!(r.at(0.51 * v), 0.0);
    }

    #[test]
    fn morrey_matches_exhaustive_scan() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let f = LabRng::new(11, 0).bandlimited_field(g, 0, 3);
        let got = norm(&f, &SpaceSpec::Morrey { p: 3.0, q: 2.0 }).unwrap();
        let sq: Vec<f64> = abs_values(&f).iter().map(|v| v * v).collect();
        let h = g.spacing();
        let mut oracle: f64 = 0.0;
        for r in 1..=16 {
            let rad = r as f64 * h;
            for c in 0..g.len() {
                let a = ball_average_direct(&g, &sq, c, rad);
                oracle = oracle.max(libm::pow(rad, 1.0) * libm::sqrt(a));
            }
        }
        assert!(got <= oracle * (1.0 + 1e-12) || (got - oracle).abs() < 0.02 * oracle);
        assert!(
            (got - oracle).abs() <= 0.02 * oracle,
            "dyadic {got} vs exhaustive {oracle}"
        );
    }

    #[test]
    fn meta_eta_plane_wave() {
        let g = Grid::new(2, 128, 1.0).unwrap();
        let j = 3;
        let f = SpectralField::plane_wave(g, [8, 0, 0], Complex64::new(8.0, 0.0)).unwrap();
        let eta = EtaSequence::from_fn(0, 12, |_| 1.0).unwrap();
        let c = m_eta_norm(&f, &eta).unwrap();
        assert!((c - 1.0).abs() < 1e-10, "{c}");
        assert_eq!(m_eta_norm(&SpectralField::zeros(g), &eta).unwrap(), 0.0);
        let _ = j;
    }

    #[test]
    fn meta_eta_monotone_in_eta() {
        let g = Grid::new(2, 64, 1.0).unwrap();
        let slow = EtaSequence::from_fn(0, 12, |n| libm::exp2(-0.5 * n as f64)).unwrap();
        let fast = EtaSequence::from_fn(0, 12, |n| libm::exp2(-(n as f64))).unwrap();
        for s in 0..4 {
            let f = LabRng::new(s, 0).bandlimited_field(g, 1, 4);
            assert!(
                m_eta_norm(&f, &slow).unwrap() <= m_eta_norm(&f, &fast).unwrap() * (1.0 + 1e-12)
            );
        }
    }

    #[test]
    fn time_weighted_single_band() {
        let g = Grid::new(2, 256, 1.0).unwrap();
        let f = SpectralField::plane_wave(g, [16, 0, 0], Complex64::new(1.0, 0.0)).unwrap();
        let spec = SpaceSpec::cn(SpaceSpec::l3(), 4);
        let t = 1.0 / 256.0;
        let b = norm(&delta_j(&f, 4).unwrap(), &SpaceSpec::l3()).unwrap();
        let got = time_weighted_norm(&f, t, &spec).unwrap();
        assert!((got - 16.0 * b).abs() < 1e-10 * got);
        assert_eq!(
            time_weighted_norm(&SpectralField::zeros(g), t, &spec).unwrap(),
            0.0
        );
        assert!(time_weighted_norm(&f, 0.0, &spec).is_err());
    }

    #[test]
    fn time_weighted_scaling() {
        let g = Grid::new(3, 32, 1.0).unwrap();
        let f = LabRng::new(2, 5).bandlimited_field(g, 1, 2);
        let spec = SpaceSpec::cn(SpaceSpec::l3(), 4);
        let a = time_weighted_norm(&f, 0.1, &spec).unwrap();
        let b = time_weighted_norm(&dyadic_rescale(&f, 1).unwrap(), 0.025, &spec).unwrap();
        assert!((a - b).abs() < 1e-8 * a);
    }

    #[test]
    fn split_index_brackets() {
        for t in [1.0, 0.3, 0.25, 0.01, 4.0, 17.0] {
            let j = split_index(t);
            let st = libm::sqrt(t);
            assert!(libm::ldexp(1.0, -j) <= st && st < libm::ldexp(1.0, -j + 1));
        }
    }

    #[test]
    fn micro_needs_set() {
        let g = g2();
        let f = LabRng::new(1, 1).bandlimited_field(g, 1, 2);
        let spec = SpaceSpec::TwoMicrolocal {
            sp: 1.0,
            set: PointSet::from_points(alloc::vec![]),
        };
        assert_eq!(norm(&f, &spec), Err(LabError::DegenerateSet));
    }
}
