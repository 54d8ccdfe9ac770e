//! Acceptance suite: one PASS/FAIL line per criterion, sub-checks indented below it.
//! Run `cargo test --release -p lplab --test acceptance`; pass criterion numbers after `--` to
//! run a subset.

use std::time::Instant;

use num_complex::Complex64;

use lplab_core::counterexample::{
    cone_sample, delta_sequence, kernel_lower_bound, prop19_profile, prop19_ratio, KernelProfile,
    OrthonormalBump,
};
use lplab_core::cutoff::psi0;
use lplab_core::duhamel::{
    band_diagnostics, bilinear_b, saturating_trajectory, EpsilonFunction, TimeQuadrature,
    Trajectory,
};
use lplab_core::eta::EtaSequence;
use lplab_core::field::{delta_j, dyadic_rescale, reconstruct, tilde_delta_j};
use lplab_core::geometry::PointSet;
use lplab_core::microlocal::{
    convolution_stability, decay_check, density_function, dini_check, eta_from_density,
    sawtooth_datum, DensityProfile, DensitySampling,
};
use lplab_core::norms::{norm, Exp, SpaceSpec};
use lplab_core::paraproduct::{eta_estimate, EtaSetup};
use lplab_core::quad::{log2_slope, spread};
use lplab_core::rng::LabRng;
use lplab_core::solver::{
    catalan, catalan_quarter_gap, catalan_recursive, local_solve, path_norm, picard_in,
    series_bound, series_bound_truncated, series_sum, tk_series_in, Path, PicardStart, Problem,
    SolverConfig,
};
use lplab_core::symbol::SymbolSpec;
use lplab_core::{Grid, LabError, SpectralField};
use num_bigint::BigUint;

/// Sub-checks expected to fail; see the README section on known gaps.
const KNOWN_UNATTAINABLE: &[&str] = &["7.envelope_r_spread", "7.envelope_c_spread"];

// criterion 1
const PARTITION_TOL: f64 = 1e-12;
const TILDE_TOL: f64 = 1e-14;
const RECON_TOL: f64 = 1e-10;
// criterion 2
const CATALAN_KMAX: u32 = 64;
const GAP_CONST: f64 = 0.3;
const SERIES_TOL: f64 = 1e-6;
// criterion 3
const SOLVE_SEEDS: [u64; 5] = [11, 12, 13, 14, 15];
const SOLVE_MARGIN: f64 = 0.2;
const SOLVE_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-8;
const SERIES_PICARD_TOL: f64 = 1e-7;
const BALL_SLACK: f64 = 1e-6;
// criterion 4
const SCALE_TOL: f64 = 1e-6;
// criterion 5
const ETA_TRIALS: usize = 50;
const ETA_SEED: u64 = 2024;
// criterion 6
const PROP19_TOL: f64 = 1e-10;
// criterion 7
const CLOSED_FORM_TOL: f64 = 1e-8;
const ENVELOPE_SPREAD: f64 = 8.0;
const REFINE_TOL: f64 = 1e-8;
// criterion 8
const L_RATIO: f64 = 0.9;
const LOCAL_RESIDUAL: f64 = 1e-6;
// criterion 9
const PERIODIZATION_TOL: f64 = 1e-8;
const GRAM_TOL: f64 = 1e-6;
const SLACK_ROUNDING: f64 = 1e-14;
const HARMONIC_FACTOR: f64 = 2.0;
// criterion 10
const DENSITY_REL: f64 = 0.2;
const ETA_SLOPE: (f64, f64) = (-2.3, -1.7);
const CONVOLUTION_SPREAD: f64 = 4.0;
const DECAY_SPREAD: f64 = 2.0;

struct Sub {
    id: String,
    pass: bool,
    detail: String,
}

struct Criterion {
    subs: Vec<Sub>,
    prefix: u32,
}

impl Criterion {
    fn new(prefix: u32) -> Self {
        Criterion {
            subs: Vec::new(),
            prefix,
        }
    }
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.subs.push(Sub {
            id: format!("{}.{name}", self.prefix),
            pass,
            detail,
        });
    }
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).unwrap().l2_norm_spectral() / b.l2_norm_spectral()
}

fn c1() -> Criterion {
    let mut c = Criterion::new(1);
    for (dim, n) in [(2, 256), (3, 64)] {
        let g = Grid::new(dim, n, 1.0).unwrap();
        let (lo, hi) = g.band_window();
        let mut worst: f64 = 0.0;
        let steps = 20_000;
        for i in 0..=steps {
            // t across [4^lo, 4^hi] in log scale
            let e = 2.0 * (lo as f64 + (hi - lo) as f64 * i as f64 / steps as f64);
            let t = 2f64.powf(e);
            let s: f64 = (lo..=hi).map(|j| psi0(t * 4f64.powi(-j))).sum();
            worst = worst.max((s - 1.0).abs());
        }
        c.check(
            &format!("partition_{dim}d"),
            worst <= PARTITION_TOL,
            format!("max |Σψ − 1| = {worst:e}"),
        );

        let f = LabRng::new(7, dim as u64).bandlimited_field(g, lo, hi);
        let mut tw: f64 = 0.0;
        for j in lo..=hi {
            let d = delta_j(&f, j).unwrap();
            let td = tilde_delta_j(&d, j).unwrap();
            let err = td.sub(&d).unwrap().max_abs_coef() / d.max_abs_coef();
            tw = tw.max(err);
        }
        c.check(
            &format!("tilde_identity_{dim}d"),
            tw <= TILDE_TOL,
            format!("max relative {tw:e}"),
        );

        let top = 2f64.powi(hi);
        let bl = LabRng::new(8, dim as u64).shell_field(g, 2f64.powi(lo), top);
        let r = rel(&reconstruct(&bl), &bl);
        c.check(
            &format!("reconstruction_{dim}d"),
            r <= RECON_TOL,
            format!("relative {r:e}"),
        );
    }
    c
}

fn c2() -> Criterion {
    let mut c = Criterion::new(2);
    let rec = catalan_recursive(CATALAN_KMAX);
    let same = (1..=CATALAN_KMAX).all(|k| catalan(k).unwrap() == rec[k as usize - 1]);
    // independent oracle: binomial(2n, n)/(n+1) with c_k = C_{k−1}
    let binom = (1..=CATALAN_KMAX).all(|k| {
        let n = (k - 1) as u64;
        let mut b = BigUint::from(1u32);
        for i in 0..n {
            b = b * BigUint::from(2 * n - i) / BigUint::from(i + 1);
        }
        b / BigUint::from(n + 1) == rec[k as usize - 1]
    });
    c.check(
        "closed_form_vs_recursion",
        same && binom,
        format!("k ≤ {CATALAN_KMAX}, binomial oracle {binom}"),
    );
    for kk in [100u32, 400, 1600] {
        let gap = catalan_quarter_gap(kk).unwrap();
        let bound = GAP_CONST / (kk as f64).sqrt();
        c.check(
            &format!("quarter_gap_K{kk}"),
            (0.0..=bound).contains(&gap),
            format!("¼ − S_K = {gap:e} ≤ {bound:e}"),
        );
    }
    let (nb, na) = (1.0, 0.125); // margin 4‖B‖‖a‖ = ½
    let closed = series_bound(nb, na).unwrap();
    let trunc = series_bound_truncated(nb, na, 200);
    let oracle = (1.0 - (1.0 - 4.0 * nb * na).sqrt()) / (2.0 * nb);
    let ok = (closed - trunc).abs() <= SERIES_TOL && (closed - oracle).abs() <= 1e-14;
    c.check(
        "series_bound_margin_half",
        ok,
        format!("closed {closed} truncated {trunc} oracle {oracle}"),
    );
    c
}

fn solve_grid() -> Grid {
    Grid::new(2, 32, 1.0).unwrap()
}

/// Problem for `u0` scaled to the requested margin. ‖B‖ is measured on the unscaled datum;
/// the (a, a) probe ratio is scale free, so it carries over.
fn problem_at_margin(u0: &SpectralField, cfg: &SolverConfig, margin: f64) -> Problem {
    let pb = Problem::new(u0, cfg).unwrap();
    let s = margin / (4.0 * pb.norm_b * pb.norm_a);
    Problem {
        a: pb.a.scale(s),
        norm_a: pb.norm_a * s,
        ..pb
    }
}

fn c3() -> Criterion {
    let mut c = Criterion::new(3);
    let g = solve_grid();
    let mut cfg = SolverConfig::new(g);
    cfg.tol = SOLVE_TOL;
    cfg.k_max = 12;
    for seed in SOLVE_SEEDS {
        let u0 = LabRng::new(seed, 1).bandlimited_field(g, g.j_min(), g.j_min() + 1);
        let pb = problem_at_margin(&u0, &cfg, SOLVE_MARGIN);
        let (u, rep) = picard_in(&pb, PicardStart::Datum).unwrap();
        let (u2, rep2) = picard_in(&pb, PicardStart::Scaled(1.5)).unwrap();
        let (terms, _) = tk_series_in(&pb).unwrap();
        let ds = pb
            .norm(&series_sum(&terms).unwrap().sub(&u).unwrap())
            .unwrap();
        let di = pb.norm(&u.sub(&u2).unwrap()).unwrap();
        let radius = 1.0 / (2.0 * pb.norm_b);
        let ok = rep.converged
            && rep2.converged
            && rep.final_residual <= RESIDUAL_TOL
            && ds <= SERIES_PICARD_TOL
            && rep.solution_norm <= radius + BALL_SLACK
            && di <= 2.0 * SOLVE_TOL;
        c.check(
            &format!("seed_{seed}"),
            ok,
            format!(
                "margin {:.4} residual {:e} series−picard {:e} |u| {:.4e} ≤ {:.4e} init gap {:e}",
                rep.margin, rep.final_residual, ds, rep.solution_norm, radius, di
            ),
        );
    }
    c
}

fn c4() -> Criterion {
    let mut c = Criterion::new(4);
    let g = Grid::new(3, 32, 1.0).unwrap();
    let f = LabRng::new(21, 0).bandlimited_field(g, g.j_min(), g.j_max() - 1);
    let specs = [
        ("l3", SpaceSpec::l3()),
        (
            "besov_p6_qinf",
            SpaceSpec::BesovHom {
                s: -0.5,
                p: Exp::Finite(6.0),
                q: Exp::Inf,
            },
        ),
        (
            "besov_p4_q2",
            SpaceSpec::BesovHom {
                s: -0.25,
                p: Exp::Finite(4.0),
                q: Exp::Finite(2.0),
            },
        ),
        ("morrey_3_2", SpaceSpec::Morrey { p: 3.0, q: 2.0 }),
    ];
    let r = dyadic_rescale(&f, 1).unwrap();
    for (name, s) in specs {
        let (a, b) = (norm(&f, &s).unwrap(), norm(&r, &s).unwrap());
        let e = (a - b).abs() / a;
        c.check(
            &format!("norm_{name}"),
            e <= SCALE_TOL,
            format!("relative {e:e}"),
        );
    }

    let g = solve_grid();
    let g2 = Grid::new(2, 32, 0.5).unwrap();
    let u0 = LabRng::new(22, 1).bandlimited_field(g, g.j_min(), g.j_min() + 1);
    let mut cfg = SolverConfig::new(g);
    cfg.tol = 1e-12;
    cfg.probes = 4;
    let pb = problem_at_margin(&u0, &cfg, SOLVE_MARGIN);
    let (u, _) = picard_in(&pb, PicardStart::Datum).unwrap();
    let mut cfg2 = SolverConfig::new(g2);
    cfg2.tol = 1e-12;
    cfg2.probes = 4;
    let v0 = dyadic_rescale(&pb.a.fields[0], 1).unwrap();
    let pb2 = Problem::new(&v0, &cfg2).unwrap();
    let (v, _) = picard_in(&pb2, PicardStart::Datum).unwrap();
    let times_ok = pb2
        .a
        .times
        .iter()
        .zip(&pb.a.times)
        .all(|(s, t)| *s == t / 4.0);
    let ru = Path {
        times: v.times.clone(),
        fields: u
            .fields
            .iter()
            .map(|f| dyadic_rescale(f, 1).unwrap())
            .collect(),
    };
    let space = cfg2.space();
    let e = path_norm(&v.sub(&ru).unwrap(), &space).unwrap() / path_norm(&v, &space).unwrap();
    c.check(
        "solver_covariance",
        times_ok && e <= SCALE_TOL,
        format!("relative F-distance {e:e}, times scaled {times_ok}"),
    );
    c
}

fn c5() -> Criterion {
    let mut c = Criterion::new(5);
    let setup = EtaSetup::default();
    let cases = [
        ("l3", SpaceSpec::l3(), (-2.5, -1.2)),
        (
            "besov_m1_inf_inf",
            SpaceSpec::BesovHom {
                s: -1.0,
                p: Exp::Inf,
                q: Exp::Inf,
            },
            (-0.4, 0.2),
        ),
        (
            "besov_p6",
            SpaceSpec::BesovHom {
                s: -0.5,
                p: Exp::Finite(6.0),
                q: Exp::Inf,
            },
            (-1.4, -0.6),
        ),
    ];
    for (name, s, (lo, hi)) in cases {
        let m = eta_estimate(&s, &setup, 0..=4, ETA_TRIALS, ETA_SEED).unwrap();
        let slope = m.slope();
        c.check(
            name,
            (lo..=hi).contains(&slope),
            format!("slope {slope:.4} in [{lo}, {hi}]"),
        );
    }
    c
}

fn c6() -> Criterion {
    let mut c = Criterion::new(6);
    let g = Grid::new(2, 1024, 2.0).unwrap();
    let phi = prop19_profile(g).unwrap();
    let vals: Vec<f64> = (2..=6).map(|k| prop19_ratio(k, &phi).unwrap()).collect();
    for k in 3..=6usize {
        let r = vals[k - 2] / vals[k - 3];
        c.check(
            &format!("k{k}"),
            (r - 4.0).abs() <= PROP19_TOL,
            format!("ratio {r}"),
        );
    }
    c
}

fn c7() -> Criterion {
    let mut c = Criterion::new(7);
    let g = solve_grid();
    let (a, b) = (Complex64::new(0.7, 0.2), Complex64::new(-0.3, 1.1));
    let u = Trajectory::Constant(SpectralField::plane_wave(g, [2, 1, 0], a).unwrap());
    let v = Trajectory::Constant(SpectralField::plane_wave(g, [1, -3, 0], b).unwrap());
    let mut worst: f64 = 0.0;
    for t in [0.01, 0.1, 0.4, 2.0] {
        let q = TimeQuadrature::new(t, 64).unwrap();
        let got = bilinear_b(&u, &v, t, &q, SymbolSpec::Scalar1).unwrap();
        let x2 = 13.0;
        let want = a * b * Complex64::new(0.0, 3.0) * ((1.0 - (-t * x2).exp()) / x2);
        let idx = g.linear_of_freq([3, -2, 0]).unwrap();
        worst = worst.max((got.coef()[idx] - want).norm() / want.norm());
    }
    c.check(
        "single_mode",
        worst <= CLOSED_FORM_TOL,
        format!("max relative {worst:e}"),
    );

    let f = LabRng::new(31, 0).bandlimited_field(g, g.j_min(), g.j_min());
    let h = Trajectory::Heat(f);
    let mut wr: f64 = 0.0;
    for t in [0.05, 0.25, 1.0] {
        let b1 = bilinear_b(
            &h,
            &h,
            t,
            &TimeQuadrature::new(t, 32).unwrap(),
            SymbolSpec::Scalar1,
        )
        .unwrap();
        let b2 = bilinear_b(
            &h,
            &h,
            t,
            &TimeQuadrature::new(t, 64).unwrap(),
            SymbolSpec::Scalar1,
        )
        .unwrap();
        wr = wr.max(rel(&b1, &b2));
    }
    c.check(
        "quadrature_refinement",
        wr <= REFINE_TOL,
        format!("32 → 64 nodes, max relative {wr:e}"),
    );

    let g = Grid::new(2, 256, 1.0).unwrap();
    let top = (g.n / 2 - 1) as f64;
    let f = LabRng::new(1, 0).shell_field(g, 0.9, top);
    let h = LabRng::new(2, 0).shell_field(g, 0.9, top);
    let l3 = SpaceSpec::l3();
    let u = saturating_trajectory(&f, &l3, 4).unwrap();
    let v = saturating_trajectory(&h, &l3, 4).unwrap();
    let eps = EpsilonFunction::new(EtaSequence::from_fn(-4, 20, |n| 4f64.powi(-n.max(0))).unwrap());
    let ts: Vec<f64> = (1..=6).map(|m| 4f64.powi(-m)).collect();
    let hi = g.band_window().1;
    let js: Vec<i32> = (hi - 5..=hi).collect();
    let d = band_diagnostics(&u, &v, &ts, &js, &l3, &eps, 4, 16, SymbolSpec::Scalar1).unwrap();
    // bands where the low-high term vanishes identically carry no constant
    let rr: Vec<f64> = d
        .iter()
        .filter(|x| x.rj > 0.0)
        .map(|x| x.ratio_r())
        .collect();
    let rc: Vec<f64> = d
        .iter()
        .filter(|x| x.cj > 0.0)
        .map(|x| x.ratio_c())
        .collect();
    let (sr, sc) = (spread(&rr), spread(&rc));
    let max_r = rr.iter().cloned().fold(0.0, f64::max);
    let max_c = rc.iter().cloned().fold(0.0, f64::max);
    c.check(
        "envelope_r_spread",
        sr <= ENVELOPE_SPREAD,
        format!(
            "R_j ratio spread {sr:.3e} (max {max_r:.3e}) over {} nonzero of 36",
            rr.len()
        ),
    );
    c.check(
        "envelope_c_spread",
        sc <= ENVELOPE_SPREAD,
        format!(
            "C_j ratio spread {sc:.3e} (max {max_c:.3e}) over {} nonzero of 36",
            rc.len()
        ),
    );
    c
}

fn c8() -> Criterion {
    let mut c = Criterion::new(8);
    let g = solve_grid();
    let mut cfg = SolverConfig::new(g);
    cfg.t_min = 2f64.powi(-14);
    cfg.probes = 8;
    let u0 = LabRng::new(3, 1).bandlimited_field(g, g.j_min(), g.j_min());
    let pb = problem_at_margin(&u0, &cfg, 3.0);
    let refused = matches!(
        picard_in(&pb, PicardStart::Datum),
        Err(LabError::Precondition(_))
    );
    c.check(
        "global_refuses",
        refused,
        format!("margin {:.3}", 4.0 * pb.norm_b * pb.norm_a),
    );
    let datum = pb.a.fields[0].clone();
    let (_, rep) = local_solve(&datum, 1.0 / 64.0, &cfg).unwrap();
    let ls: Vec<f64> = rep.l_norms.iter().map(|x| x.1).collect();
    let dec = ls.len() == 3 && ls.windows(2).all(|w| w[1] <= L_RATIO * w[0]);
    c.check(
        "l_norm_decreasing",
        dec,
        format!(
            "‖L‖ at T, T/4, T/16: {ls:?}; tail ratio {:e}",
            rep.tail_ratio
        ),
    );
    c.check(
        "local_solve",
        rep.converged && rep.residual <= LOCAL_RESIDUAL,
        format!("iterations {} residual {:e}", rep.iterations, rep.residual),
    );
    c
}

fn c9() -> Criterion {
    let mut c = Criterion::new(9);
    let b = OrthonormalBump::new(3, 64, 8).unwrap();
    let pr = b.periodization_residual();
    let shifts = [
        [0, 0, 0],
        [1, 0, 0],
        [0, 1, 0],
        [0, 0, 1],
        [1, 1, 0],
        [2, -1, 3],
        [3, 3, 3],
    ];
    let gr = b.gram_residual(&shifts);
    c.check(
        "bump_periodization",
        pr <= PERIODIZATION_TOL,
        format!("{pr:e}"),
    );
    c.check("bump_gram", gr <= GRAM_TOL, format!("{gr:e}"));

    let eta = EtaSequence::from_fn(0, 40, |n| 1.0 / ((n + 1) as f64).sqrt()).unwrap();
    let d = delta_sequence(&eta, 4..=40).unwrap();
    let min_slack = d.slack.iter().cloned().fold(f64::INFINITY, f64::min);
    c.check(
        "delta_slack",
        min_slack >= -SLACK_ROUNDING,
        format!("min slack {min_slack:e}"),
    );
    let mut h = 0.0;
    let mut worst: f64 = 1.0;
    for (i, j) in (4..=40).enumerate() {
        h += 1.0 / (j + 1) as f64;
        let r = d.partial_sums[i] / h;
        worst = worst.max(r).max(1.0 / r);
    }
    c.check(
        "harmonic_growth",
        worst <= HARMONIC_FACTOR,
        format!("worst factor {worst:.4}"),
    );

    let prof = KernelProfile::default();
    let vals: Vec<_> = cone_sample()
        .into_iter()
        .map(|(x1, l)| kernel_lower_bound(x1, l, &prof, 1.0).unwrap())
        .collect();
    let beta = vals.iter().map(|v| v.ratio).fold(f64::INFINITY, f64::min);
    let ok = vals.len() == 20 && vals.iter().all(|v| v.in_cone && v.sign > 0.0) && beta >= 0.5;
    c.check("kernel_beta", ok, format!("20 points, min ratio {beta:.4}"));
    c
}

fn c10() -> Criterion {
    let mut c = Criterion::new(10);
    let g = Grid::new(3, 64, 1.0).unwrap();
    let h = g.spacing();
    let samp = DensitySampling::for_grid(&g);
    let point = PointSet::point([10.5 * h, 20.5 * h, 30.5 * h]);
    let plane = PointSet::plane(&g, 0, 5.5 * h);
    let m_max = 4; // δ = 2^{-4} = 4/N
    for (name, set, oracle) in [
        (
            "density_point",
            &point,
            DensityProfile::point_oracle(3, m_max),
        ),
        ("density_plane", &plane, DensityProfile::plane_oracle(m_max)),
    ] {
        let p = density_function(&g, set, m_max, &samp).unwrap();
        let worst = p
            .values
            .iter()
            .zip(&oracle.values)
            .map(|(a, b)| (a / b - 1.0).abs())
            .fold(0.0, f64::max);
        c.check(
            name,
            worst <= DENSITY_REL && p.is_monotone(),
            format!("max relative deviation {worst:.4}"),
        );
    }

    let lin = dini_check(&DensityProfile::analytic("linear", 24, |d| d)).unwrap();
    let log = dini_check(&DensityProfile::analytic("log", 24, |d| {
        1.0 / (std::f64::consts::E / d).ln()
    }))
    .unwrap();
    let pt = dini_check(&DensityProfile::point_oracle(3, 24)).unwrap();
    c.check(
        "dini_verdicts",
        lin.pass && !log.pass && pt.pass,
        format!("linear {} log {} point {}", lin.pass, log.pass, pt.pass),
    );

    let p = density_function(&g, &point, m_max, &samp).unwrap();
    let e = eta_from_density(1.0, &p).unwrap();
    let x: Vec<f64> = (0..e.values.len()).map(|n| n as f64).collect();
    let slope = log2_slope(&x, &e.values);
    c.check(
        "eta_slope_point",
        (ETA_SLOPE.0..=ETA_SLOPE.1).contains(&slope),
        format!("slope {slope:.4}"),
    );

    for sp in [0.5, 1.5] {
        let r = convolution_stability(
            &g,
            &point,
            sp,
            3.0 + sp + 1.0,
            &[g.j_min(), 2, 3, g.j_max()],
        )
        .unwrap();
        c.check(
            &format!("convolution_sp{sp}"),
            r.spread <= CONVOLUTION_SPREAD,
            format!("spread {:.3}", r.spread),
        );
    }

    let g = Grid::new(2, 64, 1.0).unwrap();
    let mut cfg = SolverConfig::new(g);
    cfg.probes = 8;
    cfg.tol = 1e-10;
    let pb = problem_at_margin(&sawtooth_datum(g, 1.0), &cfg, 0.3);
    let (u, _) = picard_in(&pb, PicardStart::Datum).unwrap();
    let ts: Vec<f64> = (1..=4)
        .map(|m| 4f64.powi(-m))
        .filter(|t| pb.a.times.contains(t))
        .collect();
    let r = decay_check(&u, &pb.a, &PointSet::plane(&g, 0, 0.0), 2.0, &ts).unwrap();
    c.check(
        "decay_sawtooth",
        ts.len() == 4 && r.spread_u <= DECAY_SPREAD,
        format!("spread {:.3} over {} times", r.spread_u, ts.len()),
    );
    c
}

fn cli_csv(args: &[&str], csv: &std::path::Path) -> Vec<u8> {
    let mut v: Vec<String> = vec!["lplab".into(), "--quiet".into()];
    v.extend(args.iter().map(|s| s.to_string()));
    v.push("--csv".into());
    v.push(csv.display().to_string());
    assert_eq!(lplab::cli::run(v), 0);
    std::fs::read(csv).unwrap()
}

fn c11() -> Criterion {
    let mut c = Criterion::new(11);
    let dir = tempfile::tempdir().unwrap();
    let runs: [(&str, &[&str]); 3] = [
        (
            "eta_scan",
            &["eta-scan", "--trials", "5", "--n-max", "2", "--seed", "9"],
        ),
        ("series", &["series", "--K", "6", "--probes", "4"]),
        (
            "delta_seq",
            &["counterexample", "delta-seq", "--j-max", "20"],
        ),
    ];
    for (name, args) in runs {
        let a = cli_csv(args, &dir.path().join(format!("{name}_a.csv")));
        let b = cli_csv(args, &dir.path().join(format!("{name}_b.csv")));
        c.check(name, !a.is_empty() && a == b, format!("{} bytes", a.len()));
    }
    c
}

fn main() {
    let only: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let all: [(u32, &str, fn() -> Criterion); 11] = [
        (1, "Littlewood-Paley exactness", c1),
        (2, "Catalan certificates", c2),
        (3, "Solver consistency", c3),
        (4, "Scaling covariance", c4),
        (5, "Eta discrimination", c5),
        (6, "Exact 4^k product law", c6),
        (7, "Duhamel envelope", c7),
        (8, "Local theory", c8),
        (9, "Counterexample machinery", c9),
        (10, "Microlocal", c10),
        (11, "Determinism", c11),
    ];
    let mut unexpected = Vec::new();
    for (id, title, f) in all {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let crit = f();
        let pass = crit.subs.iter().all(|s| s.pass);
        println!(
            "{} criterion {id:>2}: {title} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64()
        );
        for s in &crit.subs {
            let known = KNOWN_UNATTAINABLE.contains(&s.id.as_str());
            let tag = match (s.pass, known) {
                (true, _) => "ok  ",
                (false, true) => "KNOWN",
                (false, false) => "FAIL",
            };
            println!("    {tag} {:<28} {}", s.id, s.detail);
            if !s.pass && !known {
                unexpected.push(s.id.clone());
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
