use approx::assert_relative_eq;
use lplab_core::cutoff::{delta_mult, phi0, psi0};
use lplab_core::duhamel::{bilinear_b, epsilon_eval, EpsilonFunction, TimeQuadrature, Trajectory};
use lplab_core::eta::EtaSequence;
use lplab_core::field::heat;
use lplab_core::norms::{norm, Exp, SpaceSpec};
use lplab_core::rng::LabRng;
use lplab_core::solver::{catalan, catalan_recursive};
use lplab_core::symbol::SymbolSpec;
use lplab_core::{Grid, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::new(2, 32, 1.0).unwrap()
}

fn field(seed: u64) -> SpectralField {
    let g = grid();
    let (lo, hi) = g.band_window();
    LabRng::new(seed, 7).bandlimited_field(g, lo + 1, hi - 1)
}

fn spaces() -> Vec<SpaceSpec> {
    vec![
        SpaceSpec::l3(),
        SpaceSpec::Lebesgue {
            p: Exp::Finite(1.5),
        },
        SpaceSpec::Lebesgue { p: Exp::Inf },
        SpaceSpec::Lorentz {
            p: 3.0,
            q: Exp::Finite(2.0),
        },
        SpaceSpec::critical_besov(Exp::Finite(6.0), Exp::Inf),
        SpaceSpec::Morrey { p: 3.0, q: 2.0 },
        SpaceSpec::FourierFq {
            q: Exp::Finite(2.0),
        },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norms_translation_invariant(seed in 0u64..1000, sx in -31i64..32, sy in -31i64..32) {
        let f = field(seed);
        let g = f.translate_cells([sx, sy, 0]);
        for sp in spaces() {
            let a = norm(&f, &sp).unwrap();
            let b = norm(&g, &sp).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1e-300), "{sp:?}: {a} vs {b}");
        }
    }

    #[test]
    fn norms_homogeneous(seed in 0u64..1000, c in -5.0f64..5.0) {
        let f = field(seed);
        let g = f.scale_real(c);
        for sp in spaces() {
            let a = norm(&f, &sp).unwrap() * c.abs();
            let b = norm(&g, &sp).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300), "{sp:?}: {a} vs {b}");
        }
    }

    #[test]
    fn parseval(seed in 0u64..1000) {
        let f = field(seed);
        let phys = norm(&f, &SpaceSpec::Lebesgue { p: Exp::Finite(2.0) }).unwrap();
        assert_relative_eq!(phys, f.l2_norm_spectral(), max_relative = 1e-12);
    }

    #[test]
    fn heat_semigroup(seed in 0u64..1000, s in 0.0f64..0.5, t in 0.0f64..0.5) {
        let f = field(seed);
        let a = heat(&heat(&f, s).unwrap(), t).unwrap();
        let b = heat(&f, s + t).unwrap();
        let d = a.sub(&b).unwrap().max_abs_coef();
        prop_assert!(d <= 1e-14 * f.max_abs_coef().max(1e-300));
    }

    #[test]
    fn dyadic_partition_of_unity(lk2 in -20.0f64..20.0) {
        let k2 = lk2.exp();
        let s: f64 = (-40..=40).map(|j| delta_mult(j, k2)).sum();
        prop_assert!((s - 1.0).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&psi0(k2)));
        prop_assert!(phi0(k2) >= phi0(2.0 * k2));
    }

    #[test]
    fn epsilon_monotone(a in 0.0f64..100.0, b in 0.0f64..100.0, r in 0.05f64..0.95) {
        let eta = EtaSequence::from_fn(-4, 20, |n| r.powi(n + 5)).unwrap();
        let eps = EpsilonFunction::new(eta);
        prop_assert_eq!(epsilon_eval(&eps, 0.0).unwrap(), 0.0);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(epsilon_eval(&eps, lo).unwrap() <= epsilon_eval(&eps, hi).unwrap());
        prop_assert!(epsilon_eval(&eps, hi).unwrap() <= eps.eta.sum() * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn bilinear_symmetric_and_bilinear(s1 in 0u64..1000, s2 in 0u64..1000, c in -3.0f64..3.0) {
        let g = grid();
        let j = g.j_min();
        let u0 = LabRng::new(s1, 3).bandlimited_field(g, j, j);
        let v0 = LabRng::new(s2, 3).bandlimited_field(g, j, j);
        let u = Trajectory::Heat(u0.clone());
        let v = Trajectory::Heat(v0);
        let t = 0.3;
        let q = TimeQuadrature::new(t, 12).unwrap();
        for sym in [SymbolSpec::Scalar1, SymbolSpec::ScalarCone] {
            let uv = bilinear_b(&u, &v, t, &q, sym).unwrap();
            let vu = bilinear_b(&v, &u, t, &q, sym).unwrap();
            let scale = uv.max_abs_coef().max(1e-300);
            prop_assert!(uv.sub(&vu).unwrap().max_abs_coef() <= 1e-13 * scale);
            let cu = Trajectory::Heat(u0.scale(Complex64::new(c, 0.0)));
            let cuv = bilinear_b(&cu, &v, t, &q, sym).unwrap();
            prop_assert!(cuv.sub(&uv.scale_real(c)).unwrap().max_abs_coef() <= 1e-13 * scale * (1.0 + c.abs()));
        }
    }
}

#[test]
fn catalan_closed_form_matches_recursion() {
    let rec = catalan_recursive(60);
    for (i, c) in rec.iter().enumerate() {
        assert_eq!(&catalan(i as u32 + 1).unwrap(), c);
    }
    assert!(catalan(0).is_err());
}
