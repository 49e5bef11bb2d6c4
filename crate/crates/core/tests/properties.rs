use approx::assert_relative_eq;
use csk_core::csk::PseudoVariance;
use csk_core::freeconv::{affine_apply, AffineMap};
use csk_core::laws::LawSpec;
use csk_core::reciprocity::{reciprocal_pv, reciprocal_shape};
use csk_core::report::Report;
use csk_core::transforms::TransformEvaluator;
use csk_core::{CauchyTransform, ExtendedReal};
use num_complex::Complex64;
use proptest::prelude::*;

fn semicircle() -> impl Strategy<Value = LawSpec> {
    (-3.0..3.0f64, 0.1..4.0f64)
        .prop_map(|(center, variance)| LawSpec::Semicircle { center, variance })
}

fn cubic() -> impl Strategy<Value = LawSpec> {
    (0.2..3.0f64, 0.0..3.0f64, 0.0..2.0f64).prop_map(|(a, b, c)| LawSpec::Cubic { a, b, c })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_g_is_herglotz(spec in cubic(), x in -30.0..30.0f64, y in 1e-3..20.0f64) {
        let g = spec.closed_g(Complex64::new(x, y)).unwrap();
        prop_assert!(g.im < 0.0);
    }

    #[test]
    fn closed_r_inverts_g(spec in cubic(), t in 0.05..0.95f64) {
        let tr = spec.closed_transform().unwrap();
        let w = t * tr.g_at_b().to_f64().min(10.0);
        let u = tr.inverse_k(w).unwrap();
        prop_assert!((tr.g_real(u).unwrap() - w).abs() <= 1e-10 * (1.0 + w));
    }

    #[test]
    fn affine_mean_transforms(spec in semicircle(), gamma in -2.0..2.0f64, delta in prop_oneof![-3.0..-0.2f64, 0.2..3.0f64]) {
        let nu = spec.build_measure().unwrap();
        let m0 = nu.mean().unwrap().to_f64();
        let img = affine_apply(&nu, AffineMap::new(gamma, delta).unwrap()).unwrap();
        let m = img.mean().unwrap().to_f64();
        prop_assert!((m - (m0 - gamma) / delta).abs() < 1e-9 * (1.0 + m.abs()));
    }

    #[test]
    fn reflection_is_an_involution(spec in semicircle(), x in -8.0..8.0f64) {
        let nu = spec.build_measure().unwrap();
        let back = nu.reflect().unwrap().reflect().unwrap();
        prop_assert!((back.density_at(x) - nu.density_at(x)).abs() < 1e-14);
    }

    #[test]
    fn reciprocal_shape_is_an_involution(a in 0.1..3.0f64, b in -2.0..2.0f64, c in 0.0..2.0f64, m in 0.05..10.0f64) {
        let q = PseudoVariance::Quadratic { a, b, c, m0: 0.0 };
        let k = reciprocal_shape(&q).unwrap();
        let back = reciprocal_shape(&k).unwrap();
        let same = matches!(back, PseudoVariance::Quadratic { a: a2, b: b2, c: c2, m0 } if (a2, b2, c2, m0) == (a, b, c, 0.0));
        prop_assert!(same);
        let expected = k.eval(-m).unwrap();
        prop_assert!((reciprocal_pv(&q, -m).unwrap() - expected).abs() <= 1e-12 * expected.abs());
    }

    #[test]
    fn report_pass_matches_residual(res in proptest::collection::vec(0.0..1.0f64, 1..20), tol in 0.0..1.0f64) {
        let mut r = Report::new("p", tol);
        for (i, &v) in res.iter().enumerate() {
            r.record(i as f64, 0.0, v, v);
        }
        prop_assert_eq!(r.pass, r.max_residual <= tol);
    }
}

#[test]
fn law_specs_round_trip_through_json() {
    let specs = [
        LawSpec::Cubic {
            a: 1.0,
            b: 0.0,
            c: 0.0,
        },
        LawSpec::FreeTakacs { r: 0.5 },
        LawSpec::FreeAbel {},
        LawSpec::Semicircle {
            center: 0.5,
            variance: 2.0,
        },
    ];
    for s in specs {
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<LawSpec>(&text).unwrap(), s);
    }
    let parsed: LawSpec = serde_json::from_str(r#"{"kind":"free-takacs","r":0.5}"#).unwrap();
    assert_eq!(parsed, LawSpec::FreeTakacs { r: 0.5 });
    assert!(
        serde_json::from_str::<LawSpec>(r#"{"kind":"cubic","a":1,"b":0,"c":0,"d":1}"#).is_err()
    );
    assert!(serde_json::from_str::<LawSpec>(r#"{"kind":"free-abel","r":1}"#).is_err());
}

#[test]
fn quadrature_and_closed_forms_agree_on_half_stable() {
    let spec = LawSpec::FreeHalfStable { p: 1.0 };
    let ev = TransformEvaluator::new(spec.build_measure().unwrap()).unwrap();
    assert_eq!(ev.mean(), ExtendedReal::NegInfinity);
    assert_relative_eq!(ev.g_at_b().to_f64(), 1.0, max_relative = 1e-7);
    assert_relative_eq!(ev.r_transform(0.25).unwrap(), -2.0, max_relative = 1e-8);
}
