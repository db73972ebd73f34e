use curvature_flow::counterexample::{transition_function, PinchProfileSpec};
use curvature_flow::curvature::{g_quantity, PrincipalCurvatures};
use curvature_flow::geometry::{make_spheroid, SupportProfile};
use curvature_flow::io::{parse_support, write_support};
use curvature_flow::speeds::{Speed, SpeedFunction};
use proptest::prelude::*;

fn catalog_speed() -> impl Strategy<Value = SpeedFunction> {
    let all = SpeedFunction::catalog();
    (0..all.len()).prop_map(move |i| all[i].clone())
}

proptest! {
    #[test]
    fn speeds_are_symmetric_homogeneous_and_increasing(
        s in catalog_speed(), a in 0.1f64..10.0, b in 0.1f64..10.0, log_l in -3.0f64..3.0,
    ) {
        let l = log_l.exp();
        let f = s.value(a, b);
        prop_assert!(f > 0.0);
        prop_assert!((s.value(b, a) - f).abs() <= 1e-13 * f);
        let scaled = s.value(l * a, l * b);
        let expected = l.powf(s.degree()) * f;
        prop_assert!((scaled - expected).abs() <= 1e-12 * expected, "{}: {} vs {}", s, scaled, expected);
        let g = s.gradient(a, b);
        prop_assert!(g[0] > 0.0 && g[1] > 0.0);
    }

    #[test]
    fn g_is_symmetric_and_bounded(a in 0.01f64..100.0, b in 0.01f64..100.0) {
        let g = g_quantity(&PrincipalCurvatures::new(a, b).unwrap());
        prop_assert!((0.0..1.0).contains(&g));
        prop_assert_eq!(g, g_quantity(&PrincipalCurvatures::new(b, a).unwrap()));
    }

    #[test]
    fn radii_ignore_translation_and_scale_linearly(
        a in 0.5f64..3.0, b in 0.5f64..3.0, c in -0.3f64..0.3, k in 0.2f64..5.0,
    ) {
        let p = make_spheroid(a, b, 65).unwrap();
        let base = p.radii().unwrap();
        let moved = p.translated(c).radii().unwrap();
        let scaled = p.scaled(k).radii().unwrap();
        // differences of c·cosθ are exact up to cΔ²/12 (second) and cΔ²/6 (first)
        let d = p.delta();
        let shift = c.abs() * d * d / 6.0 * 1.01 + 1e-12;
        for j in 0..base.len() {
            prop_assert!((moved[j].meridional - base[j].meridional).abs() <= shift);
            prop_assert!((moved[j].parallel - base[j].parallel).abs() <= shift);
            let tol = 1e-12 * k.max(1.0) * base[j].meridional.max(1.0);
            prop_assert!((scaled[j].meridional - k * base[j].meridional).abs() <= tol);
            prop_assert!((scaled[j].parallel - k * base[j].parallel).abs() <= tol);
        }
    }

    #[test]
    fn support_csv_round_trips_bit_exactly(values in prop::collection::vec(1.0f64..2.0, 5..40)) {
        let p = SupportProfile::new(values).unwrap();
        let mut buf = Vec::new();
        write_support(&mut buf, &p).unwrap();
        let back = parse_support(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back.values(), p.values());
    }

    #[test]
    fn transition_is_monotone_between_one_and_r1(r1 in 1.1f64..6.0, u0 in 0.01f64..0.9, x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let spec = PinchProfileSpec::new(r1, u0, 1.0).unwrap();
        let (lo, hi) = (x.min(y), x.max(y));
        let (flo, fhi) = (transition_function(&spec, lo), transition_function(&spec, hi));
        prop_assert!((1.0..=r1).contains(&flo) && (1.0..=r1).contains(&fhi));
        prop_assert!(flo <= fhi);
    }
}
