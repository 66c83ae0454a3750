use heiscone_core::gallery::{generate, run_expected, ExampleKind, ExampleSpec};
use heiscone_core::verify::{
    check_flat_property, check_full_property, check_lemma_vertical_inclusion,
    check_remark_shear_flat, check_shear_union_identity, max_flat_aperture,
};
use heiscone_core::{Point, PointCloud};
use proptest::prelude::*;

fn cloud() -> impl Strategy<Value = PointCloud> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0), 2..25).prop_map(|v| {
        v.into_iter()
            .map(|(x, y, z)| Point::new(x, y, z).unwrap())
            .collect()
    })
}

fn point() -> impl Strategy<Value = Point> {
    (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(x, y, z)| Point::new(x, y, z).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn full_status_survives_translation(c in cloud(), g in point(), alpha in 0.1f64..3.0) {
        let before = check_full_property(&c, alpha, 1e-9, None).unwrap();
        let after = check_full_property(&c.translate(g), alpha, 1e-9, None).unwrap();
        prop_assert_eq!(before.status, after.status);
    }

    #[test]
    fn flat_fail_witness_replays(c in cloud(), alpha in 0.1f64..3.0) {
        let cert = check_flat_property(&c, alpha, 1e-3).unwrap();
        if !cert.is_pass() {
            prop_assert_eq!(cert.replay(), Some(true));
        }
    }

    #[test]
    fn full_fail_witness_replays(c in cloud(), alpha in 0.1f64..3.0) {
        let cert = check_full_property(&c, alpha, 1e-9, None).unwrap();
        if !cert.is_pass() {
            prop_assert_eq!(cert.replay(), Some(true));
        }
    }

    #[test]
    fn aperture_is_translation_invariant(g in point(), ys in prop::collection::vec(-1.0f64..1.0, 3..10)) {
        // flat samples keep z = 0 relative to each other only up to the
        // area term, so build pairs on the x axis of g's frame
        let c: PointCloud = ys.iter().enumerate()
            .map(|(i, &y)| Point::new(i as f64 + 1.0, y * (i as f64 + 1.0), 0.0).unwrap())
            .collect();
        let a = max_flat_aperture(&c, 1e-3).unwrap();
        let b = max_flat_aperture(&c.translate(g), 1e-3).unwrap();
        prop_assert!(a == b || (a - b).abs() <= 1e-9 * a.abs().max(1.0), "{} vs {}", a, b);
    }
}

#[test]
fn flat_status_survives_dilation() {
    for kind in [
        ExampleKind::CubicCurve,
        ExampleKind::PuncturedPlane,
        ExampleKind::LinearGraph(2.0),
    ] {
        let c = generate(&ExampleSpec::new(kind).with_nodes(15)).unwrap();
        for alpha in [0.25, 1.0] {
            let base = check_flat_property(&c, alpha, 0.0).unwrap().status;
            for lambda in [0.5, 3.0] {
                let d = c.dilate(lambda).unwrap();
                assert_eq!(
                    check_flat_property(&d, alpha, 0.0).unwrap().status,
                    base,
                    "{kind:?} {alpha} {lambda}"
                );
            }
        }
    }
}

#[test]
fn sampled_inclusions_hold() {
    for (beta, eps) in [(1.0, 0.5), (0.5, 0.2), (2.0, 1.0)] {
        assert!(
            check_lemma_vertical_inclusion(beta, eps, 500, 101, 1e-9, 11)
                .unwrap()
                .is_pass()
        );
    }
    for (beta, r) in [(1.0, 1.0), (0.5, 2.0)] {
        assert!(check_shear_union_identity(beta, r, 1000, 1e-9, 12)
            .unwrap()
            .is_pass());
    }
    for alpha in [0.5, 1.0, 2.0] {
        assert!(check_remark_shear_flat(alpha, 1000, 21, 1e-9, 13)
            .unwrap()
            .is_pass());
    }
}

#[test]
fn sampled_checks_are_seeded() {
    let a = check_lemma_vertical_inclusion(1.0, 0.5, 100, 11, 1e-9, 5).unwrap();
    let b = check_lemma_vertical_inclusion(1.0, 0.5, 100, 11, 1e-9, 5).unwrap();
    assert_eq!(a, b);
}

#[test]
fn gallery_agrees_with_checkers() {
    for kind in [
        ExampleKind::CubicCurve,
        ExampleKind::PuncturedPlane,
        ExampleKind::VerticalPlane,
        ExampleKind::ConstantGraph(0.0),
        ExampleKind::ConstantGraph(0.1),
        ExampleKind::LinearGraph(-0.5),
    ] {
        for o in run_expected(&ExampleSpec::new(kind), 1e-9).unwrap() {
            assert!(o.agrees(), "{kind:?}: {o:?}");
        }
    }
}
