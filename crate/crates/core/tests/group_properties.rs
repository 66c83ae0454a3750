use heiscone_core::{ConeSpec, Point};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point> {
    (-10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0)
        .prop_map(|(x, y, z)| Point::new(x, y, z).unwrap())
}

fn close(a: Point, b: Point) -> bool {
    let scale = a
        .coords()
        .iter()
        .chain(b.coords().iter())
        .fold(1.0f64, |m, c| m.max(c.abs()));
    a.max_abs_diff(&b) <= 1e-12 * scale
}

proptest! {
    #[test]
    fn associative(a in point(), b in point(), c in point()) {
        prop_assert!(close((a * b) * c, a * (b * c)));
    }

    #[test]
    fn identity_and_inverse(a in point()) {
        prop_assert_eq!(a * Point::ORIGIN, a);
        prop_assert_eq!(Point::ORIGIN * a, a);
        prop_assert!(close(a * a.inverse(), Point::ORIGIN));
        prop_assert!(close(a.inverse() * a, Point::ORIGIN));
    }

    #[test]
    fn dilation_is_automorphism(a in point(), b in point(), lambda in 0.01f64..50.0) {
        let lhs = (a * b).dilate(lambda).unwrap();
        let rhs = a.dilate(lambda).unwrap() * b.dilate(lambda).unwrap();
        prop_assert!(close(lhs, rhs));
    }

    #[test]
    fn shear_is_automorphism(a in point(), b in point(), t in -5.0f64..5.0) {
        prop_assert!(close((a * b).shear(t), a.shear(t) * b.shear(t)));
        prop_assert!(close(a.shear(t).shear(-t), a));
    }

    #[test]
    fn rotation_is_automorphism(a in point(), b in point(), theta in -4.0f64..4.0) {
        prop_assert!(close((a * b).rotate_z(theta), a.rotate_z(theta) * b.rotate_z(theta)));
    }

    #[test]
    fn lift_inverts_projection(a in point()) {
        prop_assert!(close(Point::lift(a.project(), a.x()), a));
    }

    #[test]
    fn cones_are_dilation_invariant(a in point(), lambda in 0.1f64..10.0, alpha in 0.05f64..5.0) {
        let d = a.dilate(lambda).unwrap();
        for cone in [ConeSpec::full(alpha).unwrap(), ConeSpec::flat(alpha).unwrap()] {
            // exact arithmetic would give equality; skip points on the boundary
            let margin = (a.y().abs() - alpha * a.x().abs()).abs().min((a.z().abs() - alpha * a.x() * a.x() / 2.0).abs());
            prop_assume!(margin > 1e-9);
            prop_assert_eq!(cone.contains(a, 0.0).unwrap(), cone.contains(d, 0.0).unwrap());
        }
    }

    #[test]
    fn full_cone_slice_is_flat_cone(x in -5.0f64..5.0, y in -5.0f64..5.0, alpha in 0.05f64..5.0) {
        let p = Point::new(x, y, 0.0).unwrap();
        prop_assert_eq!(
            ConeSpec::flat(alpha).unwrap().contains(p, 0.0).unwrap(),
            ConeSpec::full(alpha).unwrap().contains(p, 0.0).unwrap()
        );
    }

    #[test]
    fn translated_membership_is_left_invariant(g in point(), b in point(), p in point(), alpha in 0.05f64..5.0) {
        let cone = ConeSpec::full(alpha).unwrap();
        let rel = b.relative(p);
        let margin = (rel.y().abs() - alpha * rel.x().abs()).abs().min((rel.z().abs() - alpha * rel.x() * rel.x() / 2.0).abs());
        prop_assume!(margin > 1e-6);
        prop_assert_eq!(
            cone.contains_translated(b, p, 0.0).unwrap(),
            cone.contains_translated(g * b, g * p, 0.0).unwrap()
        );
    }
}
