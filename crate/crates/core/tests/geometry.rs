mod common;

use common::*;
use curved_nbody::geometry::*;
use proptest::prelude::*;

fn point(seed: u64, k: Curvature<f64>) -> ManifoldPoint<f64> {
    ManifoldPoint::new(random_point(&mut rng(seed), k), k).unwrap()
}

fn kappa_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![0.2f64..5.0, -5.0f64..-0.2]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn trig_identity(kappa in kappa_strategy(), x in -3.0f64..3.0) {
        let k = curvature(kappa);
        let lhs = kappa * sn(k, x).powi(2) + csn(k, x).powi(2);
        prop_assert!((lhs - 1.0).abs() < 1e-9 * csn(k, x).powi(2).max(1.0));
    }

    #[test]
    fn stereographic_round_trip(kappa in kappa_strategy(), seed in any::<u64>()) {
        let k = curvature(kappa);
        let p = point(seed, k);
        let Ok(s) = stereographic(&p) else { return Ok(()) };
        let back = inverse_stereographic(s, k).unwrap();
        let scale = 1.0f64.max(p.v().norm());
        prop_assert!((back.v() - p.v()).max_abs() < 1e-9 * scale * scale);
    }

    #[test]
    fn hopf_image_lies_on_a_sphere(kappa in 0.2f64..5.0, seed in any::<u64>()) {
        let k = curvature(kappa);
        let h = hopf_map(&point(seed, k)).unwrap();
        let n = (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt();
        prop_assert!((n - 1.0 / kappa).abs() < 1e-12 / kappa);
    }

    #[test]
    fn projections_are_idempotent(kappa in kappa_strategy(), seed in any::<u64>(), d in prop::array::uniform4(-2.0f64..2.0)) {
        let k = curvature(kappa);
        let p = point(seed, k);
        let once = project_to_manifold(p.v() * 1.7, k).unwrap();
        prop_assert!((once.v() - p.v()).max_abs() < 1e-12 * p.v().norm().max(1.0));
        let t = project_to_tangent(&p, Vec4::from_array(d));
        let tt = project_to_tangent(&p, t.d());
        let scale = p.v().norm().powi(2).max(1.0);
        prop_assert!((tt.d() - t.d()).max_abs() < 1e-10 * scale);
        prop_assert!(inner(p.v(), t.d(), k).abs() < 1e-10 * scale);
    }

    #[test]
    fn hyperbolic_pairs_have_cosh_at_least_one(kappa in -5.0f64..-0.2, s1 in any::<u64>(), s2 in any::<u64>()) {
        let k = curvature(kappa);
        let a = point(s1, k);
        let b = point(s2, k);
        prop_assert!(kappa * inner(a.v(), b.v(), k) >= 1.0 - 1e-9);
    }

    #[test]
    fn extended_distance_matches_distance(kappa in kappa_strategy(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let k = curvature(kappa);
        let a = point(s1, k);
        let b = point(s2, k);
        let d = distance(&a, &b).unwrap();
        let e = extended_distance(a.v(), b.v(), k).unwrap();
        prop_assert!((d - e).abs() < 1e-9 * d.max(1.0));
        let e2 = extended_distance(a.v() * 3.0, b.v() * 0.5, k).unwrap();
        prop_assert!((d - e2).abs() < 1e-9 * d.max(1.0));
    }
}

#[test]
fn tori_and_cylinders_lie_on_the_manifold() {
    let k = curvature(1.0);
    assert!(clifford_point(0.6, 0.8, 0.3, 1.2, k).is_ok());
    assert!(clifford_point(0.6, 0.9, 0.3, 1.2, k).is_err());
    let h = curvature(-1.0);
    assert!(cylinder_point(1.0, 2f64.sqrt(), 0.3, 0.7, h).is_ok());
    assert!(cylinder_point(1.0, 1.0, 0.3, 0.7, h).is_err());
}

#[test]
fn coordinate_geodesics_are_unit_speed() {
    for kappa in [1.0, -1.0, 2.5] {
        let k = curvature(kappa);
        for plane in [Plane::WX, Plane::YZ] {
            let (Ok(a), Ok(b)) = (coordinate_geodesic(plane, 0.2, k), coordinate_geodesic(plane, 0.5, k)) else { continue };
            assert!((distance(&a, &b).unwrap() - 0.3 * k.radius()).abs() < 1e-12);
        }
    }
}
