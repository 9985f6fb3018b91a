mod common;

use common::*;
use curved_nbody::equilibria::{catalog, CatalogParams, NAMES};
use curved_nbody::isometry::*;
use proptest::prelude::*;

const KINDS: [RotationKind; 6] = [
    RotationKind::PosElliptic,
    RotationKind::PosEllipticElliptic,
    RotationKind::NegElliptic,
    RotationKind::NegHyperbolic,
    RotationKind::NegEllipticHyperbolic,
    RotationKind::NegParabolic,
];

fn metric(kind: RotationKind) -> [f64; 4] {
    if kind.positive() { [1.0; 4] } else { [1.0, 1.0, 1.0, -1.0] }
}

fn close(a: &Mat4<f64>, b: &Mat4<f64>, tol: f64) -> bool {
    (0..4).all(|i| (0..4).all(|j| (a[i][j] - b[i][j]).abs() < tol))
}

proptest! {
    #[test]
    fn rotations_preserve_the_ambient_form(k in 0usize..6, theta in -4.0f64..4.0, s in -2.0f64..2.0) {
        let kind = KINDS[k];
        let m = rotation_matrix(kind, RotationParams { theta, s_or_phi: s });
        let g = metric(kind);
        for i in 0..4 {
            for j in 0..4 {
                let v: f64 = (0..4).map(|r| m[r][i] * g[r] * m[r][j]).sum();
                let expected = if i == j { g[i] } else { 0.0 };
                prop_assert!((v - expected).abs() < 1e-10 * s.cosh().powi(4));
            }
        }
    }

    #[test]
    fn rotations_compose_additively(k in 0usize..6, t1 in -2.0f64..2.0, t2 in -2.0f64..2.0, s1 in -1.5f64..1.5, s2 in -1.5f64..1.5) {
        let kind = KINDS[k];
        let a = rotation_matrix(kind, RotationParams { theta: t1, s_or_phi: s1 });
        let b = rotation_matrix(kind, RotationParams { theta: t2, s_or_phi: s2 });
        let c = rotation_matrix(kind, RotationParams { theta: t1 + t2, s_or_phi: s1 + s2 });
        prop_assert!(close(&mat_mul(&a, &b), &c, 1e-10 * (s1.abs() + s2.abs()).cosh() * 10.0));
    }

    #[test]
    fn catalog_trajectories_are_rotated_initial_configurations(idx in 0usize..12, t in -3.0f64..3.0) {
        let e = catalog(NAMES[idx], &CatalogParams::default()).unwrap();
        let m = rotation_matrix(e.spec.kind, e.spec.rotation_params(t));
        let s0 = generate_trajectory(&e.spec, 0.0).unwrap();
        let st = generate_trajectory(&e.spec, t).unwrap();
        for i in 0..e.spec.n() {
            let scale = st.q[i].norm().max(1.0);
            prop_assert!((mat_vec(&m, s0.q[i]) - st.q[i]).max_abs() < 1e-12 * scale);
            prop_assert!((mat_vec(&m, s0.v[i]) - st.v[i]).max_abs() < 1e-11 * scale);
        }
    }

    #[test]
    fn parabolic_ansatz_is_a_rotation_of_its_start(alpha in -1.0f64..1.0, beta in -1.0f64..1.0, gamma in -2.0f64..2.0, t in -2.0f64..2.0) {
        let delta = (alpha * alpha + beta * beta + gamma * gamma + 1.0).sqrt();
        let spec = RESpec {
            kind: RotationKind::NegParabolic,
            curvature: curvature(-1.0),
            masses: vec![1.0],
            bodies: vec![BodyConstants::Parabolic { alpha, beta, gamma, delta }],
            alpha: 0.0,
            beta: 0.0,
        };
        let m = rotation_matrix(spec.kind, spec.rotation_params(t));
        let [q0, _, _] = body_kinematics(&spec, 0, 0.0);
        let [qt, _, _] = body_kinematics(&spec, 0, t);
        prop_assert!((mat_vec(&m, q0) - qt).max_abs() < 1e-10 * qt.norm().max(1.0));
    }
}

#[test]
fn kind_names_round_trip() {
    for kind in KINDS {
        assert_eq!(RotationKind::from_name(kind.name()), Some(kind));
    }
    assert_eq!(RotationKind::from_name("bogus"), None);
}
