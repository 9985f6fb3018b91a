mod common;

use curved_nbody::analysis::*;
use curved_nbody::dynamics::first_integrals;
use curved_nbody::equilibria::{catalog, CatalogParams};
use curved_nbody::geometry::{Plane, Vec4};
use curved_nbody::integrator::{integrate, uniform_times, IntegratorConfig, TrajectorySample};
use curved_nbody::isometry::{generate_trajectory, RESpec};
use curved_nbody::Error;

fn closed_form_samples(spec: &RESpec<f64>, count: usize) -> Vec<TrajectorySample> {
    uniform_times(0.0, 6.0, count)
        .into_iter()
        .map(|t| {
            let state = generate_trajectory(spec, t).unwrap();
            let integrals = first_integrals(&state).unwrap();
            TrajectorySample { t, state, integrals }
        })
        .collect()
}

fn classify_entry(name: &str) -> TrajectoryClass {
    let e = catalog(name, &CatalogParams::default()).unwrap();
    classify(&closed_form_samples(&e.spec, 40)).unwrap()
}

#[test]
fn catalog_orbits_get_their_tags() {
    let cases = [
        ("lagrangian_s3", TrajectoryTag::CircleMotion),
        ("scalene_great_circle", TrajectoryTag::CircleMotion),
        ("six_mixed_fixed_rotating", TrajectoryTag::ComplementaryMixed),
        ("triangle_double", TrajectoryTag::CliffordTorus),
        ("six_mixed_scalene", TrajectoryTag::ComplementaryMixed),
        ("tetrahedron_double", TrajectoryTag::CliffordTorus),
        ("pentatope_double", TrajectoryTag::CliffordTorus),
        ("six_double", TrajectoryTag::ComplementaryMixed),
        ("six_double_scalene", TrajectoryTag::ComplementaryMixed),
        ("lagrangian_h3", TrajectoryTag::CircleMotion),
        ("hyperbolic_h3", TrajectoryTag::HyperbolaMotion),
        ("elliptic_hyperbolic_h3", TrajectoryTag::HyperbolicCylinder),
    ];
    for (name, tag) in cases {
        assert_eq!(classify_entry(name).tag, tag, "{name}");
    }
}

#[test]
fn per_body_motions() {
    use BodyMotion::*;
    let motions = |name: &str| classify_entry(name).bodies.iter().map(|b| b.motion).collect::<Vec<_>>();
    assert_eq!(motions("six_mixed_fixed_rotating"), [Circle, Circle, Circle, Fixed, Fixed, Fixed]);
    assert_eq!(motions("elliptic_hyperbolic_h3"), [GeodesicHyperbola, Cylinder, Cylinder]);
    let torus = classify_entry("triangle_double");
    let (r, rho) = (torus.bodies[0].r, torus.bodies[0].rho_or_eta);
    assert!((r - 0.6).abs() < 1e-12 && (rho - 0.8).abs() < 1e-12);
    assert!(torus.bodies.iter().all(|b| (b.r - r).abs() < 1e-12 && (b.rho_or_eta - rho).abs() < 1e-12));
}

#[test]
fn momentum_patterns() {
    assert_eq!(classify_entry("six_mixed_fixed_rotating").momentum_pattern, vec![Plane::WX]);
    assert_eq!(
        classify_entry("triangle_double").momentum_pattern,
        vec![Plane::WX, Plane::WZ, Plane::XY, Plane::YZ]
    );
    assert_eq!(classify_entry("elliptic_hyperbolic_h3").momentum_pattern, vec![Plane::WX, Plane::YZ]);
}

#[test]
fn resting_scalene_triangle_is_a_fixed_point() {
    let e = catalog("scalene_great_circle", &CatalogParams::default()).unwrap();
    let mut state = e.state.clone();
    state.v = vec![Vec4::zero(); 3];
    let traj = integrate(&state, 5.0, &IntegratorConfig::default(), &uniform_times(0.0, 5.0, 20)).unwrap();
    let class = classify(&traj.samples).unwrap();
    assert_eq!(class.tag, TrajectoryTag::FixedPoint);
    assert!(class.momentum_pattern.is_empty());
}

#[test]
fn integrated_orbit_is_classified_like_its_closed_form() {
    let e = catalog("lagrangian_s3", &CatalogParams { r: Some(0.62), ..Default::default() }).unwrap();
    let traj = integrate(&e.state, 6.0, &IntegratorConfig::default(), &uniform_times(0.0, 6.0, 30)).unwrap();
    let class = classify(&traj.samples).unwrap();
    assert_eq!(class.tag, TrajectoryTag::CircleMotion);
    assert_eq!(class.momentum_pattern, vec![Plane::WX]);
}

#[test]
fn too_few_samples_are_rejected() {
    let e = catalog("lagrangian_s3", &CatalogParams::default()).unwrap();
    assert_eq!(
        classify(&closed_form_samples(&e.spec, 5)).unwrap_err(),
        Error::InsufficientSamples { needed: MIN_SAMPLES, got: 5 }
    );
}

fn verdict(r: f64, reduction: Reduction) -> StabilityVerdict {
    monodromy(&lagrangian_family_spec(r).unwrap(), reduction, &scan_integrator_config()).unwrap()
}

#[test]
fn lagrangian_stability_at_selected_radii() {
    assert_eq!(verdict(0.62, Reduction::GreatSphere).classification, StabilityClass::TotallyElliptic);
    assert_eq!(verdict(0.95, Reduction::GreatSphere).classification, StabilityClass::TotallyElliptic);
    assert_ne!(verdict(0.30, Reduction::GreatSphere).classification, StabilityClass::TotallyElliptic);
    assert_ne!(verdict(0.80, Reduction::GreatSphere).classification, StabilityClass::TotallyElliptic);
}

#[test]
fn multipliers_come_in_reciprocal_pairs() {
    for r in [0.3, 0.62, 0.8] {
        let v = verdict(r, Reduction::GreatSphere);
        assert_eq!(v.dimension(), 12);
        if v.classification == StabilityClass::TotallyElliptic {
            assert_eq!(v.n_trivial, 4, "r {r}");
        }
        for m in &v.multipliers {
            let inv = m.inv();
            let best = v.multipliers.iter().map(|x| (x - inv).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-6 * inv.norm().max(1.0), "r {r}: {m} has no reciprocal");
        }
    }
}

#[test]
fn full_and_great_sphere_reductions_agree() {
    for r in [0.3, 0.62, 0.8, 0.95] {
        let g = verdict(r, Reduction::GreatSphere);
        let f = verdict(r, Reduction::Full);
        assert_eq!(f.dimension(), 18);
        assert_eq!(g.classification, f.classification, "r {r}");
    }
}

#[test]
fn monodromy_rejects_other_classes() {
    let e = catalog("triangle_double", &CatalogParams::default()).unwrap();
    assert!(monodromy(&e.spec, Reduction::GreatSphere, &scan_integrator_config()).is_err());
}

