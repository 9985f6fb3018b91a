#![allow(dead_code)]

use curved_nbody::dynamics::{detect_singularity, PhaseState};
use curved_nbody::geometry::{inner, project_to_tangent, Curvature, ManifoldPoint, Vec4};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn curvature(kappa: f64) -> Curvature<f64> {
    Curvature::new(kappa).unwrap()
}

/// Uniform-ish point on the sphere or a point on the hyperboloid with
/// spatial part in a box of half-width 2.
pub fn random_point(rng: &mut impl Rng, k: Curvature<f64>) -> Vec4<f64> {
    if k.is_positive() {
        loop {
            let v = Vec4::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let n = v.norm();
            if n > 0.1 && n <= 1.0 {
                return v * (k.radius() / n);
            }
        }
    } else {
        let (w, x, y) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let z = (1.0 / k.kappa().abs() + w * w + x * x + y * y).sqrt();
        Vec4::new(w, x, y, z)
    }
}

pub fn random_tangent(rng: &mut impl Rng, q: Vec4<f64>, k: Curvature<f64>, scale: f64) -> Vec4<f64> {
    let d = Vec4::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
    let p = ManifoldPoint::new(q, k).unwrap();
    let t = project_to_tangent(&p, d).d();
    debug_assert!(inner(q, t, k).abs() < 1e-12);
    t
}

/// A random state whose pairwise singularity margin exceeds `1e-2`.
pub fn random_state(rng: &mut impl Rng, kappa: f64, n: usize) -> PhaseState<f64> {
    random_state_with_speed(rng, kappa, n, 0.5)
}

pub fn random_state_with_speed(rng: &mut impl Rng, kappa: f64, n: usize, speed: f64) -> PhaseState<f64> {
    let k = curvature(kappa);
    loop {
        let q: Vec<_> = (0..n).map(|_| random_point(rng, k)).collect();
        if detect_singularity(&q, k).margin < 1e-2 {
            continue;
        }
        let v = q.iter().map(|&qi| random_tangent(rng, qi, k, speed)).collect();
        let masses = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        return PhaseState::new(k, masses, q, v, 0.0).unwrap();
    }
}

pub fn tesseract() -> Vec<Vec4<f64>> {
    let mut out = Vec::new();
    for s in 0..16u32 {
        let c = |b: u32| if s >> b & 1 == 1 { -0.5 } else { 0.5 };
        out.push(Vec4::new(c(0), c(1), c(2), c(3)));
    }
    out
}

pub fn orthoplex() -> Vec<Vec4<f64>> {
    let mut out = Vec::new();
    for c in 0..4 {
        for s in [1.0, -1.0] {
            let mut a = [0.0; 4];
            a[c] = s;
            out.push(Vec4::from_array(a));
        }
    }
    out
}

pub fn max_norm(vs: &[Vec4<f64>]) -> f64 {
    vs.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
