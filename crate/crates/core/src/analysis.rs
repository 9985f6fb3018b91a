//! Qualitative classification of sampled trajectories and linear stability
//! of rotating Lagrangian triangles.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Complex, DMatrix, Schur, SymmetricEigen};
use rayon::prelude::*;

use crate::dynamics::PhaseState;
use crate::equilibria::{catalog, CatalogParams};
use crate::error::{Error, Result};
use crate::geometry::{Curvature, Plane, Vec4};
use crate::integrator::{integrate_variational, IntegratorConfig, TrajectorySample};
use crate::isometry::{generate_trajectory, RESpec, RotationKind};

/// Tolerance on the constancy of the per-body surface parameters.
pub const SURFACE_TOL: f64 = 1e-7;
/// Position spread below which a body counts as fixed.
pub const FIXED_TOL: f64 = 1e-9;
/// Threshold for a nonzero angular-momentum component.
pub const MOMENTUM_TOL: f64 = 1e-9;
pub const MIN_SAMPLES: usize = 8;

/// Band around 1 for multipliers forced by symmetries and integrals.
pub const DELTA_TRIV: f64 = 1e-5;
/// Band around the unit circle for elliptic multipliers.
pub const DELTA_UNIT: f64 = 1e-5;
const SCHUR_EPS: [f64; 4] = [1e-14, 1e-13, 1e-12, 1e-11];
const SCHUR_MAX_ITER: usize = 10_000;
/// Final width of a bisection bracket.
pub const BISECTION_WIDTH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrajectoryTag {
    FixedPoint,
    CircleMotion,
    /// Bodies on the complementary wx and yz great circles, each group fixed
    /// or rotating.
    ComplementaryMixed,
    CliffordTorus,
    GeodesicHyperbola,
    /// Motion on non-geodesic hyperbolas `w, x` constant.
    HyperbolaMotion,
    HyperbolicCylinder,
    Unclassified,
}

impl TrajectoryTag {
    pub fn name(self) -> &'static str {
        match self {
            TrajectoryTag::FixedPoint => "FixedPoint",
            TrajectoryTag::CircleMotion => "CircleMotion",
            TrajectoryTag::ComplementaryMixed => "ComplementaryMixed",
            TrajectoryTag::CliffordTorus => "CliffordTorus",
            TrajectoryTag::GeodesicHyperbola => "GeodesicHyperbola",
            TrajectoryTag::HyperbolaMotion => "HyperbolaMotion",
            TrajectoryTag::HyperbolicCylinder => "HyperbolicCylinder",
            TrajectoryTag::Unclassified => "Unclassified",
        }
    }
}

impl fmt::Display for TrajectoryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a single body does along the samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodyMotion {
    Fixed,
    Circle,
    Torus,
    GeodesicHyperbola,
    Hyperbola,
    Cylinder,
    Irregular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyFit {
    pub motion: BodyMotion,
    /// `(w² + x²)^{1/2}`, averaged over samples.
    pub r: f64,
    /// `(y² + z²)^{1/2}` for κ > 0, `(z² − y²)^{1/2}` for κ < 0.
    pub rho_or_eta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryClass {
    pub tag: TrajectoryTag,
    pub bodies: Vec<BodyFit>,
    /// Angular-momentum components that are nonzero along the samples.
    pub momentum_pattern: Vec<Plane>,
}

fn spread(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

fn fit_body(positions: &[Vec4<f64>], k: Curvature<f64>) -> BodyFit {
    let positive = k.is_positive();
    let p1 = positions.iter().map(|q| q.w * q.w + q.x * q.x);
    let p2 = positions.iter().map(|q| if positive { q.y * q.y + q.z * q.z } else { q.z * q.z - q.y * q.y });
    let count = positions.len() as f64;
    let r = (p1.clone().sum::<f64>() / count).max(0.0).sqrt();
    let rho_or_eta = (p2.clone().sum::<f64>() / count).max(0.0).sqrt();
    let scale = positions[0].max_abs().max(1.0);
    let constant = spread(p1) < SURFACE_TOL * scale * scale && spread(p2) < SURFACE_TOL * scale * scale;
    let comp_spread = |c: usize| spread(positions.iter().map(move |q| q.get(c)));
    let moving = |a: usize, b: usize, tol: f64| comp_spread(a) > tol || comp_spread(b) > tol;
    let motion = if !constant {
        BodyMotion::Irregular
    } else if (0..4).all(|c| comp_spread(c) < FIXED_TOL * scale) {
        BodyMotion::Fixed
    } else {
        let wx = moving(0, 1, SURFACE_TOL * scale);
        let yz = moving(2, 3, SURFACE_TOL * scale);
        match (positive, wx, yz) {
            (_, false, false) => BodyMotion::Irregular,
            (true, true, true) => BodyMotion::Torus,
            (true, _, _) => BodyMotion::Circle,
            (false, true, false) => BodyMotion::Circle,
            (false, false, true) if r < SURFACE_TOL.sqrt() * scale => BodyMotion::GeodesicHyperbola,
            (false, false, true) => BodyMotion::Hyperbola,
            (false, true, true) if r < SURFACE_TOL.sqrt() * scale => BodyMotion::GeodesicHyperbola,
            (false, true, true) => BodyMotion::Cylinder,
        }
    };
    BodyFit { motion, r, rho_or_eta }
}

fn tag_from_fits(fits: &[BodyFit], k: Curvature<f64>) -> TrajectoryTag {
    use BodyMotion as M;
    if fits.iter().any(|f| f.motion == M::Irregular) {
        return TrajectoryTag::Unclassified;
    }
    if fits.iter().all(|f| f.motion == M::Fixed) {
        return TrajectoryTag::FixedPoint;
    }
    let has = |m: M| fits.iter().any(|f| f.motion == m);
    if k.is_positive() {
        if has(M::Torus) {
            return TrajectoryTag::CliffordTorus;
        }
        let tol = SURFACE_TOL.sqrt() * k.radius();
        let on_wx = |f: &BodyFit| f.rho_or_eta < tol;
        let on_yz = |f: &BodyFit| f.r < tol;
        let complementary = fits.iter().all(|f| on_wx(f) || on_yz(f)) && fits.iter().any(on_wx) && fits.iter().any(on_yz);
        if complementary {
            TrajectoryTag::ComplementaryMixed
        } else {
            TrajectoryTag::CircleMotion
        }
    } else if has(M::Cylinder) {
        TrajectoryTag::HyperbolicCylinder
    } else if has(M::Hyperbola) {
        if has(M::Circle) {
            TrajectoryTag::Unclassified
        } else {
            TrajectoryTag::HyperbolaMotion
        }
    } else if has(M::GeodesicHyperbola) {
        if has(M::Circle) {
            TrajectoryTag::Unclassified
        } else {
            TrajectoryTag::GeodesicHyperbola
        }
    } else {
        TrajectoryTag::CircleMotion
    }
}

/// Maps a sampled trajectory onto the taxonomy of rigid motions.
pub fn classify(samples: &[TrajectorySample]) -> Result<TrajectoryClass> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_SAMPLES, got: samples.len() });
    }
    let k = samples[0].state.curvature;
    let n = samples[0].state.n();
    let bodies: Vec<BodyFit> = (0..n)
        .map(|i| {
            let pos: Vec<Vec4<f64>> = samples.iter().map(|s| s.state.q[i]).collect();
            fit_body(&pos, k)
        })
        .collect();
    let momentum_pattern = Plane::ALL
        .iter()
        .copied()
        .filter(|&p| samples.iter().any(|s| s.integrals.component(p).abs() > MOMENTUM_TOL))
        .collect();
    Ok(TrajectoryClass { tag: tag_from_fits(&bodies, k), bodies, momentum_pattern })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    TotallyElliptic,
    ComplexSaddle,
    Mixed,
}

impl StabilityClass {
    pub fn name(self) -> &'static str {
        match self {
            StabilityClass::TotallyElliptic => "TotallyElliptic",
            StabilityClass::ComplexSaddle => "ComplexSaddle",
            StabilityClass::Mixed => "Mixed",
        }
    }
}

impl fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which subspace the variational flow is restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    /// Tangent space of the constraint manifold inside the invariant great
    /// sphere that contains the orbit.
    GreatSphere,
    /// Tangent space of the full constraint manifold.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict {
    /// All eigenvalues of the reduced monodromy matrix.
    pub multipliers: Vec<Complex<f64>>,
    pub n_trivial: usize,
    pub classification: StabilityClass,
    /// Largest `||λ| − 1|` over the nontrivial multipliers.
    pub max_off_unit: f64,
    pub period: f64,
}

impl StabilityVerdict {
    /// Dimension of the reduced variational system.
    pub fn dimension(&self) -> usize {
        self.multipliers.len()
    }
}

/// Orthonormal basis of the tangent space of the constraints at `state`,
/// optionally also fixing the coordinate that vanishes for every body.
pub fn tangent_basis(state: &PhaseState<f64>, reduction: Reduction) -> Result<DMatrix<f64>> {
    let n = state.n();
    let d = 8 * n;
    let k = state.curvature;
    let (kk, sig) = (k.kappa(), k.sigma());
    let g = |u: Vec4<f64>| [u.w, u.x, u.y, sig * u.z];
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut pos = vec![0.0; d];
        let mut vel = vec![0.0; d];
        let (gq, gv) = (g(state.q[i]), g(state.v[i]));
        for c in 0..4 {
            pos[4 * i + c] = 2.0 * kk * gq[c];
            vel[4 * i + c] = gv[c];
            vel[4 * n + 4 * i + c] = gq[c];
        }
        rows.push(pos);
        rows.push(vel);
    }
    if reduction == Reduction::GreatSphere {
        let c = (0..4)
            .find(|&c| (0..n).all(|i| state.q[i].get(c).abs() < 1e-12 && state.v[i].get(c).abs() < 1e-12))
            .ok_or_else(|| Error::Domain("orbit does not lie in a coordinate great sphere".into()))?;
        for i in 0..n {
            for off in [4 * i, 4 * n + 4 * i] {
                let mut row = vec![0.0; d];
                row[off + c] = 1.0;
                rows.push(row);
            }
        }
    }
    let cm = DMatrix::from_fn(rows.len(), d, |r, c| rows[r][c]);
    let eig = SymmetricEigen::new(cm.transpose() * &cm);
    let top = eig.eigenvalues.amax().max(1.0);
    let keep: Vec<usize> = (0..d).filter(|&i| eig.eigenvalues[i].abs() < 1e-10 * top).collect();
    Ok(DMatrix::from_fn(d, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])]))
}

/// Eigenvalues by real Schur decomposition, relaxing the deflation
/// threshold when the QR iteration stalls.
fn eigenvalues(m: DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    for eps in SCHUR_EPS {
        if let Some(schur) = Schur::try_new(m.clone(), eps, SCHUR_MAX_ITER) {
            return Ok(schur.complex_eigenvalues().iter().copied().collect());
        }
    }
    Err(Error::Domain("eigenvalue iteration did not converge".into()))
}

/// Classifies multipliers after removing the trivial ones.
pub fn classify_multipliers(multipliers: &[Complex<f64>]) -> (usize, StabilityClass, f64) {
    let (trivial, rest): (Vec<&Complex<f64>>, Vec<&Complex<f64>>) = multipliers.iter().partition(|l| (**l - Complex::new(1.0, 0.0)).norm() < DELTA_TRIV);
    let max_off_unit = rest.iter().map(|l| (l.norm() - 1.0).abs()).fold(0.0, f64::max);
    let class = if max_off_unit < DELTA_UNIT {
        StabilityClass::TotallyElliptic
    } else if rest.iter().any(|l| (l.norm() - 1.0).abs() >= DELTA_UNIT && l.im.abs() > DELTA_UNIT) {
        StabilityClass::ComplexSaddle
    } else {
        StabilityClass::Mixed
    };
    (trivial.len(), class, max_off_unit)
}

/// Linear stability of a simply rotating relative equilibrium over one
/// period `2π/|α|`, computed in the inertial frame.
pub fn monodromy(spec: &RESpec<f64>, reduction: Reduction, cfg: &IntegratorConfig) -> Result<StabilityVerdict> {
    if spec.kind != RotationKind::PosElliptic {
        return Err(Error::ClassMismatch("monodromy needs a simply rotating orbit with kappa > 0".into()));
    }
    if spec.alpha == 0.0 {
        return Err(Error::Domain("alpha must be nonzero".into()));
    }
    let period = 2.0 * PI / spec.alpha.abs();
    let state0 = generate_trajectory(spec, 0.0)?;
    let (_, phi) = integrate_variational(&state0, period, cfg)?;
    let basis = tangent_basis(&state0, reduction)?;
    let m = basis.transpose() * phi * &basis;
    let multipliers = eigenvalues(m)?;
    let (n_trivial, classification, max_off_unit) = classify_multipliers(&multipliers);
    Ok(StabilityVerdict { multipliers, n_trivial, classification, max_off_unit, period })
}

/// Equal unit masses on an equilateral triangle of radius `r` in the great
/// sphere `z = 0` of the unit 3-sphere.
pub fn lagrangian_family_spec(r: f64) -> Result<RESpec<f64>> {
    let params = CatalogParams { kappa: Some(1.0), mass: Some(1.0), r: Some(r), ..Default::default() };
    Ok(catalog("lagrangian_s3", &params)?.spec)
}

/// Integration settings used by the stability scan.
pub fn scan_integrator_config() -> IntegratorConfig {
    IntegratorConfig { rel_tol: 1e-11, abs_tol: 1e-12, ..IntegratorConfig::default() }
}

fn lagrangian_verdict(r: f64, cfg: &IntegratorConfig) -> Result<StabilityVerdict> {
    monodromy(&lagrangian_family_spec(r)?, Reduction::GreatSphere, cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub r: f64,
    pub verdict: std::result::Result<StabilityVerdict, Error>,
}

impl ScanPoint {
    pub fn totally_elliptic(&self) -> Option<bool> {
        self.verdict.as_ref().ok().map(|v| v.classification == StabilityClass::TotallyElliptic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub r: f64,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationScan {
    pub grid: Vec<ScanPoint>,
    pub transitions: Vec<Transition>,
}

impl BifurcationScan {
    pub fn failed_points(&self) -> usize {
        self.grid.iter().filter(|p| p.verdict.is_err()).count()
    }
}

fn bisect(lo: f64, hi: f64, lo_state: bool, cfg: &IntegratorConfig) -> Result<Transition> {
    let (mut a, mut b) = (lo, hi);
    while b - a > BISECTION_WIDTH {
        let mid = 0.5 * (a + b);
        let te = lagrangian_verdict(mid, cfg)?.classification == StabilityClass::TotallyElliptic;
        if te == lo_state {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Transition { r: 0.5 * (a + b), bracket: (a, b) })
}

/// Scans the Lagrangian family over `steps` equally spaced radii and
/// refines every change of the totally-elliptic verdict by bisection.
pub fn stability_scan(r_min: f64, r_max: f64, steps: usize, cfg: &IntegratorConfig) -> Result<BifurcationScan> {
    if steps < 8 {
        return Err(Error::Domain("at least 8 grid points required".into()));
    }
    if !(0.0 < r_min && r_min < r_max && r_max < 1.0) {
        return Err(Error::Domain("need 0 < r_min < r_max < 1".into()));
    }
    let grid: Vec<ScanPoint> = (0..steps)
        .into_par_iter()
        .map(|i| {
            let r = r_min + (r_max - r_min) * i as f64 / (steps - 1) as f64;
            ScanPoint { r, verdict: lagrangian_verdict(r, cfg) }
        })
        .collect();
    let ok: Vec<(f64, bool)> = grid.iter().filter_map(|p| p.totally_elliptic().map(|te| (p.r, te))).collect();
    let brackets: Vec<(f64, f64, bool)> = ok.windows(2).filter(|w| w[0].1 != w[1].1).map(|w| (w[0].0, w[1].0, w[0].1)).collect();
    let transitions = brackets.into_par_iter().map(|(a, b, s)| bisect(a, b, s, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(BifurcationScan { grid, transitions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplier_classification() {
        let unit = |th: f64| Complex::new(th.cos(), th.sin());
        let ell = [Complex::new(1.0, 0.0), unit(0.3), unit(-0.3)];
        assert_eq!(classify_multipliers(&ell).1, StabilityClass::TotallyElliptic);
        let z = Complex::new(1.1, 0.2);
        let quad = [z, z.conj(), z.inv(), z.conj().inv()];
        assert_eq!(classify_multipliers(&quad).1, StabilityClass::ComplexSaddle);
        let real = [Complex::new(2.0, 0.0), Complex::new(0.5, 0.0)];
        assert_eq!(classify_multipliers(&real).1, StabilityClass::Mixed);
    }

    #[test]
    fn scan_domain_errors() {
        let cfg = scan_integrator_config();
        assert_eq!(
            stability_scan(0.3, 0.9, 1, &cfg).unwrap_err(),
            Error::Domain("at least 8 grid points required".into())
        );
        assert!(stability_scan(0.3, 1.0, 10, &cfg).is_err());
    }
}
