//! Algebraic existence conditions for relative equilibria, evaluated at t = 0.
//!
//! Each condition is `force sum = centripetal term` per body and coordinate.
//! The force sum for body `i` is
//!
//! ```text
//! Σ_{j≠i} m_j |κ|^{3/2} (c_j − κ P_ij c_i) / [σ(1 − κ² P_ij²)]^{3/2}
//! ```
//!
//! where `c_i` are the body's coordinates written through its constants and
//! `P_ij` is the class-specific pair invariant (`q_i⊙q_j` in disguise).

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::Curvature;
use crate::isometry::{BodyConstants, RESpec, RotationKind};

/// Absolute tolerance on residuals.
pub const EPS_CRIT: f64 = 1e-9;

/// Tolerance for the structural radius and frequency tests.
const EPS_STRUCT: f64 = 1e-9;

/// Which algebraic system was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    PositiveElliptic,
    PositiveEllipticFixedPoint,
    PositiveEllipticElliptic,
    PositiveEllipticEllipticFixedPoint,
    NegativeElliptic,
    NegativeHyperbolic,
    NegativeEllipticHyperbolic,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::PositiveElliptic => "positive-elliptic",
            Criterion::PositiveEllipticFixedPoint => "positive-elliptic-fixed-point",
            Criterion::PositiveEllipticElliptic => "positive-elliptic-elliptic",
            Criterion::PositiveEllipticEllipticFixedPoint => "positive-elliptic-elliptic-fixed-point",
            Criterion::NegativeElliptic => "negative-elliptic",
            Criterion::NegativeHyperbolic => "negative-hyperbolic",
            Criterion::NegativeEllipticHyperbolic => "negative-elliptic-hyperbolic",
        }
    }
}

/// Structural conditions under which a fixed point generates a relative
/// equilibrium.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructuralCondition {
    /// Every body on the wx great circle, `r_i = κ^{-1/2}`.
    AllOnGreatCircle,
    /// Bodies split between `r_i = 0` (fixed) and `r_i = κ^{-1/2}` (rotating).
    GreatCirclePartition { fixed: Vec<usize>, rotating: Vec<usize> },
    /// Bodies split between the complementary wx and yz great circles.
    ComplementaryPartition { wx: Vec<usize>, yz: Vec<usize> },
    /// Frequencies equal in size, `|α| = |β|`.
    EqualFrequencies,
}

impl fmt::Display for StructuralCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructuralCondition::AllOnGreatCircle => write!(f, "r_i=kappa^(-1/2) for all i"),
            StructuralCondition::GreatCirclePartition { fixed, rotating } => {
                write!(f, "r=0 for {fixed:?}, r=kappa^(-1/2) for {rotating:?}")
            }
            StructuralCondition::ComplementaryPartition { wx, yz } => {
                write!(f, "complementary circles wx {wx:?} / yz {yz:?}")
            }
            StructuralCondition::EqualFrequencies => write!(f, "|α|=|β|"),
        }
    }
}

/// Residuals of one algebraic system.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub criterion: Criterion,
    /// `force sum − centripetal term`, per body, in the order `w, x, y, z`.
    pub residuals: Vec<[f64; 4]>,
    pub max_abs: f64,
    pub pass: bool,
    pub conditions: Vec<StructuralCondition>,
}

impl ResidualReport {
    fn new(criterion: Criterion, residuals: Vec<[f64; 4]>, conditions: Vec<StructuralCondition>) -> Self {
        let max_abs = residuals.iter().flatten().fold(0.0f64, |m, &x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) });
        Self { criterion, residuals, max_abs, pass: max_abs < EPS_CRIT, conditions }
    }
}

/// Pair invariants of the active class; equal to `q_i⊙q_j` at t = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCosines {
    pub values: Vec<Vec<f64>>,
}

fn pair_invariant(a: &BodyConstants<f64>, b: &BodyConstants<f64>) -> Result<f64> {
    use BodyConstants as B;
    Ok(match (*a, *b) {
        // ν_ij (κ > 0) and ε_ij (κ < 0) differ only in the sign of z_i z_j,
        // applied by the caller.
        (B::Elliptic { r: ri, a: ai, y: yi, .. }, B::Elliptic { r: rj, a: aj, y: yj, .. }) => {
            ri * rj * (ai - aj).cos() + yi * yj
        }
        (B::EllipticElliptic { r: ri, a: ai, rho: pi, b: bi }, B::EllipticElliptic { r: rj, a: aj, rho: pj, b: bj }) => {
            ri * rj * (ai - aj).cos() + pi * pj * (bi - bj).cos()
        }
        (B::Hyperbolic { w: wi, x: xi, eta: ei, b: bi }, B::Hyperbolic { w: wj, x: xj, eta: ej, b: bj }) => {
            wi * wj + xi * xj - ei * ej * (bi - bj).cosh()
        }
        (
            B::EllipticHyperbolic { r: ri, a: ai, eta: ei, b: bi },
            B::EllipticHyperbolic { r: rj, a: aj, eta: ej, b: bj },
        ) => ri * rj * (ai - aj).cos() - ei * ej * (bi - bj).cosh(),
        _ => return Err(Error::ClassMismatch("bodies of different classes".into())),
    })
}

/// Matrix of pair invariants ν, ω, ε, μ or γ for the spec's class.
pub fn pair_cosines(spec: &RESpec<f64>) -> Result<PairCosines> {
    let n = spec.n();
    let sig = spec.curvature.sigma();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut p = pair_invariant(&spec.bodies[i], &spec.bodies[j])?;
            if let (BodyConstants::Elliptic { z: zi, .. }, BodyConstants::Elliptic { z: zj, .. }) = (spec.bodies[i], spec.bodies[j]) {
                p += sig * zi * zj;
            }
            values[i][j] = p;
        }
    }
    Ok(PairCosines { values })
}

/// Coordinates of a body at t = 0, written through its constants.
fn coords(b: &BodyConstants<f64>) -> [f64; 4] {
    match *b {
        BodyConstants::Elliptic { r, a, y, z } => [r * a.cos(), r * a.sin(), y, z],
        BodyConstants::EllipticElliptic { r, a, rho, b } => [r * a.cos(), r * a.sin(), rho * b.cos(), rho * b.sin()],
        BodyConstants::Hyperbolic { w, x, eta, b } => [w, x, eta * b.sinh(), eta * b.cosh()],
        BodyConstants::EllipticHyperbolic { r, a, eta, b } => [r * a.cos(), r * a.sin(), eta * b.sinh(), eta * b.cosh()],
        BodyConstants::Parabolic { alpha, beta, gamma, delta } => [alpha, beta, gamma, delta],
    }
}

/// Right-hand sides `q̈_i + κ(q̇_i⊙q̇_i) q_i` at t = 0.
fn centripetal(b: &BodyConstants<f64>, k: f64, al: f64, be: f64) -> [f64; 4] {
    let (a2, b2) = (al * al, be * be);
    match *b {
        BodyConstants::Elliptic { r, a, y, z } => {
            let f = (k * r * r - 1.0) * a2 * r;
            [f * a.cos(), f * a.sin(), k * a2 * r * r * y, k * a2 * r * r * z]
        }
        BodyConstants::EllipticElliptic { r, a, rho, b } => {
            let s = k * a2 * r * r + k * b2 * rho * rho;
            [(s - a2) * r * a.cos(), (s - a2) * r * a.sin(), (s - b2) * rho * b.cos(), (s - b2) * rho * b.sin()]
        }
        BodyConstants::Hyperbolic { w, x, eta, b } => {
            let f = (k * eta * eta + 1.0) * b2 * eta;
            [k * b2 * eta * eta * w, k * b2 * eta * eta * x, f * b.sinh(), f * b.cosh()]
        }
        BodyConstants::EllipticHyperbolic { r, a, eta, b } => {
            let s = k * a2 * r * r + k * b2 * eta * eta;
            [(s - a2) * r * a.cos(), (s - a2) * r * a.sin(), (s + b2) * eta * b.sinh(), (s + b2) * eta * b.cosh()]
        }
        BodyConstants::Parabolic { .. } => [f64::NAN; 4],
    }
}

fn force_sums(spec: &RESpec<f64>) -> Result<Vec<[f64; 4]>> {
    let k = spec.curvature;
    let kk = k.kappa();
    let sig = k.sigma();
    let pre = kk.abs().powf(1.5);
    let pc = pair_cosines(spec)?;
    let c: Vec<[f64; 4]> = spec.bodies.iter().map(coords).collect();
    let n = spec.n();
    let mut out = vec![[0.0; 4]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let x = kk * pc.values[i][j];
            let d = sig * (1.0 - x * x);
            if d.abs() < crate::dynamics::EPS_SING {
                let kind = if x > 0.0 {
                    crate::dynamics::SingularityKind::Collision(i.min(j), i.max(j))
                } else {
                    crate::dynamics::SingularityKind::Antipodal(i.min(j), i.max(j))
                };
                return Err(Error::Singularity(kind));
            }
            let f = spec.masses[j] * pre / (d * d.sqrt());
            for m in 0..4 {
                out[i][m] += f * (c[j][m] - x * c[i][m]);
            }
        }
    }
    Ok(out)
}

fn criterion_for(kind: RotationKind) -> Result<Criterion> {
    Ok(match kind {
        RotationKind::PosElliptic => Criterion::PositiveElliptic,
        RotationKind::PosEllipticElliptic => Criterion::PositiveEllipticElliptic,
        RotationKind::NegElliptic => Criterion::NegativeElliptic,
        RotationKind::NegHyperbolic => Criterion::NegativeHyperbolic,
        RotationKind::NegEllipticHyperbolic => Criterion::NegativeEllipticHyperbolic,
        RotationKind::NegParabolic => {
            return Err(Error::ClassMismatch(
                "the parabolic ansatz has no existence criterion; use the nonexistence check".into(),
            ))
        }
    })
}

/// Evaluates the existence conditions of the spec's class.
pub fn criterion_residual(spec: &RESpec<f64>) -> Result<ResidualReport> {
    let criterion = criterion_for(spec.kind)?;
    spec.validate()?;
    let lhs = force_sums(spec)?;
    let k = spec.curvature.kappa();
    let res = lhs
        .iter()
        .zip(&spec.bodies)
        .map(|(l, b)| {
            let r = centripetal(b, k, spec.alpha, spec.beta);
            [l[0] - r[0], l[1] - r[1], l[2] - r[2], l[3] - r[3]]
        })
        .collect();
    Ok(ResidualReport::new(criterion, res, vec![]))
}

fn near(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= EPS_STRUCT * scale.max(1.0)
}

/// Evaluates only the force sums and reports which structural condition
/// lets the fixed point generate a relative equilibrium of the spec's class.
pub fn fixed_point_residual(spec: &RESpec<f64>) -> Result<ResidualReport> {
    let k: Curvature<f64> = spec.curvature;
    let criterion = match spec.kind {
        RotationKind::PosElliptic => Criterion::PositiveEllipticFixedPoint,
        RotationKind::PosEllipticElliptic => Criterion::PositiveEllipticEllipticFixedPoint,
        other => {
            return Err(Error::ClassMismatch(format!(
                "fixed-point conditions apply to positive elliptic classes, not {}",
                other.name()
            )))
        }
    };
    spec.validate()?;
    let lhs = force_sums(spec)?;
    let rad = k.radius();
    let mut conditions = vec![];
    match spec.kind {
        RotationKind::PosElliptic => {
            let rs: Vec<f64> = spec.bodies.iter().filter_map(|b| b.r()).collect();
            if rs.iter().all(|&r| near(r, rad, rad)) {
                conditions.push(StructuralCondition::AllOnGreatCircle);
            } else if rs.iter().all(|&r| near(r, 0.0, rad) || near(r, rad, rad)) {
                let (fixed, rotating): (Vec<usize>, Vec<usize>) = (0..rs.len()).partition(|&i| near(rs[i], 0.0, rad));
                conditions.push(StructuralCondition::GreatCirclePartition { fixed, rotating });
            }
        }
        _ => {
            let mut wx = vec![];
            let mut yz = vec![];
            let mut split = true;
            for (i, b) in spec.bodies.iter().enumerate() {
                if let BodyConstants::EllipticElliptic { r, rho, .. } = *b {
                    if near(rho, 0.0, rad) {
                        wx.push(i);
                    } else if near(r, 0.0, rad) {
                        yz.push(i);
                    } else {
                        split = false;
                    }
                }
            }
            if split {
                conditions.push(StructuralCondition::ComplementaryPartition { wx, yz });
            }
            if near(spec.alpha.abs(), spec.beta.abs(), spec.alpha.abs()) {
                conditions.push(StructuralCondition::EqualFrequencies);
            }
        }
    }
    Ok(ResidualReport::new(criterion, lhs, conditions))
}
