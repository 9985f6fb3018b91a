//! Explicit relative equilibria and fixed points, built from their
//! coordinates with frequencies computed from closed forms or by Newton's
//! method on the residual system.

use std::f64::consts::PI;

use super::criteria::criterion_residual;
use super::frequencies::{elliptic_hyperbolic_frequencies, hyperbolic_frequency, lagrangian_frequency, solve_squared_frequency};
use super::masses::{masses_for_great_circle_shape, MassSolution};
use crate::dynamics::PhaseState;
use crate::error::{Error, Result};
use crate::geometry::Curvature;
use crate::isometry::{generate_trajectory, BodyConstants, RESpec, RotationKind};

pub const NAMES: [&str; 12] = [
    "lagrangian_s3",
    "scalene_great_circle",
    "six_mixed_fixed_rotating",
    "six_mixed_scalene",
    "triangle_double",
    "tetrahedron_double",
    "pentatope_double",
    "six_double",
    "six_double_scalene",
    "lagrangian_h3",
    "hyperbolic_h3",
    "elliptic_hyperbolic_h3",
];

const TRIANGLE: [f64; 3] = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
const SCALENE_A: [f64; 3] = [0.0, 1.9, 4.0];
const SCALENE_B: [f64; 3] = [0.0, 2.0, 4.2];

/// Free parameters; unset fields take per-entry defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CatalogParams {
    pub kappa: Option<f64>,
    /// Common mass, or the mass of the first body of each triangle when the
    /// masses are solved for.
    pub mass: Option<f64>,
    pub r: Option<f64>,
    pub eta: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// Angle selecting `(α, β)` on the elliptic-hyperbolic frequency circle.
    pub angle: Option<f64>,
    pub phases_a: Option<[f64; 3]>,
    pub phases_b: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub spec: RESpec<f64>,
    pub state: PhaseState<f64>,
}

fn ee(r: f64, a: f64, rho: f64, b: f64) -> BodyConstants<f64> {
    let a = if r == 0.0 { 0.0 } else { a };
    let b = if rho == 0.0 { 0.0 } else { b };
    BodyConstants::EllipticElliptic { r, a, rho, b }
}

fn ell(r: f64, a: f64, y: f64, z: f64) -> BodyConstants<f64> {
    let a = if r == 0.0 { 0.0 } else { a };
    BodyConstants::Elliptic { r, a, y, z }
}

/// Splits a point of S³ into wx and yz polar coordinates.
fn decompose(p: [f64; 4]) -> BodyConstants<f64> {
    let r = p[0].hypot(p[1]);
    let rho = p[2].hypot(p[3]);
    let clean = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
    let (r, rho) = (clean(r), clean(rho));
    ee(r, p[1].atan2(p[0]), rho, p[3].atan2(p[2]))
}

fn solved_masses(phases: [f64; 3], k: Curvature<f64>, m: f64) -> Result<[f64; 3]> {
    match masses_for_great_circle_shape(phases, k)? {
        MassSolution::Masses(ms) => Ok(ms.map(|x| x * m)),
        MassSolution::Infeasible { reason, .. } => Err(Error::Domain(format!("no positive masses for phases {phases:?}: {reason}"))),
    }
}

fn build(name: &'static str, spec: RESpec<f64>) -> Result<CatalogEntry> {
    let state = generate_trajectory(&spec, 0.0)?;
    Ok(CatalogEntry { name, spec, state })
}

/// Builds the named orbit.
pub fn catalog(name: &str, p: &CatalogParams) -> Result<CatalogEntry> {
    let name: &'static str = NAMES
        .iter()
        .find(|&&n| n == name)
        .ok_or_else(|| Error::Domain(format!("unknown catalog entry '{name}'")))?;
    let positive = !matches!(name, "lagrangian_h3" | "hyperbolic_h3" | "elliptic_hyperbolic_h3");
    let kappa = p.kappa.unwrap_or(if positive { 1.0 } else { -1.0 });
    let k = Curvature::new(kappa)?;
    if k.is_positive() != positive {
        return Err(Error::ClassMismatch(format!("{name} needs kappa {} 0", if positive { ">" } else { "<" })));
    }
    let m = p.mass.unwrap_or(1.0);
    if !(m > 0.0) {
        return Err(Error::Domain("mass must be positive".into()));
    }
    let rad = k.radius();
    let alpha = p.alpha.unwrap_or(1.0);
    let spec = |kind, masses: Vec<f64>, bodies, alpha, beta| RESpec { kind, curvature: k, masses, bodies, alpha, beta };
    match name {
        "lagrangian_s3" => {
            let r = p.r.unwrap_or(0.5 * rad);
            let (al, _) = lagrangian_frequency(m, r, k)?;
            let y = (1.0 / kappa - r * r).sqrt();
            let bodies = TRIANGLE.iter().map(|&a| ell(r, a, y, 0.0)).collect();
            build(name, spec(RotationKind::PosElliptic, vec![m; 3], bodies, al, 0.0))
        }
        "scalene_great_circle" => {
            let ph = p.phases_a.unwrap_or(SCALENE_A);
            let ms = solved_masses(ph, k, m)?;
            let bodies = ph.iter().map(|&a| ell(rad, a, 0.0, 0.0)).collect();
            build(name, spec(RotationKind::PosElliptic, ms.to_vec(), bodies, alpha, 0.0))
        }
        "six_mixed_fixed_rotating" | "six_mixed_scalene" => {
            let scalene = name == "six_mixed_scalene";
            let pa = p.phases_a.unwrap_or(if scalene { SCALENE_A } else { TRIANGLE });
            let pb = p.phases_b.unwrap_or(if scalene { SCALENE_B } else { TRIANGLE });
            let (ma, mb) = if scalene { (solved_masses(pa, k, m)?, solved_masses(pb, k, m)?) } else { ([m; 3], [m; 3]) };
            let mut bodies: Vec<_> = pa.iter().map(|&a| ell(rad, a, 0.0, 0.0)).collect();
            bodies.extend(pb.iter().map(|&b| ell(0.0, 0.0, rad * b.cos(), rad * b.sin())));
            let masses = ma.iter().chain(&mb).copied().collect();
            build(name, spec(RotationKind::PosElliptic, masses, bodies, alpha, 0.0))
        }
        "triangle_double" => {
            let r = p.r.unwrap_or(0.6 * rad);
            if !(r > 0.0 && r < rad) {
                return Err(Error::Domain("need 0 < r < kappa^(-1/2)".into()));
            }
            let rho = (1.0 / kappa - r * r).sqrt();
            let bodies = TRIANGLE.iter().map(|&a| ee(r, a, rho, a)).collect();
            build(name, spec(RotationKind::PosEllipticElliptic, vec![m; 3], bodies, alpha, p.beta.unwrap_or(alpha)))
        }
        "tetrahedron_double" | "pentatope_double" => {
            let pts: Vec<[f64; 4]> = if name == "tetrahedron_double" {
                let (s2, s6) = (2f64.sqrt(), 6f64.sqrt());
                vec![
                    [0.0, 0.0, 0.0, 1.0],
                    [0.0, 0.0, 2.0 * s2 / 3.0, -1.0 / 3.0],
                    [0.0, -s6 / 3.0, -s2 / 3.0, -1.0 / 3.0],
                    [0.0, s6 / 3.0, -s2 / 3.0, -1.0 / 3.0],
                ]
            } else {
                let (s3, s5, s6, s2) = (3f64.sqrt(), 5f64.sqrt(), 6f64.sqrt(), 2f64.sqrt());
                let u = -s5 / (4.0 * s3);
                vec![
                    [1.0, 0.0, 0.0, 0.0],
                    [-0.25, 15f64.sqrt() / 4.0, 0.0, 0.0],
                    [-0.25, u, s5 / s6, 0.0],
                    [-0.25, u, -s5 / (2.0 * s6), s5 / (2.0 * s2)],
                    [-0.25, u, -s5 / (2.0 * s6), -s5 / (2.0 * s2)],
                ]
            };
            let bodies: Vec<_> = pts.iter().map(|q| decompose(q.map(|c| c * rad))).collect();
            let n = bodies.len();
            build(name, spec(RotationKind::PosEllipticElliptic, vec![m; n], bodies, alpha, p.beta.unwrap_or(alpha)))
        }
        "six_double" | "six_double_scalene" => {
            let scalene = name == "six_double_scalene";
            let pa = p.phases_a.unwrap_or(if scalene { SCALENE_A } else { TRIANGLE });
            let pb = p.phases_b.unwrap_or(if scalene { SCALENE_B } else { TRIANGLE });
            let (ma, mb) = if scalene { (solved_masses(pa, k, m)?, solved_masses(pb, k, m)?) } else { ([m; 3], [m; 3]) };
            let mut bodies: Vec<_> = pa.iter().map(|&a| ee(rad, a, 0.0, 0.0)).collect();
            bodies.extend(pb.iter().map(|&b| ee(0.0, 0.0, rad, b)));
            let masses = ma.iter().chain(&mb).copied().collect();
            let beta = p.beta.unwrap_or(2f64.sqrt());
            build(name, spec(RotationKind::PosEllipticElliptic, masses, bodies, alpha, beta))
        }
        "lagrangian_h3" => {
            let r = p.r.unwrap_or(rad);
            let (al, _) = lagrangian_frequency(m, r, k)?;
            let z = (r * r - 1.0 / kappa).sqrt();
            let bodies = TRIANGLE.iter().map(|&a| ell(r, a, 0.0, z)).collect();
            build(name, spec(RotationKind::NegElliptic, vec![m; 3], bodies, al, 0.0))
        }
        "hyperbolic_h3" => {
            let eta = p.eta.unwrap_or(2f64.sqrt() * rad);
            let x = (eta * eta + 1.0 / kappa).sqrt();
            if !(x > 0.0) {
                return Err(Error::Domain("need eta > |kappa|^(-1/2)".into()));
            }
            let bodies = vec![
                BodyConstants::Hyperbolic { w: 0.0, x: 0.0, eta: rad, b: 0.0 },
                BodyConstants::Hyperbolic { w: 0.0, x, eta, b: 0.0 },
                BodyConstants::Hyperbolic { w: 0.0, x: -x, eta, b: 0.0 },
            ];
            let guess = hyperbolic_frequency(eta, k, m)?.0;
            let template = spec(RotationKind::NegHyperbolic, vec![m; 3], bodies, 0.0, guess);
            let b2 = solve_squared_frequency(
                |s| {
                    let mut t = template.clone();
                    t.beta = s.max(f64::MIN_POSITIVE).sqrt();
                    Ok(criterion_residual(&t)?.residuals.concat())
                },
                guess * guess,
            )?;
            let mut s = template;
            s.beta = b2.sqrt();
            build(name, s)
        }
        "elliptic_hyperbolic_h3" => {
            let r = p.r.unwrap_or(rad);
            let eta = (r * r - 1.0 / kappa).sqrt();
            let circle = elliptic_hyperbolic_frequencies(m, r, eta, k)?;
            let (al, be) = match (p.alpha, p.beta) {
                (Some(a), Some(b)) => (a, b),
                _ => circle.sample(p.angle.unwrap_or(PI / 4.0))?,
            };
            let bodies = vec![
                BodyConstants::EllipticHyperbolic { r: 0.0, a: 0.0, eta: rad, b: 0.0 },
                BodyConstants::EllipticHyperbolic { r, a: 0.0, eta, b: 0.0 },
                BodyConstants::EllipticHyperbolic { r, a: PI, eta, b: 0.0 },
            ];
            build(name, spec(RotationKind::NegEllipticHyperbolic, vec![m; 3], bodies, al, be))
        }
        _ => unreachable!("name validated above"),
    }
}

/// Shifts the first phase that affects the configuration by `delta`.
pub fn perturb_phase(spec: &RESpec<f64>, delta: f64) -> RESpec<f64> {
    let mut s = spec.clone();
    for b in s.bodies.iter_mut() {
        match b {
            BodyConstants::Elliptic { r, a, .. }
            | BodyConstants::EllipticElliptic { r, a, .. }
            | BodyConstants::EllipticHyperbolic { r, a, .. }
                if *r > 0.0 =>
            {
                *a += delta;
                return s;
            }
            _ => {}
        }
    }
    for b in s.bodies.iter_mut() {
        match b {
            BodyConstants::EllipticElliptic { rho: e, b, .. }
            | BodyConstants::Hyperbolic { eta: e, b, .. }
            | BodyConstants::EllipticHyperbolic { eta: e, b, .. }
                if *e > 0.0 =>
            {
                *b += delta;
                return s;
            }
            _ => {}
        }
    }
    s
}
