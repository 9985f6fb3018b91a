//! Isometric rotations of S³_κ and H³_κ and the closed-form relative
//! equilibrium trajectories they generate.

use crate::dynamics::PhaseState;
use crate::error::{Error, Result};
use crate::geometry::{lit, Curvature, Real, Vec4, EPS_MAN};

pub type Mat4<T> = [[T; 4]; 4];

/// The canonical rotation classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RotationKind {
    PosElliptic,
    PosEllipticElliptic,
    NegElliptic,
    NegHyperbolic,
    NegEllipticHyperbolic,
    NegParabolic,
}

impl RotationKind {
    pub const ALL: [RotationKind; 6] = [
        RotationKind::PosElliptic,
        RotationKind::PosEllipticElliptic,
        RotationKind::NegElliptic,
        RotationKind::NegHyperbolic,
        RotationKind::NegEllipticHyperbolic,
        RotationKind::NegParabolic,
    ];

    /// Whether the class acts on the sphere (κ > 0).
    pub fn positive(self) -> bool {
        matches!(self, RotationKind::PosElliptic | RotationKind::PosEllipticElliptic)
    }

    pub fn name(self) -> &'static str {
        match self {
            RotationKind::PosElliptic => "PosElliptic",
            RotationKind::PosEllipticElliptic => "PosEllipticElliptic",
            RotationKind::NegElliptic => "NegElliptic",
            RotationKind::NegHyperbolic => "NegHyperbolic",
            RotationKind::NegEllipticHyperbolic => "NegEllipticHyperbolic",
            RotationKind::NegParabolic => "NegParabolic",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// `theta` is the circular angle in the wx-plane; `s_or_phi` is the second
/// circular angle (yz-plane), the hyperbolic parameter, or the parabolic ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationParams<T> {
    pub theta: T,
    pub s_or_phi: T,
}

fn circular<T: Real>(m: &mut Mat4<T>, a: usize, t: T) {
    let (s, c) = t.sin_cos();
    m[a][a] = c;
    m[a][a + 1] = -s;
    m[a + 1][a] = s;
    m[a + 1][a + 1] = c;
}

pub fn identity<T: Real>() -> Mat4<T> {
    let mut m = [[T::zero(); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

/// Canonical rotation matrix of the given class.
///
/// Elliptic classes rotate the wx-plane by `theta` (and the yz-plane by
/// `s_or_phi` for the double class); hyperbolic classes boost the yz-plane by
/// `s_or_phi`; the parabolic class is the null rotation with parameter ξ.
pub fn rotation_matrix<T: Real>(kind: RotationKind, p: RotationParams<T>) -> Mat4<T> {
    let mut m = identity();
    match kind {
        RotationKind::PosElliptic | RotationKind::NegElliptic => circular(&mut m, 0, p.theta),
        RotationKind::PosEllipticElliptic => {
            circular(&mut m, 0, p.theta);
            circular(&mut m, 2, p.s_or_phi);
        }
        RotationKind::NegHyperbolic | RotationKind::NegEllipticHyperbolic => {
            if kind == RotationKind::NegEllipticHyperbolic {
                circular(&mut m, 0, p.theta);
            }
            let (sh, ch) = (p.s_or_phi.sinh(), p.s_or_phi.cosh());
            m[2][2] = ch;
            m[2][3] = sh;
            m[3][2] = sh;
            m[3][3] = ch;
        }
        RotationKind::NegParabolic => {
            let xi = p.s_or_phi;
            let h = xi * xi * lit(0.5);
            let one = T::one();
            m[1] = [T::zero(), one, -xi, xi];
            m[2] = [T::zero(), xi, one - h, h];
            m[3] = [T::zero(), xi, -h, one + h];
        }
    }
    m
}

pub fn mat_vec<T: Real>(m: &Mat4<T>, v: Vec4<T>) -> Vec4<T> {
    let a = v.to_array();
    let r = |i: usize| m[i][0] * a[0] + m[i][1] * a[1] + m[i][2] * a[2] + m[i][3] * a[3];
    Vec4::new(r(0), r(1), r(2), r(3))
}

pub fn mat_mul<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut c = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).fold(T::zero(), |s, k| s + a[i][k] * b[k][j]);
        }
    }
    c
}

/// Per-body constants of a relative equilibrium, one variant per class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BodyConstants<T> {
    /// `(r cos(αt+a), r sin(αt+a), y, z)`.
    Elliptic { r: T, a: T, y: T, z: T },
    /// `(r cos(αt+a), r sin(αt+a), ρ cos(βt+b), ρ sin(βt+b))`.
    EllipticElliptic { r: T, a: T, rho: T, b: T },
    /// `(w, x, η sinh(βt+b), η cosh(βt+b))`.
    Hyperbolic { w: T, x: T, eta: T, b: T },
    /// `(r cos(αt+a), r sin(αt+a), η sinh(βt+b), η cosh(βt+b))`.
    EllipticHyperbolic { r: T, a: T, eta: T, b: T },
    /// `(α, β + (δ−γ)t, γ + βt + (δ−γ)t²/2, δ + βt + (δ−γ)t²/2)`.
    Parabolic { alpha: T, beta: T, gamma: T, delta: T },
}

impl<T: Real> BodyConstants<T> {
    fn fits(&self, kind: RotationKind) -> bool {
        use BodyConstants as B;
        use RotationKind as K;
        matches!(
            (self, kind),
            (B::Elliptic { .. }, K::PosElliptic | K::NegElliptic)
                | (B::EllipticElliptic { .. }, K::PosEllipticElliptic)
                | (B::Hyperbolic { .. }, K::NegHyperbolic)
                | (B::EllipticHyperbolic { .. }, K::NegEllipticHyperbolic)
                | (B::Parabolic { .. }, K::NegParabolic)
        )
    }

    /// Radius `r` of the wx-circle where defined.
    pub fn r(&self) -> Option<T> {
        match *self {
            BodyConstants::Elliptic { r, .. }
            | BodyConstants::EllipticElliptic { r, .. }
            | BodyConstants::EllipticHyperbolic { r, .. } => Some(r),
            _ => None,
        }
    }
}

/// A relative-equilibrium candidate: class, curvature, masses, per-body
/// constants and frequencies α, β.
#[derive(Debug, Clone, PartialEq)]
pub struct RESpec<T> {
    pub kind: RotationKind,
    pub curvature: Curvature<T>,
    pub masses: Vec<T>,
    pub bodies: Vec<BodyConstants<T>>,
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> RESpec<T> {
    pub fn n(&self) -> usize {
        self.masses.len()
    }

    pub fn uses_alpha(&self) -> bool {
        !matches!(self.kind, RotationKind::NegHyperbolic | RotationKind::NegParabolic)
    }

    pub fn uses_beta(&self) -> bool {
        matches!(
            self.kind,
            RotationKind::PosEllipticElliptic | RotationKind::NegHyperbolic | RotationKind::NegEllipticHyperbolic
        )
    }

    /// Checks class, curvature sign, masses, frequencies and radius constraints.
    pub fn validate(&self) -> Result<()> {
        let k = self.curvature;
        if self.kind.positive() != k.is_positive() {
            return Err(Error::ClassMismatch(format!(
                "{} used with kappa = {}",
                self.kind.name(),
                k.kappa()
            )));
        }
        if self.masses.is_empty() || self.masses.len() != self.bodies.len() {
            return Err(Error::Constraint("need one set of constants per mass".into()));
        }
        if self.masses.iter().any(|&m| !(m > T::zero())) {
            return Err(Error::Constraint("masses must be positive".into()));
        }
        if (self.uses_alpha() && self.alpha == T::zero()) || (self.uses_beta() && self.beta == T::zero()) {
            return Err(Error::Constraint("frequencies of the class must be nonzero".into()));
        }
        for (i, b) in self.bodies.iter().enumerate() {
            if !b.fits(self.kind) {
                return Err(Error::ClassMismatch(format!(
                    "body {i} constants do not match {}",
                    self.kind.name()
                )));
            }
            let (lhs, terms) = match *b {
                BodyConstants::Elliptic { r, y, z, .. } => {
                    (r * r + y * y + k.sigma() * z * z, r * r + y * y + z * z)
                }
                BodyConstants::EllipticElliptic { r, rho, .. } => (r * r + rho * rho, r * r + rho * rho),
                BodyConstants::Hyperbolic { w, x, eta, .. } => (w * w + x * x - eta * eta, w * w + x * x + eta * eta),
                BodyConstants::EllipticHyperbolic { r, eta, .. } => (r * r - eta * eta, r * r + eta * eta),
                BodyConstants::Parabolic { alpha, beta, gamma, delta } => (
                    alpha * alpha + beta * beta + gamma * gamma - delta * delta,
                    alpha * alpha + beta * beta + gamma * gamma + delta * delta,
                ),
            };
            let scale = T::one().max(k.kappa().abs() * terms);
            if (k.kappa() * lhs - T::one()).abs() > lit::<T>(EPS_MAN) * scale {
                return Err(Error::Constraint(format!(
                    "body {i} violates the radius constraint: kappa*lhs = {}",
                    k.kappa() * lhs
                )));
            }
            let upper = match *b {
                BodyConstants::Elliptic { z, .. } => k.is_positive() || z > T::zero(),
                BodyConstants::Hyperbolic { eta, .. } | BodyConstants::EllipticHyperbolic { eta, .. } => eta > T::zero(),
                BodyConstants::Parabolic { delta, .. } => delta > T::zero(),
                BodyConstants::EllipticElliptic { r, rho, .. } => r >= T::zero() && rho >= T::zero(),
            };
            if !upper {
                return Err(Error::Constraint(format!("body {i} is off the upper sheet or has a negative radius")));
            }
        }
        Ok(())
    }

    /// Rotation parameters carrying the t = 0 configuration to time `t`.
    pub fn rotation_params(&self, t: T) -> RotationParams<T> {
        match self.kind {
            RotationKind::PosElliptic | RotationKind::NegElliptic => RotationParams { theta: self.alpha * t, s_or_phi: T::zero() },
            RotationKind::PosEllipticElliptic | RotationKind::NegEllipticHyperbolic => {
                RotationParams { theta: self.alpha * t, s_or_phi: self.beta * t }
            }
            RotationKind::NegHyperbolic => RotationParams { theta: T::zero(), s_or_phi: self.beta * t },
            RotationKind::NegParabolic => RotationParams { theta: T::zero(), s_or_phi: t },
        }
    }
}

/// Position, velocity and acceleration of one body at time `t`.
pub fn body_kinematics<T: Real>(spec: &RESpec<T>, i: usize, t: T) -> [Vec4<T>; 3] {
    let (al, be) = (spec.alpha, spec.beta);
    let o = T::zero();
    let circ = |r: T, rate: T, ph: T| {
        let th = rate * t + ph;
        let (s, c) = th.sin_cos();
        (
            [r * c, r * s],
            [-r * rate * s, r * rate * c],
            [-r * rate * rate * c, -r * rate * rate * s],
        )
    };
    let hyp = |eta: T, rate: T, ph: T| {
        let th = rate * t + ph;
        let (s, c) = (th.sinh(), th.cosh());
        (
            [eta * s, eta * c],
            [eta * rate * c, eta * rate * s],
            [eta * rate * rate * s, eta * rate * rate * c],
        )
    };
    let join = |a: ([T; 2], [T; 2], [T; 2]), b: ([T; 2], [T; 2], [T; 2])| {
        [
            Vec4::new(a.0[0], a.0[1], b.0[0], b.0[1]),
            Vec4::new(a.1[0], a.1[1], b.1[0], b.1[1]),
            Vec4::new(a.2[0], a.2[1], b.2[0], b.2[1]),
        ]
    };
    let fixed = |u: T, v: T| ([u, v], [o, o], [o, o]);
    match spec.bodies[i] {
        BodyConstants::Elliptic { r, a, y, z } => join(circ(r, al, a), fixed(y, z)),
        BodyConstants::EllipticElliptic { r, a, rho, b } => join(circ(r, al, a), circ(rho, be, b)),
        BodyConstants::Hyperbolic { w, x, eta, b } => join(fixed(w, x), hyp(eta, be, b)),
        BodyConstants::EllipticHyperbolic { r, a, eta, b } => join(circ(r, al, a), hyp(eta, be, b)),
        BodyConstants::Parabolic { alpha, beta, gamma, delta } => {
            let d = delta - gamma;
            let half = lit::<T>(0.5);
            [
                Vec4::new(alpha, beta + d * t, gamma + beta * t + d * t * t * half, delta + beta * t + d * t * t * half),
                Vec4::new(o, d, beta + d * t, beta + d * t),
                Vec4::new(o, o, d, d),
            ]
        }
    }
}

/// State of the closed-form trajectory at time `t`, with exact velocities.
pub fn generate_trajectory<T: Real>(spec: &RESpec<T>, t: T) -> Result<PhaseState<T>> {
    spec.validate()?;
    let (q, v): (Vec<_>, Vec<_>) = (0..spec.n())
        .map(|i| {
            let [q, v, _] = body_kinematics(spec, i, t);
            (q, v)
        })
        .unzip();
    Ok(PhaseState { curvature: spec.curvature, masses: spec.masses.clone(), q, v, t })
}

/// Second time derivatives of the closed-form trajectory at time `t`.
pub fn trajectory_acceleration<T: Real>(spec: &RESpec<T>, t: T) -> Vec<Vec4<T>> {
    (0..spec.n()).map(|i| body_kinematics(spec, i, t)[2]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(theta: f64, s: f64) -> RotationParams<f64> {
        RotationParams { theta, s_or_phi: s }
    }

    #[test]
    fn identity_at_zero() {
        for kind in RotationKind::ALL {
            assert_eq!(rotation_matrix(kind, p(0.0, 0.0)), identity());
        }
    }

    #[test]
    fn parabolic_example() {
        let m = rotation_matrix(RotationKind::NegParabolic, p(0.0, 1.0));
        let v = mat_vec(&m, Vec4::new(0.0, 0.0, 0.0, 1.0));
        assert_eq!(v, Vec4::new(0.0, 1.0, 0.5, 1.5));
        let k = Curvature::new(-1.0).unwrap();
        assert_relative_eq!(crate::geometry::inner(v, v, k), -1.0);
    }

    #[test]
    fn mismatched_class_rejected() {
        let spec = RESpec {
            kind: RotationKind::PosElliptic,
            curvature: Curvature::new(-1.0).unwrap(),
            masses: vec![1.0],
            bodies: vec![BodyConstants::Elliptic { r: 0.0, a: 0.0, y: 0.0, z: 1.0 }],
            alpha: 1.0,
            beta: 0.0,
        };
        assert!(matches!(spec.validate(), Err(Error::ClassMismatch(_))));
    }

    #[test]
    fn bad_radius_rejected() {
        let spec = RESpec {
            kind: RotationKind::PosEllipticElliptic,
            curvature: Curvature::new(1.0).unwrap(),
            masses: vec![1.0],
            bodies: vec![BodyConstants::EllipticElliptic { r: 0.5, a: 0.0, rho: 0.5, b: 0.0 }],
            alpha: 1.0,
            beta: 1.0,
        };
        assert!(matches!(spec.validate(), Err(Error::Constraint(_))));
    }
}
