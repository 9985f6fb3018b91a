//! Force function, gradient, equations of motion, first integrals and
//! singularity detection for the curved n-body problem.
//!
//! The force function is `U = Σ_{i<j} m_i m_j ctn_κ(d(q_i, q_j))`; the
//! potential energy is `−U`. Equations of motion in second-order form:
//!
//! ```text
//! q̈_i = ∇_{q_i}U / m_i − κ (q̇_i⊙q̇_i) q_i
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{ctn, extended_distance, inner, lit, Curvature, ManifoldPoint, Plane, Real, TangentVector, Vec4};

/// Threshold on `|1 − (κ q_i⊙q_j)²|` below which a pair is singular.
pub const EPS_SING: f64 = 1e-9;

/// Positions, velocities and masses of `n` bodies at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState<T> {
    pub curvature: Curvature<T>,
    pub masses: Vec<T>,
    pub q: Vec<Vec4<T>>,
    pub v: Vec<Vec4<T>>,
    pub t: T,
}

impl<T: Real> PhaseState<T> {
    /// Builds a state and checks every invariant.
    pub fn new(curvature: Curvature<T>, masses: Vec<T>, q: Vec<Vec4<T>>, v: Vec<Vec4<T>>, t: T) -> Result<Self> {
        let s = Self { curvature, masses, q, v, t };
        s.validate()?;
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.masses.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.masses.len();
        if n == 0 || self.q.len() != n || self.v.len() != n {
            return Err(Error::Constraint(format!(
                "need matching nonempty lists: {} masses, {} positions, {} velocities",
                n,
                self.q.len(),
                self.v.len()
            )));
        }
        for i in 0..n {
            if !(self.masses[i] > T::zero()) || !self.masses[i].is_finite() {
                return Err(Error::Constraint(format!("mass {i} must be positive")));
            }
            let p = ManifoldPoint::new(self.q[i], self.curvature)
                .map_err(|e| Error::Constraint(format!("body {i}: {e}")))?;
            TangentVector::new(p, self.v[i]).map_err(|e| Error::Constraint(format!("body {i}: {e}")))?;
        }
        Ok(())
    }

    pub fn momenta(&self) -> Vec<Vec4<T>> {
        self.v.iter().zip(&self.masses).map(|(&v, &m)| v * m).collect()
    }
}

/// Outcome of a singularity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    None,
    Collision(usize, usize),
    Antipodal(usize, usize),
}

impl fmt::Display for SingularityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularityKind::None => write!(f, "None"),
            SingularityKind::Collision(i, j) => write!(f, "Collision({i},{j})"),
            SingularityKind::Antipodal(i, j) => write!(f, "Antipodal({i},{j})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityVerdict<T> {
    pub kind: SingularityKind,
    /// `min_{i<j} |1 − (κ q_i⊙q_j)²|` over normalized positions.
    pub margin: T,
}

/// Normalized pair cosine `κ q_i⊙q_j / sqrt(κ q_i⊙q_i · κ q_j⊙q_j)`.
#[inline]
fn pair_cosine<T: Real>(a: Vec4<T>, b: Vec4<T>, k: Curvature<T>) -> T {
    let kk = k.kappa();
    kk * inner(a, b, k) / (kk * inner(a, a, k) * kk * inner(b, b, k)).sqrt()
}

/// Reports the worst pair; a pair is singular when its margin is below `eps`.
pub fn detect_singularity_with<T: Real>(q: &[Vec4<T>], k: Curvature<T>, eps: T) -> SingularityVerdict<T> {
    let mut margin = T::infinity();
    let mut worst = (0, 0, T::zero());
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            let x = pair_cosine(q[i], q[j], k);
            let m = (T::one() - x * x).abs();
            if m < margin {
                margin = m;
                worst = (i, j, x);
            }
        }
    }
    let (i, j, x) = worst;
    let kind = if margin < eps {
        if x > T::zero() {
            SingularityKind::Collision(i, j)
        } else if k.is_positive() {
            SingularityKind::Antipodal(i, j)
        } else {
            SingularityKind::None
        }
    } else {
        SingularityKind::None
    };
    SingularityVerdict { kind, margin }
}

/// Collision and antipodal detection at tolerance [`EPS_SING`].
pub fn detect_singularity<T: Real>(q: &[Vec4<T>], k: Curvature<T>) -> SingularityVerdict<T> {
    detect_singularity_with(q, k, lit(EPS_SING))
}

fn check_nonsingular<T: Real>(q: &[Vec4<T>], k: Curvature<T>) -> Result<()> {
    match detect_singularity(q, k).kind {
        SingularityKind::None => Ok(()),
        s => Err(Error::Singularity(s)),
    }
}

/// Force function from the homogeneous Cartesian expression.
pub fn force_function<T: Real>(k: Curvature<T>, masses: &[T], q: &[Vec4<T>]) -> T {
    let kk = k.kappa();
    let sig = k.sigma();
    let s = kk.abs().sqrt();
    let mut u = T::zero();
    for i in 0..q.len() {
        let a = kk * inner(q[i], q[i], k);
        for j in i + 1..q.len() {
            let b = kk * inner(q[j], q[j], k);
            let x = kk * inner(q[i], q[j], k);
            u = u + masses[i] * masses[j] * s * x / (sig * (a * b - x * x)).sqrt();
        }
    }
    u
}

/// The force function `U_κ(q)`.
pub fn potential<T: Real>(state: &PhaseState<T>) -> Result<T> {
    check_nonsingular(&state.q, state.curvature)?;
    Ok(force_function(state.curvature, &state.masses, &state.q))
}

/// `Σ m_i m_j ctn_κ(d(q_i, q_j))` using the extended distance.
pub fn potential_cotangent<T: Real>(state: &PhaseState<T>) -> Result<T> {
    check_nonsingular(&state.q, state.curvature)?;
    let k = state.curvature;
    let mut u = T::zero();
    for i in 0..state.n() {
        for j in i + 1..state.n() {
            let d = extended_distance(state.q[i], state.q[j], k)?;
            u = u + state.masses[i] * state.masses[j] * ctn(k, d)?;
        }
    }
    Ok(u)
}

/// Homogeneous gradient, valid off the manifold:
/// `Σ_j m_i m_j |κ|^{3/2} B (A q_j − X q_i) / [σ(AB − X²)]^{3/2}`.
pub fn gradient_raw<T: Real>(k: Curvature<T>, masses: &[T], q: &[Vec4<T>], i: usize) -> Vec4<T> {
    let kk = k.kappa();
    let sig = k.sigma();
    let c = kk.abs().powf(lit(1.5));
    let a = kk * inner(q[i], q[i], k);
    let mut g = Vec4::zero();
    for j in 0..q.len() {
        if j == i {
            continue;
        }
        let b = kk * inner(q[j], q[j], k);
        let x = kk * inner(q[i], q[j], k);
        let d = sig * (a * b - x * x);
        let f = masses[j] * c * b / (d * d.sqrt());
        g += (q[j] * a - q[i] * x) * f;
    }
    g * masses[i]
}

/// `∇_{q_i} U_κ` in the homogeneous form.
pub fn gradient<T: Real>(state: &PhaseState<T>, i: usize) -> Result<Vec4<T>> {
    check_nonsingular(&state.q, state.curvature)?;
    Ok(gradient_raw(state.curvature, &state.masses, &state.q, i))
}

/// Gradient simplified with `κ q_i⊙q_i = 1`; agrees with [`gradient`] on
/// the manifold only.
pub fn gradient_on_manifold<T: Real>(state: &PhaseState<T>, i: usize) -> Result<Vec4<T>> {
    check_nonsingular(&state.q, state.curvature)?;
    let k = state.curvature;
    let kk = k.kappa();
    let sig = k.sigma();
    let c = kk.abs().powf(lit(1.5));
    let q = &state.q;
    let mut g = Vec4::zero();
    for j in 0..q.len() {
        if j == i {
            continue;
        }
        let x = kk * inner(q[i], q[j], k);
        let d = sig - sig * x * x;
        g += (q[j] - q[i] * x) * (state.masses[j] * c / (d * d.sqrt()));
    }
    Ok(g * state.masses[i])
}

/// Accelerations of all bodies, without singularity checks.
pub fn accelerations_raw<T: Real>(k: Curvature<T>, masses: &[T], q: &[Vec4<T>], v: &[Vec4<T>], out: &mut [Vec4<T>]) {
    for i in 0..q.len() {
        let g = gradient_raw(k, masses, q, i) * masses[i].recip();
        out[i] = g - q[i] * (k.kappa() * inner(v[i], v[i], k));
    }
}

/// `q̈_i` from the second-order equations of motion.
pub fn acceleration<T: Real>(state: &PhaseState<T>, i: usize) -> Result<Vec4<T>> {
    check_nonsingular(&state.q, state.curvature)?;
    let k = state.curvature;
    let g = gradient_raw(k, &state.masses, &state.q, i) * state.masses[i].recip();
    Ok(g - state.q[i] * (k.kappa() * inner(state.v[i], state.v[i], k)))
}

/// Pointwise residual `q̈_i − (∇_i U/m_i − κ(v_i⊙v_i) q_i)` of a candidate
/// solution with known second derivatives.
pub fn eom_residual<T: Real>(state: &PhaseState<T>, qdd: &[Vec4<T>]) -> Result<Vec<Vec4<T>>> {
    (0..state.n()).map(|i| Ok(qdd[i] - acceleration(state, i)?)).collect()
}

/// Energy and the six angular-momentum constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstIntegrals<T> {
    pub h: T,
    pub c_wx: T,
    pub c_wy: T,
    pub c_wz: T,
    pub c_xy: T,
    pub c_xz: T,
    pub c_yz: T,
}

impl<T: Real> FirstIntegrals<T> {
    /// Angular momenta in the order of [`Plane::ALL`].
    pub fn angular(&self) -> [T; 6] {
        [self.c_wx, self.c_wy, self.c_wz, self.c_xy, self.c_xz, self.c_yz]
    }

    pub fn component(&self, p: Plane) -> T {
        self.angular()[Plane::ALL.iter().position(|&x| x == p).unwrap()]
    }
}

/// `c_ab = Σ m_i (a_i ḃ_i − ȧ_i b_i)` for every coordinate plane.
pub fn angular_momentum<T: Real>(state: &PhaseState<T>) -> [T; 6] {
    let mut c = [T::zero(); 6];
    for (n, p) in Plane::ALL.iter().enumerate() {
        let (a, b) = p.axes();
        for i in 0..state.n() {
            let q = state.q[i];
            let v = state.v[i];
            c[n] = c[n] + state.masses[i] * (q.get(a) * v.get(b) - v.get(a) * q.get(b));
        }
    }
    c
}

/// Kinetic energy `½ Σ m_i (v_i⊙v_i)(κ q_i⊙q_i)`.
pub fn kinetic_energy<T: Real>(state: &PhaseState<T>) -> T {
    let k = state.curvature;
    let half = lit::<T>(0.5);
    (0..state.n()).fold(T::zero(), |acc, i| {
        acc + half * state.masses[i] * inner(state.v[i], state.v[i], k) * k.kappa() * inner(state.q[i], state.q[i], k)
    })
}

pub fn first_integrals<T: Real>(state: &PhaseState<T>) -> Result<FirstIntegrals<T>> {
    let u = potential(state)?;
    let c = angular_momentum(state);
    Ok(FirstIntegrals {
        h: kinetic_energy(state) - u,
        c_wx: c[0],
        c_wy: c[1],
        c_wz: c[2],
        c_xy: c[3],
        c_xz: c[4],
        c_yz: c[5],
    })
}
