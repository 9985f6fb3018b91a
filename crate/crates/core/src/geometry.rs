//! Ambient geometry of the constant-curvature 3-manifolds.
//!
//! Points live in R⁴ with coordinates `(w, x, y, z)`. For κ > 0 the manifold
//! is the sphere `w²+x²+y²+z² = κ⁻¹`; for κ < 0 it is the upper sheet of the
//! hyperboloid `w²+x²+y²−z² = κ⁻¹`, `z > 0`. The sign of κ selects the
//! Euclidean or Lorentzian inner product.

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{Float, FloatConst};

use crate::error::{Error, Result};

/// Relative tolerance for on-manifold and tangency checks.
pub const EPS_MAN: f64 = 1e-12;

/// Floating-point scalar usable by the generic geometry and dynamics code.
pub trait Real: Float + FloatConst + Debug + Display + Send + Sync + 'static {}

impl<T> Real for T where T: Float + FloatConst + Debug + Display + Send + Sync + 'static {}

#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from(x).expect("literal representable in scalar type")
}

/// Nonzero curvature κ together with its sign σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvature<T> {
    kappa: T,
}

impl<T: Real> Curvature<T> {
    pub fn new(kappa: T) -> Result<Self> {
        if kappa == T::zero() || !kappa.is_finite() {
            return Err(Error::ZeroCurvature);
        }
        Ok(Self { kappa })
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    /// σ as a scalar, `+1` or `−1`.
    pub fn sigma(&self) -> T {
        if self.kappa > T::zero() {
            T::one()
        } else {
            -T::one()
        }
    }

    pub fn is_positive(&self) -> bool {
        self.kappa > T::zero()
    }

    /// `|κ|^{-1/2}`, the radius of the sphere or pseudo-radius of the hyperboloid.
    pub fn radius(&self) -> T {
        self.kappa.abs().sqrt().recip()
    }
}

/// Free vector in the ambient 4-space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec4<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec4<T> {
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    pub fn zero() -> Self {
        let o = T::zero();
        Self::new(o, o, o, o)
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// Euclidean dot product, regardless of curvature.
    pub fn dot(self, o: Self) -> T {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn max_abs(self) -> T {
        self.w.abs().max(self.x.abs()).max(self.y.abs()).max(self.z.abs())
    }

    pub fn map(self, f: impl Fn(T) -> T) -> Self {
        Self::new(f(self.w), f(self.x), f(self.y), f(self.z))
    }

    /// Component `k` in the order `w, x, y, z`.
    pub fn get(self, k: usize) -> T {
        self.to_array()[k]
    }
}

impl<T: Real> Add for Vec4<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Vec4<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vec4<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec4<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Real> AddAssign for Vec4<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Vec4<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

/// σ-signed inner product `a_w b_w + a_x b_x + a_y b_y + σ a_z b_z`.
#[inline]
pub fn inner<T: Real>(a: Vec4<T>, b: Vec4<T>, k: Curvature<T>) -> T {
    a.w * b.w + a.x * b.x + a.y * b.y + k.sigma() * a.z * b.z
}

/// A point of S³_κ or H³_κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldPoint<T> {
    v: Vec4<T>,
    curvature: Curvature<T>,
}

impl<T: Real> ManifoldPoint<T> {
    /// Checks `κ (v⊙v) = 1` to tolerance [`EPS_MAN`] relative to `|κ| |v|²`
    /// and, on H³, `z > 0`.
    pub fn new(v: Vec4<T>, curvature: Curvature<T>) -> Result<Self> {
        let s = curvature.kappa() * inner(v, v, curvature);
        let scale = T::one().max(curvature.kappa().abs() * v.dot(v));
        if (s - T::one()).abs() > lit::<T>(EPS_MAN).max(T::epsilon() * lit(8.0)) * scale {
            return Err(Error::Constraint(format!(
                "point {:?} is off the manifold: kappa*<v,v> = {}",
                v.to_array(),
                s
            )));
        }
        if !curvature.is_positive() && v.z <= T::zero() {
            return Err(Error::Constraint(format!(
                "point {:?} is on the lower sheet of the hyperboloid",
                v.to_array()
            )));
        }
        Ok(Self { v, curvature })
    }

    pub fn v(&self) -> Vec4<T> {
        self.v
    }

    pub fn curvature(&self) -> Curvature<T> {
        self.curvature
    }
}

/// A vector tangent to the manifold at `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector<T> {
    base: ManifoldPoint<T>,
    d: Vec4<T>,
}

impl<T: Real> TangentVector<T> {
    pub fn new(base: ManifoldPoint<T>, d: Vec4<T>) -> Result<Self> {
        let k = base.curvature();
        let scale = T::one().max(base.v().norm() * d.norm());
        let ip = inner(base.v(), d, k);
        if ip.abs() > lit::<T>(EPS_MAN) * scale {
            return Err(Error::Constraint(format!(
                "vector {:?} is not tangent: <p,d> = {}",
                d.to_array(),
                ip
            )));
        }
        Ok(Self { base, d })
    }

    pub fn base(&self) -> ManifoldPoint<T> {
        self.base
    }

    pub fn d(&self) -> Vec4<T> {
        self.d
    }
}

/// Arc length corresponding to the normalized product `c = κ a⊙b`,
/// clamped at the boundary of the valid range.
fn arc<T: Real>(c: T, k: Curvature<T>) -> Result<T> {
    let eps = lit::<T>(EPS_MAN);
    let one = T::one();
    let scale = k.kappa().abs().sqrt();
    if k.is_positive() {
        let c = if c > one && c - one <= eps {
            one
        } else if c < -one && -one - c <= eps {
            -one
        } else {
            c
        };
        if !(-one..=one).contains(&c) {
            return Err(Error::Domain(format!(
                "arc argument {c} outside [-1, 1]"
            )));
        }
        Ok(c.acos() / scale)
    } else {
        let c = if c < one && one - c <= eps { one } else { c };
        if c < one || !c.is_finite() {
            return Err(Error::Domain(format!("area argument {c} below 1")));
        }
        Ok(c.acosh() / scale)
    }
}

/// Geodesic distance between two points of the same manifold.
pub fn distance<T: Real>(a: &ManifoldPoint<T>, b: &ManifoldPoint<T>) -> Result<T> {
    let k = a.curvature();
    if k != b.curvature() {
        return Err(Error::Domain("points lie on different manifolds".into()));
    }
    arc(k.kappa() * inner(a.v(), b.v(), k), k)
}

/// Distance extended to arbitrary nonzero vectors of the right causal type.
///
/// Invariant under positive rescaling of either argument and equal to
/// [`distance`] on the manifold.
pub fn extended_distance<T: Real>(a: Vec4<T>, b: Vec4<T>, k: Curvature<T>) -> Result<T> {
    let na = k.kappa() * inner(a, a, k);
    let nb = k.kappa() * inner(b, b, k);
    if !(na > T::zero() && nb > T::zero()) {
        return Err(Error::Domain(
            "extended distance needs vectors with kappa*<v,v> > 0".into(),
        ));
    }
    arc(k.kappa() * inner(a, b, k) / (na.sqrt() * nb.sqrt()), k)
}

/// κ-sine: `κ^{-1/2} sin(κ^{1/2} x)` or `(−κ)^{-1/2} sinh((−κ)^{1/2} x)`.
pub fn sn<T: Real>(k: Curvature<T>, x: T) -> T {
    let s = k.kappa().abs().sqrt();
    if k.is_positive() {
        (s * x).sin() / s
    } else {
        (s * x).sinh() / s
    }
}

/// κ-cosine: `cos(κ^{1/2} x)` or `cosh((−κ)^{1/2} x)`.
pub fn csn<T: Real>(k: Curvature<T>, x: T) -> T {
    let s = k.kappa().abs().sqrt();
    if k.is_positive() {
        (s * x).cos()
    } else {
        (s * x).cosh()
    }
}

pub fn tn<T: Real>(k: Curvature<T>, x: T) -> Result<T> {
    let c = csn(k, x);
    if c.abs() <= lit(EPS_MAN) {
        return Err(Error::Domain(format!("tn undefined at x = {x}")));
    }
    Ok(sn(k, x) / c)
}

pub fn ctn<T: Real>(k: Curvature<T>, x: T) -> Result<T> {
    let s = sn(k, x);
    if s.abs() <= lit(EPS_MAN) {
        return Err(Error::Domain(format!("ctn undefined at x = {x}")));
    }
    Ok(csn(k, x) / s)
}

/// Stereographic projection from the north pole `(0,0,0,σR)` onto the
/// hyperplane `z = 0`, `R = |κ|^{-1/2}`.
pub fn stereographic<T: Real>(p: &ManifoldPoint<T>) -> Result<[T; 3]> {
    let k = p.curvature();
    let r = k.radius();
    let v = p.v();
    let den = r - k.sigma() * v.z;
    if den.abs() <= lit::<T>(EPS_MAN) * r {
        return Err(Error::Domain("cannot project the north pole".into()));
    }
    let f = r / den;
    Ok([v.w * f, v.x * f, v.y * f])
}

/// Inverse of [`stereographic`]. For κ < 0 the image point must lie in the
/// open ball of radius `|κ|^{-1/2}`.
pub fn inverse_stereographic<T: Real>(p: [T; 3], k: Curvature<T>) -> Result<ManifoldPoint<T>> {
    let r = k.radius();
    let r2 = r * r;
    let s2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    let den = r2 + k.sigma() * s2;
    if !k.is_positive() && den <= T::zero() {
        return Err(Error::Domain(
            "point lies outside the projection ball".into(),
        ));
    }
    let two = lit::<T>(2.0);
    let f = two * r2 / den;
    let z = r * (s2 - k.sigma() * r2) / den;
    ManifoldPoint::new(Vec4::new(p[0] * f, p[1] * f, p[2] * f, z), k)
}

/// Hopf map of S³_κ onto a 2-sphere of radius κ⁻¹.
pub fn hopf_map<T: Real>(p: &ManifoldPoint<T>) -> Result<[T; 3]> {
    if !p.curvature().is_positive() {
        return Err(Error::Domain("the Hopf map needs kappa > 0".into()));
    }
    let v = p.v();
    let two = lit::<T>(2.0);
    Ok([
        v.w * v.w + v.x * v.x - v.y * v.y - v.z * v.z,
        two * (v.w * v.z + v.x * v.y),
        two * (v.x * v.z - v.w * v.y),
    ])
}

fn radius_check<T: Real>(lhs: T, k: Curvature<T>, terms: T, what: &str) -> Result<()> {
    let scale = T::one().max(k.kappa().abs() * terms);
    if (k.kappa() * lhs - T::one()).abs() > lit::<T>(EPS_MAN) * scale {
        return Err(Error::Domain(format!("{what}: radius constraint fails")));
    }
    Ok(())
}

/// Point `(r cos θ, r sin θ, ρ cos φ, ρ sin φ)` of the Clifford torus
/// `r² + ρ² = κ⁻¹`.
pub fn clifford_point<T: Real>(r: T, rho: T, theta: T, phi: T, k: Curvature<T>) -> Result<ManifoldPoint<T>> {
    if !k.is_positive() {
        return Err(Error::Domain("Clifford tori need kappa > 0".into()));
    }
    radius_check(r * r + rho * rho, k, r * r + rho * rho, "Clifford torus")?;
    ManifoldPoint::new(
        Vec4::new(r * theta.cos(), r * theta.sin(), rho * phi.cos(), rho * phi.sin()),
        k,
    )
}

/// Point `(r cos θ, r sin θ, η sinh ξ, η cosh ξ)` of the hyperbolic cylinder
/// `r² − η² = κ⁻¹`.
pub fn cylinder_point<T: Real>(r: T, eta: T, theta: T, xi: T, k: Curvature<T>) -> Result<ManifoldPoint<T>> {
    if k.is_positive() {
        return Err(Error::Domain("hyperbolic cylinders need kappa < 0".into()));
    }
    if eta <= T::zero() {
        return Err(Error::Domain("hyperbolic cylinder needs eta > 0".into()));
    }
    radius_check(r * r - eta * eta, k, r * r + eta * eta, "hyperbolic cylinder")?;
    ManifoldPoint::new(
        Vec4::new(r * theta.cos(), r * theta.sin(), eta * xi.sinh(), eta * xi.cosh()),
        k,
    )
}

/// Coordinate planes of R⁴, also used to index angular momenta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Plane {
    WX,
    WY,
    WZ,
    XY,
    XZ,
    YZ,
}

impl Plane {
    pub const ALL: [Plane; 6] = [Plane::WX, Plane::WY, Plane::WZ, Plane::XY, Plane::XZ, Plane::YZ];

    /// Coordinate indices `(a, b)` spanning the plane.
    pub fn axes(self) -> (usize, usize) {
        match self {
            Plane::WX => (0, 1),
            Plane::WY => (0, 2),
            Plane::WZ => (0, 3),
            Plane::XY => (1, 2),
            Plane::XZ => (1, 3),
            Plane::YZ => (2, 3),
        }
    }

    /// The orthogonal coordinate plane.
    pub fn complement(self) -> Plane {
        match self {
            Plane::WX => Plane::YZ,
            Plane::WY => Plane::XZ,
            Plane::WZ => Plane::XY,
            Plane::XY => Plane::WZ,
            Plane::XZ => Plane::WY,
            Plane::YZ => Plane::WX,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Plane::WX => "wx",
            Plane::WY => "wy",
            Plane::WZ => "wz",
            Plane::XY => "xy",
            Plane::XZ => "xz",
            Plane::YZ => "yz",
        }
    }
}

/// Point at parameter `s` on the geodesic cut out by a coordinate plane.
///
/// On S³ this is the great circle `R(cos s e_a + sin s e_b)`. On H³ only planes
/// containing the z-axis meet the hyperboloid, in the geodesic hyperbola
/// `R(sinh s e_a + cosh s e_z)`.
pub fn coordinate_geodesic<T: Real>(plane: Plane, s: T, k: Curvature<T>) -> Result<ManifoldPoint<T>> {
    let (a, b) = plane.axes();
    let r = k.radius();
    let mut c = [T::zero(); 4];
    if k.is_positive() {
        c[a] = r * s.cos();
        c[b] = r * s.sin();
    } else {
        if b != 3 {
            return Err(Error::Domain(format!(
                "plane {} does not meet the hyperboloid",
                plane.name()
            )));
        }
        c[a] = r * s.sinh();
        c[b] = r * s.cosh();
    }
    ManifoldPoint::new(Vec4::from_array(c), k)
}

/// Rescales `v` onto the manifold.
pub fn project_to_manifold<T: Real>(v: Vec4<T>, k: Curvature<T>) -> Result<ManifoldPoint<T>> {
    let s = k.kappa() * inner(v, v, k);
    if !(s > T::zero()) {
        return Err(Error::Domain(format!(
            "cannot project {:?}: kappa*<v,v> = {}",
            v.to_array(),
            s
        )));
    }
    if !k.is_positive() && v.z <= T::zero() {
        return Err(Error::Domain(format!(
            "cannot project {:?} onto the upper sheet",
            v.to_array()
        )));
    }
    ManifoldPoint::new(v * s.sqrt().recip(), k)
}

/// Removes the normal component of `d` at `p`.
pub fn project_to_tangent<T: Real>(p: &ManifoldPoint<T>, d: Vec4<T>) -> TangentVector<T> {
    let k = p.curvature();
    let q = p.v();
    let out = d - q * (k.kappa() * inner(q, d, k));
    TangentVector { base: *p, d: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn k(x: f64) -> Curvature<f64> {
        Curvature::new(x).unwrap()
    }

    fn pt(a: [f64; 4], c: f64) -> ManifoldPoint<f64> {
        ManifoldPoint::new(Vec4::from_array(a), k(c)).unwrap()
    }

    #[test]
    fn zero_curvature_rejected() {
        assert_eq!(Curvature::new(0.0).unwrap_err(), Error::ZeroCurvature);
        assert_eq!(Error::ZeroCurvature.to_string(), "curvature must be nonzero");
    }

    #[test]
    fn inner_signs() {
        let e0 = Vec4::new(1.0, 0.0, 0.0, 0.0);
        let e3 = Vec4::new(0.0, 0.0, 0.0, 1.0);
        assert_eq!(inner(e0, e0, k(1.0)), 1.0);
        assert_eq!(inner(e3, e3, k(-1.0)), -1.0);
        assert!(ManifoldPoint::new(e3, k(-1.0)).is_ok());
        assert!(ManifoldPoint::new(-e3, k(-1.0)).is_err());
    }

    #[test]
    fn distance_examples() {
        let a = pt([1.0, 0.0, 0.0, 0.0], 1.0);
        let b = pt([-1.0, 0.0, 0.0, 0.0], 1.0);
        assert_eq!(distance(&a, &a).unwrap(), 0.0);
        assert_relative_eq!(distance(&a, &b).unwrap(), PI);
        for (t, s) in [(0.3, 1.1), (2.0, -0.7), (5.0, 4.0)] {
            let p = coordinate_geodesic(Plane::WX, t, k(1.0)).unwrap();
            let q = coordinate_geodesic(Plane::YZ, s, k(1.0)).unwrap();
            assert_relative_eq!(distance(&p, &q).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        }
        let p = coordinate_geodesic(Plane::WX, 0.3, k(4.0)).unwrap();
        let q = coordinate_geodesic(Plane::YZ, 1.0, k(4.0)).unwrap();
        assert_relative_eq!(distance(&p, &q).unwrap(), FRAC_PI_2 * 0.5, epsilon = 1e-15);
    }

    #[test]
    fn distance_rejects_off_manifold_arguments() {
        let kk = k(1.0);
        let a = ManifoldPoint { v: Vec4::new(2.0, 0.0, 0.0, 0.0), curvature: kk };
        assert!(matches!(distance(&a, &a), Err(Error::Domain(_))));
    }

    #[test]
    fn extended_distance_examples() {
        let kk = k(1.0);
        let a = Vec4::new(2.0, 0.0, 0.0, 0.0);
        let b = Vec4::new(0.0, 2.0, 0.0, 0.0);
        assert_relative_eq!(extended_distance(a, b, kk).unwrap(), FRAC_PI_2);
        let c = Vec4::new(0.3, 0.4, 0.5, 0.1);
        assert_relative_eq!(
            extended_distance(c * 3.0, b, kk).unwrap(),
            extended_distance(c, b, kk).unwrap(),
            epsilon = 1e-15
        );
        assert!(extended_distance(Vec4::zero(), b, kk).is_err());
        let kn = k(-1.0);
        assert!(extended_distance(Vec4::new(1.0, 0.0, 0.0, 0.0), Vec4::new(0.0, 0.0, 0.0, 1.0), kn).is_err());
    }

    #[test]
    fn trig_examples() {
        assert_relative_eq!(sn(k(1.0), FRAC_PI_2), 1.0);
        assert!(csn(k(1.0), FRAC_PI_2).abs() < 1e-16);
        assert_relative_eq!(sn(k(-1.0), 1.0), 1.1752011936438014, epsilon = 1e-15);
        assert_relative_eq!(csn(k(-1.0), 1.0), 1.5430806348152437, epsilon = 1e-15);
        assert!(ctn(k(1.0), 0.0).is_err());
        assert!(tn(k(1.0), FRAC_PI_2).is_err());
        assert!(ctn(k(1.0), FRAC_PI_2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn stereographic_examples() {
        let south = pt([0.0, 0.0, 0.0, -1.0], 1.0);
        assert_eq!(stereographic(&south).unwrap(), [0.0, 0.0, 0.0]);
        let north = pt([0.0, 0.0, 0.0, 1.0], 1.0);
        assert!(stereographic(&north).is_err());
        let vertex = pt([0.0, 0.0, 0.0, 1.0], -1.0);
        assert_eq!(stereographic(&vertex).unwrap(), [0.0, 0.0, 0.0]);
        assert!(inverse_stereographic([1.0, 0.0, 0.0], k(-1.0)).is_err());
    }

    #[test]
    fn hopf_examples() {
        let h = hopf_map(&pt([1.0, 0.0, 0.0, 0.0], 1.0)).unwrap();
        assert_eq!(h, [1.0, 0.0, 0.0]);
        let h = hopf_map(&pt([0.0, 0.0, 1.0, 0.0], 1.0)).unwrap();
        assert_eq!(h, [-1.0, 0.0, 0.0]);
        assert!(hopf_map(&pt([0.0, 0.0, 0.0, 1.0], -1.0)).is_err());
    }

    #[test]
    fn surfaces() {
        let kk = k(2.0);
        let r = kk.radius();
        let p = clifford_point(r, 0.0, 0.0, 1.3, kk).unwrap();
        assert_relative_eq!(p.v().w, r);
        let h = 0.5f64.sqrt();
        let p = clifford_point(h, h, 0.7, 2.1, k(1.0)).unwrap();
        assert_relative_eq!(p.v().norm(), 1.0, epsilon = 1e-15);
        assert!(clifford_point(0.5, 0.5, 0.0, 0.0, k(1.0)).is_err());
        let p = cylinder_point(0.0, 1.0, 0.0, 0.8, k(-1.0)).unwrap();
        assert_relative_eq!(p.v().y, 0.8f64.sinh());
        assert!(cylinder_point(1.0, 1.0, 0.0, 0.0, k(-1.0)).is_err());
        assert!(coordinate_geodesic(Plane::WX, 0.1, k(-1.0)).is_err());
    }

    #[test]
    fn projections() {
        let kk = k(1.0);
        let p = project_to_manifold(Vec4::new(2.0, 0.0, 0.0, 0.0), kk).unwrap();
        assert_eq!(p.v(), Vec4::new(1.0, 0.0, 0.0, 0.0));
        let p2 = project_to_manifold(p.v(), kk).unwrap();
        assert_eq!(p.v(), p2.v());
        assert!(project_to_manifold(Vec4::new(0.0, 0.0, 0.0, -2.0), k(-1.0)).is_err());
        assert!(project_to_manifold(Vec4::new(1.0, 0.0, 0.0, 0.0), k(-1.0)).is_err());
    }
}
