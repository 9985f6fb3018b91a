//! Closed-form rotation frequencies and a one-dimensional Newton solver for
//! frequencies without a closed form.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Curvature;

/// Newton step tolerance on the squared frequency.
pub const NEWTON_TOL: f64 = 1e-13;
pub const NEWTON_MAX_ITER: usize = 50;

/// Frequencies `±α` of three equal masses at the vertices of an equilateral
/// triangle rotating on a circle of radius `r` (either curvature sign):
/// `α² = 8m / (√3 r³ (4 − 3κr²)^{3/2})`.
pub fn lagrangian_frequency(m: f64, r: f64, k: Curvature<f64>) -> Result<(f64, f64)> {
    let kk = k.kappa();
    if !(m > 0.0 && r > 0.0) {
        return Err(Error::Domain("need m > 0 and r > 0".into()));
    }
    if k.is_positive() && r >= k.radius() {
        return Err(Error::Domain(format!("need r < kappa^(-1/2) = {}", k.radius())));
    }
    let c = 4.0 - 3.0 * kk * r * r;
    if !(c > 0.0) {
        return Err(Error::Domain("need 4 - 3 kappa r^2 > 0".into()));
    }
    let a2 = 8.0 * m / (3f64.sqrt() * r.powi(3) * c.powf(1.5));
    let a = a2.sqrt();
    Ok((a, -a))
}

/// Frequencies `±β` of the three-body hyperbolic rotation: one body on the
/// geodesic hyperbola `w = x = 0`, two bodies at `x = ±(η² + κ⁻¹)^{1/2}`.
///
/// `β² = m (1 − 4κη²) / (4η³ (|κ|η² − 1)^{3/2})`. The mass factor is
/// confirmed by [`solve_squared_frequency`] on the residual system.
pub fn hyperbolic_frequency(eta: f64, k: Curvature<f64>, m: f64) -> Result<(f64, f64)> {
    let b2 = m * hyperbolic_frequency_unit_mass(eta, k)?;
    let b = b2.sqrt();
    Ok((b, -b))
}

/// The unit-mass form `(1 − 4κη²) / (4η³ (|κ|η² − 1)^{3/2})`.
pub fn hyperbolic_frequency_unit_mass(eta: f64, k: Curvature<f64>) -> Result<f64> {
    let kk = k.kappa();
    if k.is_positive() {
        return Err(Error::Domain("hyperbolic rotations need kappa < 0".into()));
    }
    let rad = kk.abs() * eta * eta - 1.0;
    if !(eta > 0.0 && rad > 0.0) {
        return Err(Error::Domain("need |kappa| eta^2 > 1".into()));
    }
    let b2 = (1.0 - 4.0 * kk * eta * eta) / (4.0 * eta.powi(3) * rad.powf(1.5));
    if !(b2 > 0.0) {
        return Err(Error::Domain("nonpositive squared frequency".into()));
    }
    Ok(b2)
}

/// The circle `α² + β² = S` of admissible frequency pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyCircle {
    pub s: f64,
}

impl FrequencyCircle {
    /// `(√S cos θ, √S sin θ)`; both frequencies must be nonzero.
    pub fn sample(&self, theta: f64) -> Result<(f64, f64)> {
        let r = self.s.sqrt();
        let (a, b) = (r * theta.cos(), r * theta.sin());
        if a.abs() <= 1e-12 * r || b.abs() <= 1e-12 * r {
            return Err(Error::Domain("both frequencies must be nonzero".into()));
        }
        Ok((a, b))
    }

    /// `count` pairs at angles avoiding the axes.
    pub fn samples(&self, count: usize) -> Vec<(f64, f64)> {
        (0..count)
            .map(|i| {
                let th = (i as f64 + 0.5) * 2.0 * PI / count as f64 + 0.1;
                self.sample(th).expect("angles avoid the axes")
            })
            .collect()
    }
}

/// Frequency pairs of the three-body elliptic-hyperbolic rotation: one body
/// on the geodesic `r = 0`, two at opposite phases on the cylinder of radius
/// `r`, `η² = r² − κ⁻¹`:
/// `α² + β² = m (4|κ|η² + 1) / (4η³ (−κη² − 1)^{3/2})`.
pub fn elliptic_hyperbolic_frequencies(m: f64, r: f64, eta: f64, k: Curvature<f64>) -> Result<FrequencyCircle> {
    let kk = k.kappa();
    if k.is_positive() {
        return Err(Error::Domain("elliptic-hyperbolic rotations need kappa < 0".into()));
    }
    if !(m > 0.0 && eta > 0.0) {
        return Err(Error::Domain("need m > 0 and eta > 0".into()));
    }
    let lhs = kk * (r * r - eta * eta);
    if (lhs - 1.0).abs() > crate::geometry::EPS_MAN * (1.0f64).max(kk.abs() * (r * r + eta * eta)) {
        return Err(Error::Domain("need r^2 - eta^2 = 1/kappa".into()));
    }
    let rad = -kk * eta * eta - 1.0;
    if !(rad > 0.0) {
        return Err(Error::Domain("need -kappa eta^2 > 1".into()));
    }
    let s = m * (4.0 * kk.abs() * eta * eta + 1.0) / (4.0 * eta.powi(3) * rad.powf(1.5));
    Ok(FrequencyCircle { s })
}

/// Gauss–Newton iteration on a residual vector that depends on a squared
/// frequency `s`; the derivative is taken by central differences.
pub fn solve_squared_frequency(residual: impl Fn(f64) -> Result<Vec<f64>>, s0: f64) -> Result<f64> {
    let mut s = s0;
    for _ in 0..NEWTON_MAX_ITER {
        let r = residual(s)?;
        let h = 1e-6 * s.abs().max(1.0);
        let rp = residual(s + h)?;
        let rm = residual(s - h)?;
        let (mut jr, mut jj) = (0.0, 0.0);
        for i in 0..r.len() {
            let d = (rp[i] - rm[i]) / (2.0 * h);
            jr += d * r[i];
            jj += d * d;
        }
        if jj == 0.0 {
            return Err(Error::Domain("residual does not depend on the frequency".into()));
        }
        let ds = -jr / jj;
        s += ds;
        if ds.abs() <= NEWTON_TOL * s.abs().max(1.0) {
            return Ok(s);
        }
    }
    Err(Error::Domain(format!("Newton did not converge in {NEWTON_MAX_ITER} iterations")))
}
