//! Masses that turn a triangle inscribed in a great circle into a fixed point.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::Curvature;

/// Outcome of the mass solve.
#[derive(Debug, Clone, PartialEq)]
pub enum MassSolution {
    /// Positive masses normalized to `m₁ = 1`.
    Masses([f64; 3]),
    Infeasible { smallest_singular_value: f64, reason: String },
}

/// The fixed-point equations on the great circle are linear and homogeneous
/// in the masses; a positive null vector of the stacked `6 × 3` system gives
/// the masses.
pub fn masses_for_great_circle_shape(angles: [f64; 3], k: Curvature<f64>) -> Result<MassSolution> {
    if !k.is_positive() {
        return Err(Error::Domain("great-circle fixed points need kappa > 0".into()));
    }
    let [a1, a2, a3] = angles;
    if !(0.0 <= a1 && a1 < a2 && a2 < a3 && a3 < 2.0 * std::f64::consts::PI) {
        return Err(Error::Domain("need 0 <= a1 < a2 < a3 < 2 pi".into()));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            if (angles[i] - angles[j]).cos() + 1.0 < crate::dynamics::EPS_SING {
                return Err(Error::SingularConfiguration { i, j });
            }
        }
    }
    let kk = k.kappa();
    let pre = kk.powf(1.5);
    let r = k.radius();
    let q: Vec<[f64; 2]> = angles.iter().map(|a| [r * a.cos(), r * a.sin()]).collect();
    let mut m = DMatrix::zeros(6, 3);
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let x = kk * (q[i][0] * q[j][0] + q[i][1] * q[j][1]);
            let f = pre / (1.0 - x * x).powf(1.5);
            for c in 0..2 {
                m[(2 * i + c, j)] = f * (q[j][c] - x * q[i][c]);
            }
        }
    }
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let (idx, &smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("three singular values");
    let smax = svd.singular_values.max();
    if smin >= 1e-10 * smax.max(1.0) {
        return Ok(MassSolution::Infeasible {
            smallest_singular_value: smin,
            reason: "the fixed-point system has only the trivial solution".into(),
        });
    }
    let v = vt.row(idx);
    let sign = if v[0] < 0.0 { -1.0 } else { 1.0 };
    let v = [v[0] * sign, v[1] * sign, v[2] * sign];
    if v.iter().any(|&x| x <= 0.0) {
        return Ok(MassSolution::Infeasible {
            smallest_singular_value: smin,
            reason: format!("null vector {v:?} is not strictly positive"),
        });
    }
    Ok(MassSolution::Masses([1.0, v[1] / v[0], v[2] / v[0]]))
}
