//! Evidence that a parabolic rotation ansatz cannot be a solution.

use crate::dynamics::{angular_momentum, eom_residual, PhaseState};
use crate::geometry::Vec4;
use crate::isometry::{body_kinematics, trajectory_acceleration, BodyConstants, RESpec, RotationKind};

/// Result of [`parabolic_nonexistence_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicEvidence {
    /// `(t, c_yz(t))` along the ansatz.
    pub c_yz_samples: Vec<(f64, f64)>,
    /// Least-squares slope of `c_yz(t)`.
    pub fitted_slope: f64,
    /// `Σ m_i (γ_i − δ_i)²`; `c_yz` decreases at this rate.
    pub drift_coefficient: f64,
    /// All `γ_i = δ_i`, which forces `α_i² + β_i² = κ⁻¹ < 0`.
    pub constraint_contradiction: bool,
    /// Largest residual of the equations of motion at t = 0, when the ansatz
    /// lies on the manifold.
    pub eom_residual_t0: Option<f64>,
    /// True when angular momentum drifts or the constraints contradict.
    pub excluded: bool,
}

/// Evaluates angular-momentum drift, constraint consistency and the
/// equations of motion for a parabolic ansatz.
pub fn parabolic_nonexistence_check(spec: &RESpec<f64>) -> ParabolicEvidence {
    let n = spec.n();
    let mut drift = 0.0;
    let mut all_equal = true;
    let mut scale: f64 = 0.0;
    for (m, b) in spec.masses.iter().zip(&spec.bodies) {
        if let BodyConstants::Parabolic { gamma, delta, .. } = *b {
            drift += m * (gamma - delta).powi(2);
            scale = scale.max(gamma.abs()).max(delta.abs());
            if (gamma - delta).abs() > 1e-12 * scale.max(1.0) {
                all_equal = false;
            }
        }
    }
    let times = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0];
    let c_yz_samples: Vec<(f64, f64)> = times
        .iter()
        .map(|&t| {
            let (q, v): (Vec<Vec4<f64>>, Vec<Vec4<f64>>) = (0..n)
                .map(|i| {
                    let [q, v, _] = body_kinematics(spec, i, t);
                    (q, v)
                })
                .unzip();
            let st = PhaseState { curvature: spec.curvature, masses: spec.masses.clone(), q, v, t };
            (t, angular_momentum(&st)[5])
        })
        .collect();
    let tm = times.iter().sum::<f64>() / times.len() as f64;
    let cm = c_yz_samples.iter().map(|s| s.1).sum::<f64>() / times.len() as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, c) in &c_yz_samples {
        sxy += (t - tm) * (c - cm);
        sxx += (t - tm) * (t - tm);
    }
    let fitted_slope = sxy / sxx;
    let eom_residual_t0 = if spec.kind == RotationKind::NegParabolic && spec.validate().is_ok() {
        crate::isometry::generate_trajectory(spec, 0.0)
            .ok()
            .and_then(|st| eom_residual(&st, &trajectory_acceleration(spec, 0.0)).ok())
            .map(|r| r.iter().fold(0.0f64, |m, v| m.max(v.max_abs())))
    } else {
        None
    };
    ParabolicEvidence {
        c_yz_samples,
        fitted_slope,
        drift_coefficient: drift,
        constraint_contradiction: all_equal,
        eom_residual_t0,
        excluded: all_equal || drift > 0.0,
    }
}
