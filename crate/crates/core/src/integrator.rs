//! Adaptive integration of the equations of motion with projection onto the
//! constraint manifold, plus joint propagation of the first variational
//! equations.
//!
//! The flat state layout is `[q_0 … q_{n-1}, v_0 … v_{n-1}]`, four
//! coordinates per vector, so the phase dimension is `8n`.

use nalgebra::DMatrix;

use crate::dynamics::{accelerations_raw, detect_singularity_with, first_integrals, FirstIntegrals, PhaseState, SingularityKind, EPS_SING};
use crate::error::{Error, Result};
use crate::geometry::{inner, Curvature, Vec4};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub project_every_step: bool,
    /// Stop when `min |1 − (κ q_i⊙q_j)²|` drops below this value.
    pub singularity_margin_stop: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-14,
            h_max: f64::INFINITY,
            project_every_step: true,
            singularity_margin_stop: 1e-6,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        if !(self.h_min > 0.0 && self.h_min <= self.h_init && self.h_init <= self.h_max) {
            return Err(Error::Domain("need 0 < h_min <= h_init <= h_max".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: PhaseState<f64>,
    pub integrals: FirstIntegrals<f64>,
}

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    SingularityApproach { i: usize, j: usize, t: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub termination: Termination,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    /// Converts an early stop into [`Error::SingularityApproach`].
    pub fn into_result(self) -> Result<Vec<TrajectorySample>> {
        match self.termination {
            Termination::Completed => Ok(self.samples),
            Termination::SingularityApproach { i, j, t } => Err(Error::SingularityApproach { i, j, t }),
        }
    }
}

/// First variational flow `Φ(t, t₀)`, `8n × 8n`.
pub type TransitionMatrix = DMatrix<f64>;

/// `n` equally spaced times from `t0` to `t1` inclusive.
pub fn uniform_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![t1],
        _ => (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Flattens a state into the integrator layout.
pub fn pack(state: &PhaseState<f64>) -> Vec<f64> {
    let mut y = Vec::with_capacity(8 * state.n());
    for q in &state.q {
        y.extend_from_slice(&q.to_array());
    }
    for v in &state.v {
        y.extend_from_slice(&v.to_array());
    }
    y
}

fn vec_at(y: &[f64], k: usize) -> Vec4<f64> {
    Vec4::new(y[4 * k], y[4 * k + 1], y[4 * k + 2], y[4 * k + 3])
}

fn put(y: &mut [f64], k: usize, v: Vec4<f64>) {
    y[4 * k..4 * k + 4].copy_from_slice(&v.to_array());
}

/// Splits a flat state into positions and velocities.
pub fn unpack(y: &[f64], n: usize) -> (Vec<Vec4<f64>>, Vec<Vec4<f64>>) {
    ((0..n).map(|i| vec_at(y, i)).collect(), (0..n).map(|i| vec_at(y, n + i)).collect())
}

struct System<'a> {
    k: Curvature<f64>,
    masses: &'a [f64],
    n: usize,
}

impl System<'_> {
    fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        let n = self.n;
        let (q, v) = unpack(y, n);
        let mut a = vec![Vec4::zero(); n];
        accelerations_raw(self.k, self.masses, &q, &v, &mut a);
        dy[..4 * n].copy_from_slice(&y[4 * n..8 * n]);
        for (i, ai) in a.into_iter().enumerate() {
            put(dy, n + i, ai);
        }
    }

    fn project(&self, y: &mut [f64]) {
        let k = self.k;
        for i in 0..self.n {
            let q = vec_at(y, i);
            let q = q * (k.kappa() * inner(q, q, k)).sqrt().recip();
            let v = vec_at(y, self.n + i);
            let v = v - q * (k.kappa() * inner(q, v, k));
            put(y, i, q);
            put(y, self.n + i, v);
        }
    }

    fn margin_check(&self, y: &[f64], eps: f64) -> Option<(usize, usize)> {
        let q: Vec<_> = (0..self.n).map(|i| vec_at(y, i)).collect();
        match detect_singularity_with(&q, self.k, eps).kind {
            SingularityKind::Collision(i, j) | SingularityKind::Antipodal(i, j) => Some((i, j)),
            SingularityKind::None => None,
        }
    }
}

// Dormand–Prince 5(4) tableau; the system is autonomous, so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Hooks called by the stepping loop.
trait Driver {
    fn rhs(&mut self, y: &[f64], dy: &mut [f64]);
    /// Called after every accepted step; may modify `y`.
    fn accepted(&mut self, t: f64, y: &mut [f64]) -> Option<Termination>;
    fn sample(&mut self, t: f64, y: &[f64]) -> Result<()>;
}

struct Stats {
    termination: Termination,
    accepted: usize,
    rejected: usize,
}

/// Adaptive stepping from `t0` to `t_end`, landing exactly on each stop time.
fn drive(d: &mut impl Driver, y: &mut [f64], t0: f64, t_end: f64, stops: &[f64], cfg: &IntegratorConfig) -> Result<Stats> {
    let dim = y.len();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    let mut tmp = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut t = t0;
    let mut h = cfg.h_init.min(cfg.h_max);
    let mut err_prev: f64 = 1e-4;
    let mut stats = Stats { termination: Termination::Completed, accepted: 0, rejected: 0 };
    let mut next = 0;
    while next < stops.len() && stops[next] <= t0 {
        d.sample(t0, y)?;
        next += 1;
    }
    d.rhs(y, &mut k[0]);
    while t < t_end {
        if stats.accepted + stats.rejected >= cfg.max_steps {
            return Err(Error::StepLimit { t, max_steps: cfg.max_steps });
        }
        let target = if next < stops.len() { stops[next].min(t_end) } else { t_end };
        let remaining = target - t;
        let clipped = h >= remaining;
        let h_try = if clipped { remaining } else { h };
        if h_try < cfg.h_min && !clipped {
            return Err(Error::StepSizeUnderflow { t, h: h_try });
        }
        for s in 1..7 {
            for m in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[m];
                }
                tmp[m] = y[m] + h_try * acc;
            }
            d.rhs(&tmp, &mut k[s]);
            if s == 6 {
                y_new.copy_from_slice(&tmp);
            }
        }
        let mut sum = 0.0;
        for m in 0..dim {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[m];
            }
            let sc = cfg.abs_tol + cfg.rel_tol * y[m].abs().max(y_new[m].abs());
            let r = h_try * e / sc;
            sum += r * r;
        }
        let err = (sum / dim as f64).sqrt();
        if !err.is_finite() || y_new.iter().any(|x| !x.is_finite()) {
            h = h_try * 0.2;
            stats.rejected += 1;
            if h < cfg.h_min {
                return Err(Error::StepSizeUnderflow { t, h });
            }
            continue;
        }
        if err <= 1.0 {
            stats.accepted += 1;
            t = if clipped { target } else { t + h_try };
            y.copy_from_slice(&y_new);
            if let Some(term) = d.accepted(t, y) {
                stats.termination = term;
                return Ok(stats);
            }
            d.rhs(y, &mut k[0]);
            if clipped && next < stops.len() {
                while next < stops.len() && stops[next] <= t {
                    d.sample(t, y)?;
                    next += 1;
                }
            }
            let fac = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.17) * err_prev.powf(0.04)).clamp(0.2, 10.0) };
            let proposal = (h_try * fac).min(cfg.h_max);
            h = if clipped { proposal.max(h) } else { proposal };
            err_prev = err.max(1e-4);
        } else {
            stats.rejected += 1;
            h = h_try * (0.9 * err.powf(-0.2)).max(0.2);
            if h < cfg.h_min {
                return Err(Error::StepSizeUnderflow { t, h });
            }
        }
    }
    Ok(stats)
}

struct PlainDriver<'a> {
    sys: System<'a>,
    cfg: IntegratorConfig,
    template: PhaseState<f64>,
    samples: Vec<TrajectorySample>,
}

impl PlainDriver<'_> {
    fn state(&self, t: f64, y: &[f64]) -> PhaseState<f64> {
        let (q, v) = unpack(y, self.sys.n);
        PhaseState { curvature: self.template.curvature, masses: self.template.masses.clone(), q, v, t }
    }
}

impl Driver for PlainDriver<'_> {
    fn rhs(&mut self, y: &[f64], dy: &mut [f64]) {
        self.sys.rhs(y, dy)
    }

    fn accepted(&mut self, t: f64, y: &mut [f64]) -> Option<Termination> {
        if self.cfg.project_every_step {
            self.sys.project(y);
        }
        self.sys
            .margin_check(y, self.cfg.singularity_margin_stop)
            .map(|(i, j)| Termination::SingularityApproach { i, j, t })
    }

    fn sample(&mut self, t: f64, y: &[f64]) -> Result<()> {
        let state = self.state(t, y);
        let integrals = first_integrals(&state)?;
        self.samples.push(TrajectorySample { t, state, integrals });
        Ok(())
    }
}

fn precheck(state0: &PhaseState<f64>, t_end: f64, cfg: &IntegratorConfig) -> Result<Option<Termination>> {
    cfg.validate()?;
    state0.validate()?;
    if !(t_end >= state0.t) {
        return Err(Error::Domain(format!("t_end = {t_end} precedes t0 = {}", state0.t)));
    }
    let v = detect_singularity_with(&state0.q, state0.curvature, EPS_SING);
    if v.kind != SingularityKind::None {
        return Err(Error::Singularity(v.kind));
    }
    let v = detect_singularity_with(&state0.q, state0.curvature, cfg.singularity_margin_stop);
    Ok(match v.kind {
        SingularityKind::Collision(i, j) | SingularityKind::Antipodal(i, j) => {
            Some(Termination::SingularityApproach { i, j, t: state0.t })
        }
        SingularityKind::None => None,
    })
}

/// Integrates from `state0` to `t_end`, recording a sample at each requested
/// time in `[t0, t_end]`.
pub fn integrate(state0: &PhaseState<f64>, t_end: f64, cfg: &IntegratorConfig, sample_times: &[f64]) -> Result<Trajectory> {
    let early = precheck(state0, t_end, cfg)?;
    let mut stops: Vec<f64> = sample_times.iter().copied().filter(|&s| s >= state0.t && s <= t_end).collect();
    stops.sort_by(|a, b| a.total_cmp(b));
    let mut d = PlainDriver {
        sys: System { k: state0.curvature, masses: &state0.masses, n: state0.n() },
        cfg: *cfg,
        template: state0.clone(),
        samples: Vec::with_capacity(stops.len()),
    };
    if let Some(term) = early {
        return Ok(Trajectory { samples: vec![], termination: term, accepted_steps: 0, rejected_steps: 0 });
    }
    let mut y = pack(state0);
    let stats = drive(&mut d, &mut y, state0.t, t_end, &stops, cfg)?;
    Ok(Trajectory {
        samples: d.samples,
        termination: stats.termination,
        accepted_steps: stats.accepted,
        rejected_steps: stats.rejected,
    })
}

/// Analytic Jacobian of the first-order vector field at `state`.
pub fn rhs_jacobian(state: &PhaseState<f64>) -> DMatrix<f64> {
    jacobian_flat(state.curvature, &state.masses, &pack(state))
}

fn outer_add(j: &mut DMatrix<f64>, r0: usize, c0: usize, a: Vec4<f64>, b: Vec4<f64>, s: f64) {
    let a = a.to_array();
    let b = b.to_array();
    for r in 0..4 {
        for c in 0..4 {
            j[(r0 + r, c0 + c)] += s * a[r] * b[c];
        }
    }
}

fn diag_add(j: &mut DMatrix<f64>, r0: usize, c0: usize, s: f64) {
    for r in 0..4 {
        j[(r0 + r, c0 + r)] += s;
    }
}

fn jacobian_flat(k: Curvature<f64>, masses: &[f64], y: &[f64]) -> DMatrix<f64> {
    let n = masses.len();
    let (q, v) = unpack(y, n);
    let kk = k.kappa();
    let sig = k.sigma();
    let c32 = kk.abs().powf(1.5);
    let g = |u: Vec4<f64>| Vec4::new(u.w, u.x, u.y, sig * u.z);
    let mut j = DMatrix::zeros(8 * n, 8 * n);
    for i in 0..n {
        for r in 0..4 {
            j[(4 * i + r, 4 * n + 4 * i + r)] = 1.0;
        }
    }
    for i in 0..n {
        let row = 4 * n + 4 * i;
        let a = kk * inner(q[i], q[i], k);
        let gqi = g(q[i]);
        for jj in 0..n {
            if jj == i {
                continue;
            }
            let b = kk * inner(q[jj], q[jj], k);
            let x = kk * inner(q[i], q[jj], k);
            let gqj = g(q[jj]);
            let d = sig * (a * b - x * x);
            let c = masses[jj] * c32;
            let d32 = c / (d * d.sqrt());
            let d52 = -1.5 * c / (d * d * d.sqrt());
            let nv = (q[jj] * a - q[i] * x) * b;
            // derivative with respect to q_i
            let ci = 4 * i;
            outer_add(&mut j, row, ci, q[jj], gqi, d32 * b * 2.0 * kk);
            outer_add(&mut j, row, ci, q[i], gqj, -d32 * b * kk);
            diag_add(&mut j, row, ci, -d32 * b * x);
            let dd_i = (gqi * (2.0 * kk * b) - gqj * (2.0 * kk * x)) * sig;
            outer_add(&mut j, row, ci, nv, dd_i, d52);
            // derivative with respect to q_j
            let cj = 4 * jj;
            outer_add(&mut j, row, cj, q[jj] * a - q[i] * x, gqj, d32 * 2.0 * kk);
            diag_add(&mut j, row, cj, d32 * b * a);
            outer_add(&mut j, row, cj, q[i], gqi, -d32 * b * kk);
            let dd_j = (gqj * (2.0 * kk * a) - gqi * (2.0 * kk * x)) * sig;
            outer_add(&mut j, row, cj, nv, dd_j, d52);
        }
        let vv = inner(v[i], v[i], k);
        diag_add(&mut j, row, 4 * i, -kk * vv);
        outer_add(&mut j, row, 4 * n + 4 * i, q[i], g(v[i]), -2.0 * kk);
    }
    j
}

struct VariationalDriver<'a> {
    sys: System<'a>,
    cfg: IntegratorConfig,
}

impl Driver for VariationalDriver<'_> {
    fn rhs(&mut self, y: &[f64], dy: &mut [f64]) {
        let d = 8 * self.sys.n;
        self.sys.rhs(&y[..d], &mut dy[..d]);
        let jac = jacobian_flat(self.sys.k, self.sys.masses, &y[..d]);
        let phi = DMatrix::from_column_slice(d, d, &y[d..]);
        let out = jac * phi;
        dy[d..].copy_from_slice(out.as_slice());
    }

    fn accepted(&mut self, t: f64, y: &mut [f64]) -> Option<Termination> {
        let d = 8 * self.sys.n;
        if self.cfg.project_every_step {
            self.sys.project(&mut y[..d]);
        }
        self.sys
            .margin_check(&y[..d], self.cfg.singularity_margin_stop)
            .map(|(i, j)| Termination::SingularityApproach { i, j, t })
    }

    fn sample(&mut self, _t: f64, _y: &[f64]) -> Result<()> {
        Ok(())
    }
}

/// Propagates the state together with `Φ(t, t₀)`, starting from `Φ = I`.
pub fn integrate_variational(state0: &PhaseState<f64>, t_end: f64, cfg: &IntegratorConfig) -> Result<(PhaseState<f64>, TransitionMatrix)> {
    if let Some(Termination::SingularityApproach { i, j, t }) = precheck(state0, t_end, cfg)? {
        return Err(Error::SingularityApproach { i, j, t });
    }
    let n = state0.n();
    let d = 8 * n;
    let mut y = pack(state0);
    y.extend_from_slice(DMatrix::<f64>::identity(d, d).as_slice());
    let mut drv = VariationalDriver { sys: System { k: state0.curvature, masses: &state0.masses, n }, cfg: *cfg };
    let stats = drive(&mut drv, &mut y, state0.t, t_end, &[], cfg)?;
    if let Termination::SingularityApproach { i, j, t } = stats.termination {
        return Err(Error::SingularityApproach { i, j, t });
    }
    let (q, v) = unpack(&y[..d], n);
    let state = PhaseState { curvature: state0.curvature, masses: state0.masses.clone(), q, v, t: t_end };
    Ok((state, DMatrix::from_column_slice(d, d, &y[d..])))
}

/// Vector-field evaluation on a packed state, for finite-difference checks.
pub fn rhs_flat(state: &PhaseState<f64>, y: &[f64]) -> Vec<f64> {
    let sys = System { k: state.curvature, masses: &state.masses, n: state.n() };
    let mut dy = vec![0.0; y.len()];
    sys.rhs(y, &mut dy);
    dy
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_times_endpoints() {
        assert_eq!(uniform_times(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(uniform_times(0.0, 1.0, 1), vec![1.0]);
    }

    #[test]
    fn config_validation() {
        let mut c = IntegratorConfig::default();
        assert!(c.validate().is_ok());
        c.h_min = 1.0;
        assert!(c.validate().is_err());
    }
}
