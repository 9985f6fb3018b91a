//! Subcommand implementations.

use std::path::{Path, PathBuf};
use std::time::Instant;

use curved_nbody::analysis::{classify, scan_integrator_config, stability_scan, TrajectoryClass};
use curved_nbody::dynamics::{detect_singularity, first_integrals, SingularityKind};
use curved_nbody::equilibria::{catalog, criterion_residual, fixed_point_residual, parabolic_nonexistence_check, CatalogParams, NAMES};
use curved_nbody::geometry::Vec4;
use curved_nbody::integrator::{integrate, uniform_times, IntegratorConfig, Termination, TrajectorySample};
use curved_nbody::isometry::{RESpec, RotationKind};
use curved_nbody::PhaseState;
use serde::Serialize;

use crate::config::{curvature, CatalogParamsDoc, ExperimentConfig, SpecDoc, SCHEMA_VERSION};
use crate::error::CliError;
use crate::io::{fmt_f64, read_trajectory, write_json, write_trajectory};

pub const DEFAULT_T_END: f64 = 10.0;
pub const DEFAULT_SAMPLES: usize = 101;
/// Largest fraction of failed grid points a scan tolerates.
pub const SCAN_FAILURE_LIMIT: f64 = 0.1;

/// Flags shared by the commands that run the integrator.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub t_end: Option<f64>,
    pub samples: Option<usize>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub seed: u64,
}

impl RunOptions {
    fn integrator_config(&self, base: IntegratorConfig, cfg: Option<&ExperimentConfig>) -> Result<IntegratorConfig, CliError> {
        let mut ic = base;
        if let Some(o) = cfg.and_then(|c| c.integrator.as_ref()) {
            o.apply(&mut ic);
        }
        if let Some(r) = self.rel_tol {
            ic.rel_tol = r;
        }
        if let Some(a) = self.abs_tol {
            ic.abs_tol = a;
        }
        ic.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(ic)
    }

    fn load(&self) -> Result<ExperimentConfig, CliError> {
        let path = self.config.as_ref().ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
        ExperimentConfig::load(path)
    }
}

/// Rejects coincident or antipodal starting positions.
pub fn precheck(state: &PhaseState) -> Result<(), CliError> {
    let verdict = detect_singularity(&state.q, state.curvature);
    match verdict.kind {
        SingularityKind::None => Ok(()),
        kind => Err(CliError::Config(format!("initial configuration is singular: {kind}"))),
    }
}

#[derive(Serialize)]
struct SampleIntegrals {
    t: f64,
    h: f64,
    /// `c_wx, c_wy, c_wz, c_xy, c_xz, c_yz`.
    c: [f64; 6],
}

#[derive(Serialize)]
struct Drift {
    max_abs_energy: f64,
    max_rel_energy: f64,
    max_abs_angular_momentum: f64,
}

#[derive(Serialize)]
struct TerminationDoc {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pair: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
}

#[derive(Serialize)]
struct SingularityDoc {
    kind: String,
    margin: f64,
}

#[derive(Serialize)]
struct ClassDoc {
    tag: String,
    bodies: Vec<BodyFitDoc>,
    momentum_pattern: Vec<&'static str>,
}

#[derive(Serialize)]
struct BodyFitDoc {
    motion: String,
    r: f64,
    rho_or_eta: f64,
}

impl From<&TrajectoryClass> for ClassDoc {
    fn from(c: &TrajectoryClass) -> Self {
        ClassDoc {
            tag: c.tag.name().to_string(),
            bodies: c
                .bodies
                .iter()
                .map(|b| BodyFitDoc { motion: format!("{:?}", b.motion), r: b.r, rho_or_eta: b.rho_or_eta })
                .collect(),
            momentum_pattern: c.momentum_pattern.iter().map(|p| p.name()).collect(),
        }
    }
}

#[derive(Serialize)]
struct RunReport {
    schema_version: u32,
    command: &'static str,
    n: usize,
    kappa: f64,
    t_end: f64,
    termination: TerminationDoc,
    initial_singularity: SingularityDoc,
    drift: Drift,
    classification: Option<ClassDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<ResidualDoc>,
    accepted_steps: usize,
    rejected_steps: usize,
    wall_clock_seconds: f64,
    samples: Vec<SampleIntegrals>,
}

#[derive(Serialize)]
pub struct ResidualDoc {
    criterion: String,
    pass: bool,
    max_abs: f64,
    residuals: Vec<[f64; 4]>,
    conditions: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_point_max_abs: Option<f64>,
}

fn residual_doc(spec: &RESpec<f64>) -> Result<ResidualDoc, CliError> {
    let r = criterion_residual(spec)?;
    let mut doc = ResidualDoc {
        criterion: r.criterion.name().to_string(),
        pass: r.pass,
        max_abs: r.max_abs,
        residuals: r.residuals,
        conditions: vec![],
        fixed_point_max_abs: None,
    };
    if spec.kind.positive() {
        if let Ok(fp) = fixed_point_residual(spec) {
            doc.fixed_point_max_abs = Some(fp.max_abs);
            if fp.pass {
                doc.conditions = fp.conditions.iter().map(|c| c.to_string()).collect();
            }
        }
    }
    Ok(doc)
}

fn drift(samples: &[TrajectorySample]) -> Drift {
    let Some(first) = samples.first() else {
        return Drift { max_abs_energy: 0.0, max_rel_energy: 0.0, max_abs_angular_momentum: 0.0 };
    };
    let h0 = first.integrals.h;
    let c0 = first.integrals.angular();
    let mut d = Drift { max_abs_energy: 0.0, max_rel_energy: 0.0, max_abs_angular_momentum: 0.0 };
    for s in samples {
        let dh = (s.integrals.h - h0).abs();
        d.max_abs_energy = d.max_abs_energy.max(dh);
        d.max_rel_energy = d.max_rel_energy.max(if h0 != 0.0 { dh / h0.abs() } else { dh });
        for (a, b) in s.integrals.angular().iter().zip(c0) {
            d.max_abs_angular_momentum = d.max_abs_angular_momentum.max((a - b).abs());
        }
    }
    d
}

fn report_path(out: &Path, cfg: &ExperimentConfig) -> PathBuf {
    cfg.output.as_ref().and_then(|o| o.report.clone()).unwrap_or_else(|| out.with_extension("report.json"))
}

pub fn simulate(opts: &RunOptions) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = opts.load()?;
    let state = cfg.initial_state(opts.seed)?;
    let ic = opts.integrator_config(IntegratorConfig::default(), Some(&cfg))?;
    let t_end = opts.t_end.or(cfg.t_end).unwrap_or(DEFAULT_T_END);
    let count = opts.samples.or(cfg.samples).unwrap_or(DEFAULT_SAMPLES);
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(CliError::Config("t_end must be positive".into()));
    }
    if count < 2 {
        return Err(CliError::Config("at least 2 samples required".into()));
    }
    let out = opts
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().and_then(|o| o.trajectory.clone()))
        .unwrap_or_else(|| PathBuf::from("trajectory.csv"));
    let residual = match cfg.resolve_spec()? {
        Some(spec) if spec.kind != RotationKind::NegParabolic => residual_doc(&spec).ok(),
        _ => None,
    };
    let initial = detect_singularity(&state.q, state.curvature);
    let traj = integrate(&state, t_end, &ic, &uniform_times(0.0, t_end, count))?;
    write_trajectory(&out, &traj.samples)?;

    let (classification, classification_error) = match classify(&traj.samples) {
        Ok(c) => (Some(ClassDoc::from(&c)), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let termination = match traj.termination {
        Termination::Completed => TerminationDoc { status: "completed", pair: None, t: None },
        Termination::SingularityApproach { i, j, t } => TerminationDoc { status: "singularity", pair: Some([i, j]), t: Some(t) },
    };
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        command: "simulate",
        n: state.n(),
        kappa: state.curvature.kappa(),
        t_end,
        termination,
        initial_singularity: SingularityDoc { kind: initial.kind.to_string(), margin: initial.margin },
        drift: drift(&traj.samples),
        classification,
        classification_error,
        residual,
        accepted_steps: traj.accepted_steps,
        rejected_steps: traj.rejected_steps,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        samples: traj
            .samples
            .iter()
            .map(|s| SampleIntegrals { t: s.t, h: s.integrals.h, c: s.integrals.angular() })
            .collect(),
    };
    write_json(Some(&report_path(&out, &cfg)), &report)?;
    match traj.termination {
        Termination::Completed => Ok(()),
        Termination::SingularityApproach { i, j, t } => Err(CliError::Singularity(format!(
            "bodies {i} and {j} approached a singularity at t = {}; trajectory written up to the stop",
            fmt_f64(t)
        ))),
    }
}

#[derive(Serialize)]
struct ParabolicDoc {
    criterion: &'static str,
    pass: bool,
    excluded: bool,
    drift_coefficient: f64,
    fitted_slope: f64,
    constraint_contradiction: bool,
    eom_residual_t0: Option<f64>,
    c_yz_samples: Vec<[f64; 2]>,
}

pub fn verify(opts: &RunOptions) -> Result<(), CliError> {
    let cfg = opts.load()?;
    let spec = cfg
        .resolve_spec()?
        .ok_or_else(|| CliError::Config("verify needs a spec or catalog entry".into()))?;
    let out = opts.out.as_deref();
    if spec.kind == RotationKind::NegParabolic {
        let ev = parabolic_nonexistence_check(&spec);
        let doc = ParabolicDoc {
            criterion: "negative-parabolic",
            pass: !ev.excluded,
            excluded: ev.excluded,
            drift_coefficient: ev.drift_coefficient,
            fitted_slope: ev.fitted_slope,
            constraint_contradiction: ev.constraint_contradiction,
            eom_residual_t0: ev.eom_residual_t0,
            c_yz_samples: ev.c_yz_samples.iter().map(|&(t, c)| [t, c]).collect(),
        };
        write_json(out, &doc)?;
        return if ev.excluded {
            Err(CliError::Verification("parabolic ansatz is not a solution".into()))
        } else {
            Ok(())
        };
    }
    let doc = residual_doc(&spec)?;
    write_json(out, &doc)?;
    if doc.pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!("criterion {} fails: max_abs = {}", doc.criterion, fmt_f64(doc.max_abs))))
    }
}

pub fn catalog_list() {
    for name in NAMES {
        println!("{name}");
    }
}

pub fn catalog_emit(name: &str, params: CatalogParamsDoc, t_end: Option<f64>, samples: Option<usize>, out: Option<&Path>) -> Result<(), CliError> {
    let entry = catalog(name, &CatalogParams::from(&params)).map_err(|e| CliError::Config(format!("catalog {name}: {e}")))?;
    let doc = ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        spec: Some(SpecDoc::from_spec(&entry.spec)),
        t_end,
        samples,
        ..Default::default()
    };
    write_json(out, &doc)
}

#[derive(Serialize)]
struct ClassifyReport {
    kappa: f64,
    masses: Vec<f64>,
    masses_assumed: bool,
    samples: usize,
    #[serde(flatten)]
    class: ClassDoc,
}

fn infer_kappa(rows: &[Vec4<f64>]) -> Result<f64, CliError> {
    let spread = |f: &dyn Fn(&Vec4<f64>) -> f64| {
        let vals: Vec<f64> = rows.iter().map(f).collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (vals[0], (hi - lo) / vals[0].abs().max(f64::MIN_POSITIVE))
    };
    let (a, sa) = spread(&|q| q.dot(*q));
    let (b, sb) = spread(&|q| q.w * q.w + q.x * q.x + q.y * q.y - q.z * q.z);
    if b < 0.0 && sb < sa {
        Ok(1.0 / b)
    } else if a > 0.0 {
        Ok(1.0 / a)
    } else {
        Err(CliError::Config("cannot infer kappa from the positions".into()))
    }
}

pub fn classify_file(path: &Path, opts: &RunOptions, kappa: Option<f64>) -> Result<(), CliError> {
    let raw = read_trajectory(path)?;
    let cfg = opts.config.as_ref().map(|p| ExperimentConfig::load(p)).transpose()?;
    let n = raw.first().map(|s| s.q.len()).unwrap_or(0);
    let kappa = match kappa.or(cfg.as_ref().and_then(|c| c.kappa)) {
        Some(k) => k,
        None if n > 0 => infer_kappa(&raw.iter().flat_map(|s| s.q.iter().copied()).collect::<Vec<_>>())?,
        None => return Err(CliError::Config(format!("{}: no samples", path.display()))),
    };
    let k = curvature(kappa)?;
    let given = cfg.as_ref().and_then(|c| c.masses.clone());
    let masses_assumed = given.is_none();
    let masses = given.unwrap_or_else(|| vec![1.0; n]);
    if masses.len() != n {
        return Err(CliError::Config(format!("{} masses given for {n} bodies", masses.len())));
    }
    let samples = raw
        .into_iter()
        .map(|s| {
            let state = PhaseState::new(k, masses.clone(), s.q, s.v, s.t).map_err(|e| CliError::Config(format!("t = {}: {e}", s.t)))?;
            let integrals = first_integrals(&state)?;
            Ok(TrajectorySample { t: s.t, state, integrals })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let class = classify(&samples).map_err(|e| CliError::Config(e.to_string()))?;
    let report = ClassifyReport { kappa, masses, masses_assumed, samples: samples.len(), class: ClassDoc::from(&class) };
    write_json(opts.out.as_deref(), &report)
}

#[derive(Serialize)]
struct TransitionDoc {
    r: f64,
    bracket: [f64; 2],
}

#[derive(Serialize)]
struct ScanReport {
    r_min: f64,
    r_max: f64,
    steps: usize,
    failed_points: usize,
    transitions: Vec<TransitionDoc>,
}

pub fn scan_stability(r_min: f64, r_max: f64, steps: usize, opts: &RunOptions) -> Result<(), CliError> {
    let ic = opts.integrator_config(scan_integrator_config(), None)?;
    let scan = stability_scan(r_min, r_max, steps, &ic).map_err(|e| CliError::Config(e.to_string()))?;
    let out = opts.out.clone().unwrap_or_else(|| PathBuf::from("scan.csv"));
    let io_err = |e: csv::Error| CliError::Config(format!("{}: {e}", out.display()));
    let mut w = csv::Writer::from_path(&out).map_err(io_err)?;
    w.write_record(["r", "max_off_unit", "classification"]).map_err(io_err)?;
    for p in &scan.grid {
        let (m, c) = match &p.verdict {
            Ok(v) => (fmt_f64(v.max_off_unit), v.classification.name().to_string()),
            Err(e) => ("NaN".to_string(), format!("failed: {e}")),
        };
        w.write_record([fmt_f64(p.r), m, c]).map_err(io_err)?;
    }
    w.flush().map_err(|e| CliError::Config(format!("{}: {e}", out.display())))?;
    let failed = scan.failed_points();
    let report = ScanReport {
        r_min,
        r_max,
        steps,
        failed_points: failed,
        transitions: scan.transitions.iter().map(|t| TransitionDoc { r: t.r, bracket: [t.bracket.0, t.bracket.1] }).collect(),
    };
    write_json(Some(&out.with_extension("transitions.json")), &report)?;
    write_json(None, &report)?;
    if failed as f64 > SCAN_FAILURE_LIMIT * scan.grid.len() as f64 {
        return Err(CliError::Integrator(format!("{failed} of {} grid points failed to integrate", scan.grid.len())));
    }
    Ok(())
}
