//! Experiment configuration documents.

use std::path::{Path, PathBuf};

use curved_nbody::equilibria::{catalog, perturb_phase, CatalogParams};
use curved_nbody::geometry::{Curvature, Vec4};
use curved_nbody::integrator::IntegratorConfig;
use curved_nbody::isometry::{generate_trajectory, BodyConstants, RESpec, RotationKind};
use curved_nbody::PhaseState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocities: Option<Vec<[f64; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<CatalogRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SpecDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_state: Option<RandomState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputPaths>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogRef {
    pub name: String,
    #[serde(default)]
    pub params: CatalogParamsDoc,
    /// Shifts one phase by this amount.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturb_phase: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogParamsDoc {
    pub kappa: Option<f64>,
    pub mass: Option<f64>,
    pub r: Option<f64>,
    pub eta: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub angle: Option<f64>,
    pub phases_a: Option<[f64; 3]>,
    pub phases_b: Option<[f64; 3]>,
}

impl From<&CatalogParamsDoc> for CatalogParams {
    fn from(p: &CatalogParamsDoc) -> Self {
        CatalogParams {
            kappa: p.kappa,
            mass: p.mass,
            r: p.r,
            eta: p.eta,
            alpha: p.alpha,
            beta: p.beta,
            angle: p.angle,
            phases_a: p.phases_a,
            phases_b: p.phases_b,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDoc {
    pub kind: String,
    pub kappa: f64,
    pub masses: Vec<f64>,
    pub bodies: Vec<BodyDoc>,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodyDoc {
    Elliptic { r: f64, a: f64, y: f64, z: f64 },
    EllipticElliptic { r: f64, a: f64, rho: f64, b: f64 },
    Hyperbolic { w: f64, x: f64, eta: f64, b: f64 },
    EllipticHyperbolic { r: f64, a: f64, eta: f64, b: f64 },
    Parabolic { alpha: f64, beta: f64, gamma: f64, delta: f64 },
}

impl From<BodyDoc> for BodyConstants<f64> {
    fn from(b: BodyDoc) -> Self {
        match b {
            BodyDoc::Elliptic { r, a, y, z } => BodyConstants::Elliptic { r, a, y, z },
            BodyDoc::EllipticElliptic { r, a, rho, b } => BodyConstants::EllipticElliptic { r, a, rho, b },
            BodyDoc::Hyperbolic { w, x, eta, b } => BodyConstants::Hyperbolic { w, x, eta, b },
            BodyDoc::EllipticHyperbolic { r, a, eta, b } => BodyConstants::EllipticHyperbolic { r, a, eta, b },
            BodyDoc::Parabolic { alpha, beta, gamma, delta } => BodyConstants::Parabolic { alpha, beta, gamma, delta },
        }
    }
}

impl From<BodyConstants<f64>> for BodyDoc {
    fn from(b: BodyConstants<f64>) -> Self {
        match b {
            BodyConstants::Elliptic { r, a, y, z } => BodyDoc::Elliptic { r, a, y, z },
            BodyConstants::EllipticElliptic { r, a, rho, b } => BodyDoc::EllipticElliptic { r, a, rho, b },
            BodyConstants::Hyperbolic { w, x, eta, b } => BodyDoc::Hyperbolic { w, x, eta, b },
            BodyConstants::EllipticHyperbolic { r, a, eta, b } => BodyDoc::EllipticHyperbolic { r, a, eta, b },
            BodyConstants::Parabolic { alpha, beta, gamma, delta } => BodyDoc::Parabolic { alpha, beta, gamma, delta },
        }
    }
}

impl SpecDoc {
    pub fn from_spec(spec: &RESpec<f64>) -> Self {
        SpecDoc {
            kind: spec.kind.name().to_string(),
            kappa: spec.curvature.kappa(),
            masses: spec.masses.clone(),
            bodies: spec.bodies.iter().map(|&b| b.into()).collect(),
            alpha: spec.alpha,
            beta: spec.beta,
        }
    }

    pub fn to_spec(&self) -> Result<RESpec<f64>, CliError> {
        let kind = RotationKind::from_name(&self.kind).ok_or_else(|| {
            let names: Vec<_> = RotationKind::ALL.iter().map(|k| k.name()).collect();
            CliError::Config(format!("unknown rotation kind {:?}; expected one of {names:?}", self.kind))
        })?;
        Ok(RESpec {
            kind,
            curvature: curvature(self.kappa)?,
            masses: self.masses.clone(),
            bodies: self.bodies.iter().map(|&b| b.into()).collect(),
            alpha: self.alpha,
            beta: self.beta,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomState {
    pub n: usize,
    /// Velocity components are drawn from `[-speed, speed]` before projection.
    #[serde(default = "default_speed")]
    pub speed: f64,
    /// Smallest allowed pairwise singularity margin.
    #[serde(default = "default_margin")]
    pub min_margin: f64,
}

fn default_speed() -> f64 {
    0.5
}

fn default_margin() -> f64 {
    1e-2
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorOverrides {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub h_init: Option<f64>,
    pub h_min: Option<f64>,
    pub h_max: Option<f64>,
    pub project_every_step: Option<bool>,
    pub singularity_margin_stop: Option<f64>,
    pub max_steps: Option<usize>,
}

impl IntegratorOverrides {
    pub fn apply(&self, cfg: &mut IntegratorConfig) {
        let set = |dst: &mut f64, src: Option<f64>| {
            if let Some(v) = src {
                *dst = v;
            }
        };
        set(&mut cfg.rel_tol, self.rel_tol);
        set(&mut cfg.abs_tol, self.abs_tol);
        set(&mut cfg.h_init, self.h_init);
        set(&mut cfg.h_min, self.h_min);
        set(&mut cfg.h_max, self.h_max);
        set(&mut cfg.singularity_margin_stop, self.singularity_margin_stop);
        if let Some(p) = self.project_every_step {
            cfg.project_every_step = p;
        }
        if let Some(m) = self.max_steps {
            cfg.max_steps = m;
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub trajectory: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

pub fn curvature(kappa: f64) -> Result<Curvature<f64>, CliError> {
    Curvature::new(kappa).map_err(|e| CliError::Config(e.to_string()))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        if let Some(k) = cfg.kappa {
            curvature(k)?;
        }
        Ok(cfg)
    }

    /// The relative-equilibrium spec named by `spec` or `catalog`.
    pub fn resolve_spec(&self) -> Result<Option<RESpec<f64>>, CliError> {
        if let Some(doc) = &self.spec {
            return doc.to_spec().map(Some);
        }
        match &self.catalog {
            Some(c) => {
                let entry = catalog(&c.name, &(&c.params).into()).map_err(|e| CliError::Config(format!("catalog {}: {e}", c.name)))?;
                Ok(Some(match c.perturb_phase {
                    Some(d) => perturb_phase(&entry.spec, d),
                    None => entry.spec,
                }))
            }
            None => Ok(None),
        }
    }

    /// Initial state from explicit positions, a random draw, a spec or a
    /// catalog entry, checked against the manifold constraints.
    pub fn initial_state(&self, seed: u64) -> Result<PhaseState, CliError> {
        let explicit = self.positions.is_some() || self.velocities.is_some();
        let sources = [explicit, self.random_state.is_some(), self.spec.is_some() || self.catalog.is_some()];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(CliError::Config(
                "give exactly one of positions/velocities, random_state, or spec/catalog".into(),
            ));
        }
        let state = if explicit {
            let k = curvature(self.kappa.ok_or_else(|| CliError::Config("kappa is required".into()))?)?;
            let q: Vec<Vec4<f64>> = self
                .positions
                .as_ref()
                .ok_or_else(|| CliError::Config("positions are required".into()))?
                .iter()
                .map(|&a| Vec4::from_array(a))
                .collect();
            let v: Vec<Vec4<f64>> = match &self.velocities {
                Some(v) => v.iter().map(|&a| Vec4::from_array(a)).collect(),
                None => vec![Vec4::zero(); q.len()],
            };
            let masses = self.masses.clone().unwrap_or_else(|| vec![1.0; q.len()]);
            PhaseState::new(k, masses, q, v, 0.0).map_err(|e| CliError::Config(e.to_string()))?
        } else if let Some(r) = &self.random_state {
            let k = curvature(self.kappa.ok_or_else(|| CliError::Config("kappa is required".into()))?)?;
            random_state(k, r, self.masses.clone(), seed)?
        } else {
            let spec = self.resolve_spec()?.expect("spec or catalog present");
            generate_trajectory(&spec, 0.0).map_err(|e| CliError::Config(e.to_string()))?
        };
        crate::commands::precheck(&state)?;
        Ok(state)
    }
}

fn random_state(k: Curvature<f64>, r: &RandomState, masses: Option<Vec<f64>>, seed: u64) -> Result<PhaseState, CliError> {
    use curved_nbody::dynamics::detect_singularity;
    use curved_nbody::geometry::{project_to_manifold, project_to_tangent};
    if r.n == 0 {
        return Err(CliError::Config("random_state.n must be positive".into()));
    }
    let masses = masses.unwrap_or_else(|| vec![1.0; r.n]);
    if masses.len() != r.n {
        return Err(CliError::Config("masses must match random_state.n".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cube = |s: f64| Vec4::new(rng.gen_range(-s..s), rng.gen_range(-s..s), rng.gen_range(-s..s), rng.gen_range(-s..s));
    for _ in 0..10_000 {
        let mut q = Vec::with_capacity(r.n);
        while q.len() < r.n {
            let mut c = cube(2.0 * k.radius());
            if !k.is_positive() {
                c.z = c.z.abs() + k.radius();
            }
            if let Ok(p) = project_to_manifold(c, k) {
                q.push(p);
            }
        }
        let qv: Vec<Vec4<f64>> = q.iter().map(|p| p.v()).collect();
        if detect_singularity(&qv, k).margin < r.min_margin {
            continue;
        }
        let v = q.iter().map(|p| project_to_tangent(p, cube(r.speed)).d()).collect();
        return PhaseState::new(k, masses, qv, v, 0.0).map_err(|e| CliError::Config(e.to_string()));
    }
    Err(CliError::Config("could not draw a configuration with the requested margin".into()))
}
