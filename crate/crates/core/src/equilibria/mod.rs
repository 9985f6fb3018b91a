//! Relative equilibria: existence conditions, frequencies, masses, a catalog
//! of explicit orbits, and the parabolic nonexistence check.

pub mod catalog;
pub mod criteria;
pub mod frequencies;
pub mod masses;
pub mod parabolic;

pub use catalog::{catalog, perturb_phase, CatalogEntry, CatalogParams, NAMES};
pub use criteria::{criterion_residual, fixed_point_residual, pair_cosines, Criterion, PairCosines, ResidualReport, StructuralCondition, EPS_CRIT};
pub use frequencies::{
    elliptic_hyperbolic_frequencies, hyperbolic_frequency, hyperbolic_frequency_unit_mass, lagrangian_frequency, solve_squared_frequency,
    FrequencyCircle,
};
pub use masses::{masses_for_great_circle_shape, MassSolution};
pub use parabolic::{parabolic_nonexistence_check, ParabolicEvidence};
