//! Gravitational n-body dynamics in the 3-sphere and hyperbolic 3-space.
//!
//! Geometry, isometries and dynamics are generic over the scalar type
//! ([`geometry::Real`]); numerical integration, equilibrium solvers and
//! stability analysis work in `f64`. The aliases below fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod geometry;
pub mod integrator;
pub mod isometry;

pub use error::{Error, Result};

pub type Curvature = geometry::Curvature<f64>;
pub type Vec4 = geometry::Vec4<f64>;
pub type ManifoldPoint = geometry::ManifoldPoint<f64>;
pub type TangentVector = geometry::TangentVector<f64>;
pub type PhaseState = dynamics::PhaseState<f64>;
pub type FirstIntegrals = dynamics::FirstIntegrals<f64>;
pub type SingularityVerdict = dynamics::SingularityVerdict<f64>;
pub type RESpec = isometry::RESpec<f64>;
pub type BodyConstants = isometry::BodyConstants<f64>;
