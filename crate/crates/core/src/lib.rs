//! Kähler-Ricci flow on U(n)-invariant metrics of CP¹ and CP².

pub mod algebra;
pub mod chebyshev;
pub mod error;
pub mod flow;
pub mod fd;
pub mod invariants;
pub mod functionals;
pub mod geometry;
pub mod linalg;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision instances of the generic types.
pub type Grid = geometry::ReducedGrid<f64>;
pub type State = geometry::ReducedMetricState<f64>;
pub type Curvature = geometry::CurvatureField<f64>;
pub type Tensor = algebra::PointCurvatureTensor<f64>;
pub type Spectrum = algebra::RicciSpectrum<f64>;
pub type Ledger = functionals::FunctionalLedger<f64>;
pub type HolomorphicField = invariants::HolomorphicFieldDesc<f64>;
pub type Trace = flow::FlowTrace<f64>;
pub type Record = flow::FlowRecord<f64>;
pub type Fit = flow::AutomorphismFit<f64>;
