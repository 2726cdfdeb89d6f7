//! Reduced geometry of U(n)-invariant Kähler metrics on CP¹ and CP².

mod grid;
mod manifold;
pub mod families;
mod field;
pub mod forms;
pub mod profile;
pub mod spectrum;
mod state;

pub use grid::ReducedGrid;
pub use manifold::Manifold;
pub use profile::{MomentProfile, PointData};
pub use field::{Jet, MomentSeriesField, RadialFn, ScalarField};
pub use state::{default_degree, FD_ORDER, integrate_pairs, pair_points, CurvatureField, MomentQuadrature, PairPoint, ReducedMetricState};
pub use spectrum::{laplacian_spectrum, InvariantSpectrum};
pub use families::LogisticPolynomial;
