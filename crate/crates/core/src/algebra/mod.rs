//! Pointwise curvature algebra: symmetric functions of the Ricci spectrum,
//! Vandermonde coefficient machinery, and unitary-frame curvature tensors.

mod sigma;
mod tensor;
mod vandermonde;

pub use sigma::{expansion_product, expansion_sum, poly_identity_lhs, sigma_k, RicciSpectrum};
pub use tensor::{constant_curvature_model, plane_relation, real_curvature, sectional_from_bisectional, PlaneRelation, PointCurvatureTensor};
pub use vandermonde::{lagrange_value, vandermonde_inverse, vandermonde_matrix, VandermondeInverse, MAX_VANDERMONDE_DIM};
