//! Dense complex matrix algebra for small qubit spaces.
//!
//! Everything here is plain row-major `f64` complex arithmetic. Dimensions
//! stay at or below 2^10, so no sparse or blocked kernels are needed; the
//! priority is reproducibility (deterministic loops, no platform-dependent
//! BLAS) and exact adherence to the block/reduction conventions used by the
//! scoring layers.

mod complexmat;
mod eigen;
mod interchange;
mod types;

pub use complexmat::{block, m_reduce, partial_trace, tensor, tensor_vec, ComplexMatrix, TraceSide};
pub use eigen::{
    generalized_max_eigenvalue, hermitian_eigen, inverse_sqrt, support_projector, validate_psd,
    HermitianEigen, PsdReport,
};
pub use interchange::{load_matrix_document, save_matrix_document, MatrixDocument};
pub use types::{PureState, SemiDensityMatrix, UnitaryTransform};

/// Entrywise tolerance for Hermiticity checks on freshly built matrices.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Stricter entrywise Hermiticity tolerance applied to semi-density inputs.
pub const SEMI_DENSITY_HERMITIAN_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue for a positive semidefinite matrix.
pub const PSD_MIN_EIG_TOL: f64 = 1e-10;
/// Tolerance on traces and unitarity defects.
pub const TRACE_TOL: f64 = 1e-10;
/// Tolerance for algebraic identities checked over random instances.
pub const IDENTITY_TOL: f64 = 1e-9;
