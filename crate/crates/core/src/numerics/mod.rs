//! Dense complex linear algebra for the small Hermitian problems that
//! appear in every solver step (dimensions up to a few dozen).

mod eig;
mod linalg;
mod matrix;
mod psd;
mod real;

pub use eig::{hermitian_eig, leading_eigenpair, reconstruct, EigenPair, HERMITIAN_TOL};
pub use linalg::{cholesky, generalized_max_eigvec, hermitian_pinv};
pub use matrix::{dot_conj, norm2, normalized, ComplexMatrix};
pub use psd::{project_psd_unit_diag, spectral_norm_subgradient, PSD_FEAS_TOL};
pub use real::{gemm, RealMatrix};
