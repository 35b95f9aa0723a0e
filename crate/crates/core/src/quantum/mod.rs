//! Random 4x4 density matrices over the real, complex and quaternion rings,
//! their partial transposes and determinants, and Monte Carlo estimators.

pub mod matrix;
pub mod montecarlo;
pub mod quaternion;
pub mod sampler;

pub use matrix::{determinant, moore_determinant, ring_determinant, Matrix4, Ring};
pub use montecarlo::{empirical_moments, mc_separability, BivariateMomentTable, McResult, MomentEntry};
pub use quaternion::Quaternion;
pub use sampler::{sample_density, sample_stream, DensityMatrix};

/// Smallest eigenvalue of the complex 8x8 embedding of `m`.
pub fn min_embedding_eigenvalue(m: &Matrix4) -> f64 {
    let e = m.complex_embedding();
    let rows: Vec<Vec<_>> = e.iter().map(|r| r.to_vec()).collect();
    matrix::hermitian_eigenvalues(&rows)[0]
}

/// `det(rho^PT)` with the ring-appropriate determinant.
pub fn partial_transpose_determinant(rho: &DensityMatrix) -> crate::Result<f64> {
    ring_determinant(&rho.matrix().partial_transpose()?)
}
