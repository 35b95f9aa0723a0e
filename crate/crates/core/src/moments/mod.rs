//! Density reconstruction from raw moments by Legendre expansion.

pub mod cache;
pub mod legendre;
pub mod reconstruct;
pub mod sequence;

pub use legendre::{
    float_working_bits, legendre_moments, legendre_moments_float, legendre_values, FloatMoments,
    LegendreTable,
};
pub use reconstruct::{
    convergence_trace, reconstruct, separability_probability, ConvergenceTrace, Estimate,
    LegendreReconstruction, Mode, TraceRow,
};
pub use sequence::{default_interval, shift_moments, to_unit, MomentSequence};
