//! Discrete probability toolkit for paired patch samples.
//!
//! Marginals live on the bin-index support `0..B`. Joint grids are stored
//! row-major with the source variable `x` as the row and the target `y` as
//! the column.

mod band;
mod counts;
mod joint;
mod marginal;

pub use band::{correlation_band, joint_pmf_model, CorrelationBand};
pub use counts::CountModel;
pub use joint::{
    boundary_pmf, frechet_bounds, hoeffding_covariance, Bound, JointCdfBounds, JointPmf,
};
pub use marginal::{bin_of, cdf_from_pmf, estimate_pmf, quantize, Cdf, Pmf};

/// Tolerance on total probability mass.
pub const MASS_TOLERANCE: f64 = 1e-9;
/// Tolerance on joint-vs-marginal agreement.
pub const MARGINAL_TOLERANCE: f64 = 1e-8;
/// Differencing residues below this magnitude are treated as exact zeros.
pub const RESIDUE_TOLERANCE: f64 = 1e-12;
