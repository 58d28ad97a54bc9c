//! Kernel density estimation on `[0, 1]` with the linked boundary condition
//! `f(0) = r f(1)`, `f'(0) = f'(1)`.
//!
//! Estimates can be computed three ways that agree with each other: direct
//! kernel sums ([`estimate_density`]), the eigenfunction series
//! ([`series_estimate`]) and the finite-difference scheme in
//! [`binned_solver`].

pub mod bandwidth;
pub mod bench;
pub mod binned_solver;
pub mod error;
pub mod heat_kernels;
pub mod linked_kernel;
pub mod polynomial;
pub mod quadrature;
pub mod series_solver;
pub mod types;

pub use bandwidth::{
    amise_value, estimate_r, lscv_bandwidth, oracle_amise_bandwidth, silverman_bandwidth,
    BandwidthRule, BandwidthSelection, TargetDensityInfo,
};
pub use binned_solver::{
    backward_euler_evolve, bin_samples, build_four_corners, ghost_values,
    matrix_exponential_evolve, spectral_data, BinnedDensity, BinnedGrid, FourCornersMatrix,
    SpectralData,
};
pub use error::{Error, Result};
pub use heat_kernels::{eval_k1, eval_k1_dx, SummationControl};
pub use linked_kernel::{estimate_density, eval_linked_kernel, stationary_density};
pub use polynomial::Polynomial;
pub use series_solver::{
    empirical_transforms, eval_series_grid, eval_series_solution, series_estimate,
    truncation_bound, CoefficientSupplier, EmpiricalTransforms, SeriesConfig,
};
pub use types::{BoundaryRatio, DiffusionTime, EvaluationGrid, GridDensity, SampleSet};
