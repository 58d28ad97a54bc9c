//! Synthetic targets, baseline estimators, error metrics and simulation
//! studies.

mod baselines;
mod experiment;
mod metrics;
mod synthetic;

pub use baselines::{cosine_kde, cosine_kernel, gaussian_kde_baseline};
pub use experiment::{
    expected_cosine_estimate, expected_linked_estimate, run_mise_experiment, run_replicate,
    write_mise_csv, BandwidthChoice, EstimatorMethod, MiseRow,
};
pub use metrics::{error_metrics, rate_fit, ErrorReport};
pub use synthetic::{sample_synthetic, SyntheticTarget, TargetKind};
