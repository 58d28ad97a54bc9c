use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use super::baselines::{cosine_kde, cosine_kernel, gaussian_kde_baseline};
use super::metrics::{error_metrics, ErrorReport};
use super::synthetic::{sample_synthetic, SyntheticTarget};
use crate::bandwidth::{
    cosine_oracle_bandwidth, estimate_r, log_time_grid, lscv_bandwidth, oracle_amise_bandwidth,
    silverman_bandwidth,
};
use crate::error::{Error, Result};
use crate::heat_kernels::SummationControl;
use crate::linked_kernel::eval_linked_kernel;
use crate::quadrature::trapezoid_fn;
use crate::series_solver::series_estimate;
use crate::types::{BoundaryRatio, DiffusionTime, EvaluationGrid, GridDensity, SampleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorMethod {
    /// Linked estimator with the target's true `r`.
    Linked,
    /// Linked estimator with `r` estimated from the sample (1 if that fails).
    LinkedEstimatedR,
    Cosine,
    Gaussian,
}

impl EstimatorMethod {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "linked" => Ok(Self::Linked),
            "linked_est" | "linked-est" => Ok(Self::LinkedEstimatedR),
            "cosine" => Ok(Self::Cosine),
            "gaussian" => Ok(Self::Gaussian),
            _ => Err(Error::InvalidParameter(format!("unknown method '{s}'"))),
        }
    }
}

impl fmt::Display for EstimatorMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Linked => "linked",
            Self::LinkedEstimatedR => "linked_est",
            Self::Cosine => "cosine",
            Self::Gaussian => "gaussian",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthChoice {
    /// AMISE optimum from the known target; the Gaussian baseline uses the
    /// cosine optimum.
    Oracle,
    Silverman,
    /// Cross-validation over 30 log-spaced times in `[1e-4, 1]`; linked
    /// methods only.
    Lscv,
    Fixed(DiffusionTime),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiseRow {
    pub n: usize,
    pub method: EstimatorMethod,
    pub reps: usize,
    pub mean_t: f64,
    pub mean_ise: f64,
    pub mean_l2: f64,
    pub mean_linf: f64,
}

/// One replicate: draw, pick `t`, estimate on the 1001-point grid, compare.
pub fn run_replicate(
    target: &SyntheticTarget,
    method: EstimatorMethod,
    n: usize,
    choice: BandwidthChoice,
    seed: u64,
) -> Result<(DiffusionTime, ErrorReport)> {
    let samples = sample_synthetic(target, n, seed)?;
    let grid = EvaluationGrid::default();
    let ctl = SummationControl::default();
    let r = match method {
        EstimatorMethod::Linked => target.r_true()?,
        EstimatorMethod::LinkedEstimatedR => {
            estimate_r(&samples).unwrap_or(BoundaryRatio::PERIODIC)
        }
        _ => BoundaryRatio::PERIODIC,
    };
    let t = choose_time(target, method, &samples, r, choice)?;
    let est = estimate_with(method, &samples, r, t, &grid, &ctl)?;
    let truth: Vec<f64> = grid.points().iter().map(|&x| target.density(x)).collect();
    let mut report = error_metrics(&est, &truth)?;
    report.n = n;
    report.method = method.to_string();
    report.seed = seed;
    Ok((t, report))
}

fn choose_time(
    target: &SyntheticTarget,
    method: EstimatorMethod,
    samples: &SampleSet,
    r: BoundaryRatio,
    choice: BandwidthChoice,
) -> Result<DiffusionTime> {
    Ok(match choice {
        BandwidthChoice::Fixed(t) => t,
        BandwidthChoice::Silverman => silverman_bandwidth(samples)?.t,
        BandwidthChoice::Oracle => {
            let info = target.info()?;
            match method {
                EstimatorMethod::Linked | EstimatorMethod::LinkedEstimatedR => {
                    oracle_amise_bandwidth(samples.len(), &info)?.t
                }
                _ => cosine_oracle_bandwidth(samples.len(), &info)?.t,
            }
        }
        BandwidthChoice::Lscv => match method {
            EstimatorMethod::Linked | EstimatorMethod::LinkedEstimatedR => {
                lscv_bandwidth(samples, r, &log_time_grid(1e-4, 1.0, 30)?)?.t
            }
            _ => {
                return Err(Error::Unsupported(
                    "cross-validation is implemented for the linked estimator only".into(),
                ))
            }
        },
    })
}

fn estimate_with(
    method: EstimatorMethod,
    samples: &SampleSet,
    r: BoundaryRatio,
    t: DiffusionTime,
    grid: &EvaluationGrid,
    ctl: &SummationControl,
) -> Result<GridDensity> {
    Ok(match method {
        EstimatorMethod::Linked | EstimatorMethod::LinkedEstimatedR => {
            series_estimate(samples, r, t, grid, ctl)?
        }
        EstimatorMethod::Cosine => cosine_kde(samples, t, grid, ctl),
        EstimatorMethod::Gaussian => gaussian_kde_baseline(samples, t, grid),
    })
}

/// Mean ISE, L2 and Linf over `reps` replicates for every `n`. Replicate `i`
/// uses seed `seed + i`.
pub fn run_mise_experiment(
    target: &SyntheticTarget,
    method: EstimatorMethod,
    ns: &[usize],
    reps: usize,
    choice: BandwidthChoice,
    seed: u64,
) -> Result<Vec<MiseRow>> {
    if reps == 0 {
        return Err(Error::InvalidParameter(
            "need at least one replicate".into(),
        ));
    }
    ns.iter()
        .map(|&n| {
            let runs = (0..reps)
                .into_par_iter()
                .map(|i| run_replicate(target, method, n, choice, seed + i as u64))
                .collect::<Result<Vec<_>>>()?;
            let k = reps as f64;
            Ok(MiseRow {
                n,
                method,
                reps,
                mean_t: runs.iter().map(|(t, _)| t.get()).sum::<f64>() / k,
                mean_ise: runs.iter().map(|(_, e)| e.ise()).sum::<f64>() / k,
                mean_l2: runs.iter().map(|(_, e)| e.l2).sum::<f64>() / k,
                mean_linf: runs.iter().map(|(_, e)| e.linf).sum::<f64>() / k,
            })
        })
        .collect()
}

pub fn write_mise_csv<W: Write>(rows: &[MiseRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "n,method,reps,mean_t,mean_ise,mean_l2,mean_linf")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.n, r.method, r.reps, r.mean_t, r.mean_ise, r.mean_l2, r.mean_linf
        )?;
    }
    Ok(())
}

const BIAS_QUADRATURE_POINTS: usize = 4001;

/// `E f(x, t) = int K(r; x, y, t) f_X(y) dy` by the trapezoid rule.
pub fn expected_linked_estimate(
    target: &SyntheticTarget,
    r: BoundaryRatio,
    t: DiffusionTime,
    x: f64,
    ctl: &SummationControl,
) -> Result<f64> {
    expected_with(target, |y| eval_linked_kernel(r, x, y, t, ctl))
}

/// Expected reflecting-boundary estimate at `x`.
pub fn expected_cosine_estimate(
    target: &SyntheticTarget,
    t: DiffusionTime,
    x: f64,
    ctl: &SummationControl,
) -> Result<f64> {
    expected_with(target, |y| cosine_kernel(x, y, t, ctl))
}

fn expected_with(target: &SyntheticTarget, kernel: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut failure = None;
    let v = trapezoid_fn(
        |y| match kernel(y) {
            Ok(k) => k * target.density(y),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        1.0,
        BIAS_QUADRATURE_POINTS,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}
