//! The linked-boundary kernel `K(r; x, y, t)` and the kernel density estimate
//! `f(x, t) = (1/n) sum_k K(r; x, X_k, t)`.
//!
//! The kernel is assembled from the periodic kernel and its derivative:
//!
//! ```text
//! K = K1(x-y) [1 + (x-y) c] + K1(x+y) (x+y-1) c + t c [K1'(x+y) + K1'(x-y)],
//! c = (1 - r) / (1 + r).
//! ```
//!
//! For `r = 1` it collapses to the periodic kernel `K1(x - y)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heat_kernels::{eval_k1, eval_k1_pair, SummationControl};
use crate::types::{BoundaryRatio, DiffusionTime, EvaluationGrid, GridDensity, SampleSet};

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} = {v} must lie in [0, 1]"
        )))
    }
}

pub fn eval_linked_kernel(
    r: BoundaryRatio,
    x: f64,
    y: f64,
    t: DiffusionTime,
    ctl: &SummationControl,
) -> Result<f64> {
    check_unit("x", x)?;
    check_unit("y", y)?;
    kernel_unchecked(r, x, y, t, ctl)
}

#[inline]
fn kernel_unchecked(
    r: BoundaryRatio,
    x: f64,
    y: f64,
    t: DiffusionTime,
    ctl: &SummationControl,
) -> Result<f64> {
    if r.is_periodic() {
        return eval_k1(x - y, t, ctl);
    }
    let c = r.contrast();
    let (diff, diff_dx) = eval_k1_pair(x - y, t, ctl)?;
    let (sum, sum_dx) = eval_k1_pair(x + y, t, ctl)?;
    Ok(diff * (1.0 + (x - y) * c) + sum * (x + y - 1.0) * c + t.get() * c * (sum_dx + diff_dx))
}

/// Kernel density estimate with the linked boundary condition, evaluated on
/// `grid` by direct summation over the samples.
pub fn estimate_density(
    samples: &SampleSet,
    r: BoundaryRatio,
    t: DiffusionTime,
    grid: &EvaluationGrid,
    ctl: &SummationControl,
) -> Result<GridDensity> {
    let n = samples.len() as f64;
    let values = grid
        .points()
        .par_iter()
        .map(|&x| {
            samples
                .values()
                .iter()
                .try_fold(0.0, |acc, &y| {
                    Ok::<_, Error>(acc + kernel_unchecked(r, x, y, t, ctl)?)
                })
                .map(|s| s / n)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridDensity {
        grid: grid.clone(),
        values,
        r: Some(r),
        t,
    })
}

/// An affine density `intercept + slope * x` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineDensity {
    pub intercept: f64,
    pub slope: f64,
}

impl AffineDensity {
    pub fn eval(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    pub fn mass(&self) -> f64 {
        self.intercept + 0.5 * self.slope
    }
}

/// The large-time limit `mass * 2/(1+r) * (r + (1-r) x)`: the only affine
/// profile with the requested mass that satisfies both linked conditions.
pub fn stationary_density(r: BoundaryRatio, mass: f64) -> AffineDensity {
    let r = r.get();
    let scale = 2.0 * mass / (1.0 + r);
    AffineDensity {
        intercept: scale * r,
        slope: scale * (1.0 - r),
    }
}
