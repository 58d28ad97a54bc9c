use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::Result;
use crate::heat_kernels::{eval_k1, SummationControl};
use crate::types::{DiffusionTime, EvaluationGrid, GridDensity, SampleSet};

/// Plain Gaussian KDE with variance `t`; mass leaks across both ends.
pub fn gaussian_kde_baseline(
    samples: &SampleSet,
    t: DiffusionTime,
    grid: &EvaluationGrid,
) -> GridDensity {
    let h = t.bandwidth();
    let norm = 1.0 / (samples.len() as f64 * h * (2.0 * PI).sqrt());
    let values = grid
        .points()
        .par_iter()
        .map(|&x| {
            norm * samples
                .values()
                .iter()
                .map(|&y| (-0.5 * ((x - y) / h).powi(2)).exp())
                .sum::<f64>()
        })
        .collect();
    GridDensity {
        grid: grid.clone(),
        values,
        r: None,
        t,
    }
}

/// Reflecting-boundary estimate `a_0 + 2 sum_k e^{-k^2 pi^2 t/2} a_k cos(k pi x)`
/// with `a_k` the empirical mean of `cos(k pi X)`.
pub fn cosine_kde(
    samples: &SampleSet,
    t: DiffusionTime,
    grid: &EvaluationGrid,
    ctl: &SummationControl,
) -> GridDensity {
    let tv = t.get();
    let inv = 1.0 / samples.len() as f64;
    let mut weights = Vec::new();
    let mut k = 1usize;
    loop {
        let decay = (-0.5 * (k as f64 * PI).powi(2) * tv).exp();
        if 2.0 * decay < ctl.tol() || k > ctl.max_terms() {
            break;
        }
        let a: f64 = samples
            .values()
            .iter()
            .map(|&y| (k as f64 * PI * y).cos())
            .sum::<f64>()
            * inv;
        weights.push(2.0 * decay * a);
        k += 1;
    }
    let values = grid
        .points()
        .par_iter()
        .map(|&x| {
            1.0 + weights
                .iter()
                .enumerate()
                .map(|(i, w)| w * ((i + 1) as f64 * PI * x).cos())
                .sum::<f64>()
        })
        .collect();
    GridDensity {
        grid: grid.clone(),
        values,
        r: None,
        t,
    }
}

/// Neumann heat kernel on `[0, 1]` by the method of images,
/// `(K1((x-y)/2, t/4) + K1((x+y)/2, t/4)) / 2`.
pub fn cosine_kernel(x: f64, y: f64, t: DiffusionTime, ctl: &SummationControl) -> Result<f64> {
    let quarter = DiffusionTime::new(t.get() / 4.0)?;
    Ok(0.5 * (eval_k1(0.5 * (x - y), quarter, ctl)? + eval_k1(0.5 * (x + y), quarter, ctl)?))
}
