//! Eigenfunction series for the linked diffusion with arbitrary initial data.
//!
//! ```text
//! f(x, t) = 2/(1+r) c(0) phi_0(x)
//!         + sum_n 4 e^{-k_n^2 t/2} / (1+r) { c(k_n) phi_n(x) - k_n t (1-r) c(k_n) sin(k_n x)
//!                                           + [s(k_n) - (1-r) s1(k_n)] sin(k_n x) },
//! phi_n(x) = (r + (1-r) x) cos(k_n x),   k_n = 2 pi n,
//! ```
//!
//! where `c`, `s` and `s1` are the cosine, sine and `x`-weighted sine
//! transforms of the initial data on `[0, 1]`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heat_kernels::SummationControl;
use crate::types::{BoundaryRatio, DiffusionTime, EvaluationGrid, GridDensity, SampleSet};

/// Bound on the bracketed coefficient of each mode for probability data,
/// before the `(1 + k t)` factor.
pub const COEFFICIENT_ENVELOPE: f64 = 12.0;

/// Source of the transforms `(c(k_n), s(k_n), s1(k_n))` of some initial data.
pub trait CoefficientSupplier {
    fn transforms(&self, n: usize) -> (f64, f64, f64);
}

/// Transforms at `k_n = 2 pi n`, `n = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalTransforms {
    pub modes: Vec<f64>,
    pub c0: Vec<f64>,
    pub s0: Vec<f64>,
    pub s1: Vec<f64>,
    /// Zero when the transforms came from a closed-form supplier.
    pub n_samples: usize,
}

impl EmpiricalTransforms {
    /// Index of the last mode, `N`.
    pub fn max_mode(&self) -> usize {
        self.modes.len() - 1
    }

    /// Tabulate `supplier` for `n = 0..=max_mode`.
    pub fn from_supplier(supplier: &impl CoefficientSupplier, max_mode: usize) -> Self {
        let mut out = Self::with_capacity(max_mode);
        for n in 0..=max_mode {
            let (c, s, s1) = supplier.transforms(n);
            out.modes.push(wavenumber(n));
            out.c0.push(c);
            out.s0.push(s);
            out.s1.push(s1);
        }
        out
    }

    fn with_capacity(max_mode: usize) -> Self {
        Self {
            modes: Vec::with_capacity(max_mode + 1),
            c0: Vec::with_capacity(max_mode + 1),
            s0: Vec::with_capacity(max_mode + 1),
            s1: Vec::with_capacity(max_mode + 1),
            n_samples: 0,
        }
    }
}

#[inline]
fn wavenumber(n: usize) -> f64 {
    2.0 * PI * n as f64
}

/// Transforms of the empirical measure of `samples`.
pub fn empirical_transforms(samples: &SampleSet, max_mode: usize) -> EmpiricalTransforms {
    let inv = 1.0 / samples.len() as f64;
    let mut out = EmpiricalTransforms::with_capacity(max_mode);
    for n in 0..=max_mode {
        let k = wavenumber(n);
        let (mut c, mut s, mut s1) = (0.0, 0.0, 0.0);
        for &x in samples.values() {
            let (sn, cs) = (k * x).sin_cos();
            c += cs;
            s += sn;
            s1 += x * sn;
        }
        out.modes.push(k);
        out.c0.push(c * inv);
        out.s0.push(s * inv);
        out.s1.push(s1 * inv);
    }
    out.n_samples = samples.len();
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    pub r: BoundaryRatio,
    pub truncation: SummationControl,
}

impl SeriesConfig {
    pub fn new(r: BoundaryRatio) -> Self {
        Self {
            r,
            truncation: SummationControl::default(),
        }
    }
}

/// Smallest `N >= 1` with `C (1 + k_N t) exp(-k_N^2 t / 2) < tol`.
pub fn truncation_bound(t: DiffusionTime, tol: f64) -> usize {
    let t = t.get();
    // Any mode below k_min fails the test on the exponential factor alone.
    let k_min = (2.0 * (COEFFICIENT_ENVELOPE / tol).ln().max(0.0) / t).sqrt();
    let start = (k_min / wavenumber(1)).floor();
    if start >= 1e15 {
        return start as usize;
    }
    let mut n = (start as usize).max(1);
    loop {
        let k = wavenumber(n);
        if COEFFICIENT_ENVELOPE * (1.0 + k * t) * (-0.5 * k * k * t).exp() < tol {
            return n;
        }
        n += 1;
    }
}

/// Per-mode weights so that the series reads
/// `a_0 phi_0(x) + sum_n a_n phi_n(x) + b_n sin(k_n x)`.
struct ModeWeights {
    r: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl ModeWeights {
    fn new(tr: &EmpiricalTransforms, cfg: &SeriesConfig, t: DiffusionTime) -> Result<Self> {
        let tv = t.get();
        let needed = truncation_bound(t, cfg.truncation.tol());
        if needed > cfg.truncation.max_terms() {
            return Err(Error::TruncationFailure {
                tol: cfg.truncation.tol(),
                max_terms: cfg.truncation.max_terms(),
            });
        }
        if tr.max_mode() < needed {
            return Err(Error::TruncationFailure {
                tol: cfg.truncation.tol(),
                max_terms: tr.max_mode(),
            });
        }
        let r = cfg.r.get();
        let q = 1.0 - r;
        let mut a = Vec::with_capacity(needed + 1);
        let mut b = Vec::with_capacity(needed + 1);
        a.push(2.0 / (1.0 + r) * tr.c0[0]);
        b.push(0.0);
        for n in 1..=needed {
            let k = tr.modes[n];
            let w = 4.0 * (-0.5 * k * k * tv).exp() / (1.0 + r);
            a.push(w * tr.c0[n]);
            b.push(w * (tr.s0[n] - q * tr.s1[n] - k * tv * q * tr.c0[n]));
        }
        Ok(Self { r, a, b })
    }

    fn eval(&self, x: f64) -> f64 {
        let envelope = self.r + (1.0 - self.r) * x;
        let mut cos_part = self.a[0];
        let mut sin_part = 0.0;
        for n in 1..self.a.len() {
            let (s, c) = (wavenumber(n) * x).sin_cos();
            cos_part += self.a[n] * c;
            sin_part += self.b[n] * s;
        }
        envelope * cos_part + sin_part
    }
}

/// The truncated series at one point.
pub fn eval_series_solution(
    tr: &EmpiricalTransforms,
    cfg: &SeriesConfig,
    t: DiffusionTime,
    x: f64,
) -> Result<f64> {
    if !(x.is_finite() && (0.0..=1.0).contains(&x)) {
        return Err(Error::InvalidParameter(format!(
            "x = {x} must lie in [0, 1]"
        )));
    }
    Ok(ModeWeights::new(tr, cfg, t)?.eval(x))
}

/// The truncated series on every grid point.
pub fn eval_series_grid(
    tr: &EmpiricalTransforms,
    cfg: &SeriesConfig,
    t: DiffusionTime,
    grid: &EvaluationGrid,
) -> Result<GridDensity> {
    let w = ModeWeights::new(tr, cfg, t)?;
    let values = grid.points().par_iter().map(|&x| w.eval(x)).collect();
    Ok(GridDensity {
        grid: grid.clone(),
        values,
        r: Some(cfg.r),
        t,
    })
}

/// Linked estimate of `samples` computed through the series, with exactly
/// as many modes as the truncation bound asks for.
pub fn series_estimate(
    samples: &SampleSet,
    r: BoundaryRatio,
    t: DiffusionTime,
    grid: &EvaluationGrid,
    ctl: &SummationControl,
) -> Result<GridDensity> {
    let cfg = SeriesConfig {
        r,
        truncation: *ctl,
    };
    let needed = truncation_bound(t, ctl.tol());
    if needed > ctl.max_terms() {
        return Err(Error::TruncationFailure {
            tol: ctl.tol(),
            max_terms: ctl.max_terms(),
        });
    }
    let tr = empirical_transforms(samples, needed);
    eval_series_grid(&tr, &cfg, t, grid)
}
