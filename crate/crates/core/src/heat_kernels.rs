//! The periodic heat kernel
//!
//! ```text
//! K1(x, t) = sum_n exp(i k_n x - k_n^2 t / 2),   k_n = 2 pi n,
//! ```
//!
//! and its spatial derivative. Two dual forms of the same theta function are
//! available: the Fourier cosine series, which converges fast for large `t`,
//! and the periodised Gaussian `(2 pi t)^(-1/2) sum_n exp(-(x - n)^2 / (2t))`,
//! which converges fast for small `t`. [`eval_k1`] picks the cheaper one.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::types::DiffusionTime;

/// Below this time the Gaussian-image form is used, at or above it the
/// Fourier form.
pub const T_SWITCH: f64 = 1.0 / (2.0 * PI);

/// Absolute tail tolerance and term cap for the kernel series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummationControl {
    tol: f64,
    max_terms: usize,
}

impl SummationControl {
    pub const DEFAULT_TOL: f64 = 1e-14;
    pub const DEFAULT_MAX_TERMS: usize = 10_000;

    pub fn new(tol: f64, max_terms: usize) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "summation tolerance must lie in (0, 1), got {tol}"
            )));
        }
        if max_terms == 0 {
            return Err(Error::InvalidParameter(
                "max_terms must be at least 1".into(),
            ));
        }
        Ok(Self { tol, max_terms })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for SummationControl {
    fn default() -> Self {
        Self {
            tol: Self::DEFAULT_TOL,
            max_terms: Self::DEFAULT_MAX_TERMS,
        }
    }
}

/// Which of the two dual representations to sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelForm {
    Fourier,
    GaussianImages,
}

impl KernelForm {
    pub fn for_time(t: DiffusionTime) -> Self {
        if t.get() < T_SWITCH {
            KernelForm::GaussianImages
        } else {
            KernelForm::Fourier
        }
    }
}

/// `K1` and `dK1/dx` at one point, with the bookkeeping of the sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    pub value: f64,
    pub dx: f64,
    pub form: KernelForm,
    /// Number of Fourier modes, or images per side, that were added.
    pub terms: usize,
}

/// `K1(x, t)` using the form selected by [`T_SWITCH`].
pub fn eval_k1(x: f64, t: DiffusionTime, ctl: &SummationControl) -> Result<f64> {
    Ok(eval_k1_detailed(x, t, ctl, KernelForm::for_time(t), false)?.value)
}

/// `dK1/dx (x, t)` by termwise differentiation of the active form.
pub fn eval_k1_dx(x: f64, t: DiffusionTime, ctl: &SummationControl) -> Result<f64> {
    Ok(eval_k1_detailed(x, t, ctl, KernelForm::for_time(t), true)?.dx)
}

/// `(K1, dK1/dx)` from a single pass over the shared exponentials.
pub fn eval_k1_pair(x: f64, t: DiffusionTime, ctl: &SummationControl) -> Result<(f64, f64)> {
    let e = eval_k1_detailed(x, t, ctl, KernelForm::for_time(t), true)?;
    Ok((e.value, e.dx))
}

/// Sum a specific form. With `with_dx = false` the truncation only tracks the
/// value series and `dx` is a partial sum.
pub fn eval_k1_detailed(
    x: f64,
    t: DiffusionTime,
    ctl: &SummationControl,
    form: KernelForm,
    with_dx: bool,
) -> Result<KernelEval> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "kernel argument {x} is not finite"
        )));
    }
    // Both forms are 1-periodic; reduce to [-1/2, 1/2].
    let x = x - x.round();
    match form {
        KernelForm::Fourier => fourier_sum(x, t.get(), ctl, with_dx),
        KernelForm::GaussianImages => image_sum(x, t.get(), ctl, with_dx),
    }
}

fn fourier_sum(x: f64, t: f64, ctl: &SummationControl, with_dx: bool) -> Result<KernelEval> {
    let decay = 2.0 * PI * PI * t;
    let mut value = 1.0;
    let mut dx = 0.0;
    let mut n = 1usize;
    loop {
        let nf = n as f64;
        let a = (-decay * nf * nf).exp();
        // Value terms are bounded by 2a, derivative terms by 4 pi n a; both
        // envelopes are unimodal in n, so the first one below tol ends the sum.
        let bound = if with_dx {
            (2.0 * a).max(4.0 * PI * nf * a)
        } else {
            2.0 * a
        };
        if bound < ctl.tol {
            break;
        }
        if n > ctl.max_terms {
            return Err(Error::TruncationFailure {
                tol: ctl.tol,
                max_terms: ctl.max_terms,
            });
        }
        let (s, c) = (2.0 * PI * nf * x).sin_cos();
        value += 2.0 * a * c;
        dx -= 4.0 * PI * nf * a * s;
        n += 1;
    }
    Ok(KernelEval {
        value,
        dx,
        form: KernelForm::Fourier,
        terms: n - 1,
    })
}

fn image_sum(x: f64, t: f64, ctl: &SummationControl, with_dx: bool) -> Result<KernelEval> {
    let norm = 1.0 / (2.0 * PI * t).sqrt();
    let two_t = 2.0 * t;
    let g0 = (-x * x / two_t).exp();
    let mut value = g0;
    let mut dx = -x / t * g0;
    let mut j = 1usize;
    loop {
        let jf = j as f64;
        // With |x| <= 1/2 both images at distance j are at least j - 1/2 away.
        let env = (-(jf - 0.5).powi(2) / two_t).exp();
        let bound = if with_dx {
            2.0 * norm * env * (1.0f64).max((jf + 0.5) / t)
        } else {
            2.0 * norm * env
        };
        if bound < ctl.tol {
            break;
        }
        if j > ctl.max_terms {
            return Err(Error::TruncationFailure {
                tol: ctl.tol,
                max_terms: ctl.max_terms,
            });
        }
        let (dl, dr) = (x - jf, x + jf);
        let (gl, gr) = ((-dl * dl / two_t).exp(), (-dr * dr / two_t).exp());
        value += gl + gr;
        dx -= (dl * gl + dr * gr) / t;
        j += 1;
    }
    Ok(KernelEval {
        value: norm * value,
        dx: norm * dx,
        form: KernelForm::GaussianImages,
        terms: j - 1,
    })
}
