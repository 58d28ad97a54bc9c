use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::types::BoundaryRatio;

/// The four-corners matrix `A = T + w z^T`.
///
/// `T` is tridiagonal `(-1, 2, -1)`, `w = (-r/(r+1), 0, .., 0, -1/(r+1))` and
/// `z = e_1 + e_m`. Every column of `A` sums to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FourCornersMatrix {
    m: usize,
    r: BoundaryRatio,
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    w_first: f64,
    w_last: f64,
}

pub fn build_four_corners(m: usize, r: BoundaryRatio) -> Result<FourCornersMatrix> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 interior nodes, got {m}"
        )));
    }
    let rv = r.get();
    Ok(FourCornersMatrix {
        m,
        r,
        sub: vec![-1.0; m - 1],
        diag: vec![2.0; m],
        sup: vec![-1.0; m - 1],
        w_first: -rv / (rv + 1.0),
        w_last: -1.0 / (rv + 1.0),
    })
}

impl FourCornersMatrix {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> BoundaryRatio {
        self.r
    }

    /// Tridiagonal part as `(sub, diag, super)`.
    pub fn tridiagonal(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.sub, &self.diag, &self.sup)
    }

    /// The rank-one correction vector `w`; `z = e_1 + e_m`.
    pub fn corner_vector(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.m];
        w[0] = self.w_first;
        w[self.m - 1] += self.w_last;
        w
    }

    /// Entry `(i, j)` with zero-based indices.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let m = self.m;
        let mut v = if i == j {
            self.diag[i]
        } else if j + 1 == i {
            self.sub[j]
        } else if i + 1 == j {
            self.sup[i]
        } else {
            0.0
        };
        if j == 0 || j == m - 1 {
            if i == 0 {
                v += self.w_first;
            }
            if i == m - 1 {
                v += self.w_last;
            }
        }
        v
    }

    pub fn dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.m, |i, j| self.entry(i, j))
    }

    /// `A u` in `O(m)`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let m = self.m;
        assert_eq!(u.len(), m);
        let corner = u[0] + u[m - 1];
        let mut out: Vec<f64> = (0..m)
            .map(|i| {
                let mut v = self.diag[i] * u[i];
                if i > 0 {
                    v += self.sub[i - 1] * u[i - 1];
                }
                if i + 1 < m {
                    v += self.sup[i] * u[i + 1];
                }
                v
            })
            .collect();
        out[0] += self.w_first * corner;
        out[m - 1] += self.w_last * corner;
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.m).map(|i| self.entry(i, i)).sum()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.m)
            .map(|j| (0..self.m).map(|i| self.entry(i, j)).sum())
            .collect()
    }
}

/// Factorisation of `I + c A` for repeated `O(m)` solves: Thomas elimination
/// of `I + c T` followed by a Sherman-Morrison correction for `c w z^T`.
#[derive(Debug, Clone)]
pub struct ImplicitStep {
    c: f64,
    // Thomas factors of I + cT
    sup_prime: Vec<f64>,
    denom: Vec<f64>,
    sub: Vec<f64>,
    // (I + cT)^{-1} c w, and 1 + z^T of it
    correction: Vec<f64>,
    sm_denom: f64,
}

impl ImplicitStep {
    pub fn new(a: &FourCornersMatrix, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step scale must be positive, got {c}"
            )));
        }
        let m = a.m;
        let sub: Vec<f64> = a.sub.iter().map(|s| c * s).collect();
        let diag: Vec<f64> = a.diag.iter().map(|d| 1.0 + c * d).collect();
        let sup: Vec<f64> = a.sup.iter().map(|s| c * s).collect();
        let mut sup_prime = vec![0.0; m.saturating_sub(1)];
        let mut denom = vec![0.0; m];
        denom[0] = diag[0];
        for i in 1..m {
            sup_prime[i - 1] = sup[i - 1] / denom[i - 1];
            denom[i] = diag[i] - sub[i - 1] * sup_prime[i - 1];
        }
        let mut step = Self {
            c,
            sup_prime,
            denom,
            sub,
            correction: Vec::new(),
            sm_denom: 1.0,
        };
        let cw: Vec<f64> = a.corner_vector().iter().map(|w| c * w).collect();
        step.correction = step.thomas(&cw);
        step.sm_denom = 1.0 + step.correction[0] + step.correction[m - 1];
        if !(step.sm_denom.is_finite() && step.sm_denom.abs() > 1e-300) {
            return Err(Error::Internal(
                "corner-corrected system is singular".into(),
            ));
        }
        Ok(step)
    }

    pub fn scale(&self) -> f64 {
        self.c
    }

    fn thomas(&self, b: &[f64]) -> Vec<f64> {
        let m = self.denom.len();
        let mut y = vec![0.0; m];
        y[0] = b[0] / self.denom[0];
        for i in 1..m {
            y[i] = (b[i] - self.sub[i - 1] * y[i - 1]) / self.denom[i];
        }
        for i in (0..m - 1).rev() {
            y[i] -= self.sup_prime[i] * y[i + 1];
        }
        y
    }

    /// Solve `(I + c A) x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut y = self.thomas(b);
        let m = y.len();
        let alpha = (y[0] + y[m - 1]) / self.sm_denom;
        for (yi, ci) in y.iter_mut().zip(&self.correction) {
            *yi -= alpha * ci;
        }
        y
    }
}
