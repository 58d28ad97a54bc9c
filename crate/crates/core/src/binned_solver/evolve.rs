use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{build_four_corners, spectral_data, BinnedDensity, ImplicitStep};
use crate::error::{Error, Result};
use crate::types::DiffusionTime;

/// Eigenvector bases with a larger condition number are not trusted.
const MAX_BASIS_CONDITION: f64 = 1e10;

/// Backward Euler with step `2 h^2`, i.e. `u <- (I + A)^{-1} u`, where the last
/// step is shortened so that the total time is exactly `total`.
pub fn backward_euler_evolve(u: &BinnedDensity, total: DiffusionTime) -> Result<BinnedDensity> {
    let dt = u.grid.dt();
    let ratio = total.get() / dt;
    let steps = ((ratio - 1e-9).ceil() as usize).max(1);
    let full = steps - 1;
    let last = (total.get() - full as f64 * dt) / dt;

    let a = build_four_corners(u.grid.m(), u.r)?;
    let mut v = u.interior.clone();
    if full > 0 {
        let step = ImplicitStep::new(&a, 1.0)?;
        for _ in 0..full {
            v = step.solve(&v);
        }
    }
    v = ImplicitStep::new(&a, last)?.solve(&v);
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Internal(
            "backward Euler produced non-finite values".into(),
        ));
    }
    Ok(BinnedDensity {
        interior: v,
        ..u.clone()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentialMethod {
    /// Closed-form eigenvectors, `r != 1`.
    Spectral,
    /// Symmetric eigendecomposition, `r = 1`.
    SymmetricEigen,
    /// Dense Pade scaling and squaring, used when the eigenbasis is
    /// ill-conditioned.
    ScalingAndSquaring,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialEvolution {
    pub density: BinnedDensity,
    pub method: ExponentialMethod,
}

/// `u(t) = exp(-t/(2 h^2) A) u(0)`.
pub fn matrix_exponential_evolve(
    u: &BinnedDensity,
    t: DiffusionTime,
) -> Result<ExponentialEvolution> {
    let m = u.grid.m();
    let s = t.get() / u.grid.dt();
    let u0 = DVector::from_column_slice(&u.interior);
    let (v, method) = if u.r.is_periodic() {
        let a = build_four_corners(m, u.r)?.dense();
        let eig = SymmetricEigen::new(a);
        let q = &eig.eigenvectors;
        let mut coef = q.transpose() * &u0;
        for (c, l) in coef.iter_mut().zip(eig.eigenvalues.iter()) {
            *c *= (-s * l.max(0.0)).exp();
        }
        (q * coef, ExponentialMethod::SymmetricEigen)
    } else {
        let sd = spectral_data(m, u.r)?;
        let basis = &sd.eigenvectors;
        match basis.clone().try_inverse() {
            Some(inv) if condition_inf(basis, &inv) <= MAX_BASIS_CONDITION => {
                let mut coef = &inv * &u0;
                for (c, l) in coef.iter_mut().zip(&sd.eigenvalues) {
                    *c *= (-s * l.max(0.0)).exp();
                }
                (basis * coef, ExponentialMethod::Spectral)
            }
            _ => (
                dense_exponential(u, s)?,
                ExponentialMethod::ScalingAndSquaring,
            ),
        }
    };
    Ok(ExponentialEvolution {
        density: BinnedDensity {
            interior: v.iter().copied().collect(),
            ..u.clone()
        },
        method,
    })
}

fn condition_inf(a: &DMatrix<f64>, inv: &DMatrix<f64>) -> f64 {
    let norm = |m: &DMatrix<f64>| {
        m.row_iter()
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    norm(a) * norm(inv)
}

fn dense_exponential(u: &BinnedDensity, s: f64) -> Result<DVector<f64>> {
    let a = build_four_corners(u.grid.m(), u.r)?.dense();
    Ok((a * -s).exp() * DVector::from_column_slice(&u.interior))
}
