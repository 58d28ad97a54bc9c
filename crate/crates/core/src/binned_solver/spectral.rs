use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::types::BoundaryRatio;

/// Closed-form eigenpairs of the four-corners matrix for `r != 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub m: usize,
    pub r: BoundaryRatio,
    pub angles: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: DMatrix<f64>,
    /// Index of the zero eigenvalue; its eigenvector is the stationary one.
    pub stationary_index: usize,
}

/// `w0_j = 1 + (1-r)/(1+rm) (j-1)`, `j = 1..=m`, in the kernel of `A`.
pub fn stationary_vector(m: usize, r: BoundaryRatio) -> Vec<f64> {
    let rv = r.get();
    let slope = (1.0 - rv) / (1.0 + rv * m as f64);
    (0..m).map(|j| 1.0 + slope * j as f64).collect()
}

/// Two families of angles: `2 pi k / m` for `1 <= k <= (m-1)/2` with
/// `v_j = r sin((j-1) theta) - sin(j theta)`, and `2 pi l / (m+1)` for the
/// remaining indices with `w_j = sin(j theta)`, where `l = 0` is the
/// stationary vector. Eigenvalues are `2 - 2 cos theta`.
pub fn spectral_data(m: usize, r: BoundaryRatio) -> Result<SpectralData> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 interior nodes, got {m}"
        )));
    }
    if r.is_periodic() {
        return Err(Error::Unsupported(
            "closed-form spectral data needs r != 1; use the symmetric path".into(),
        ));
    }
    let rv = r.get();
    let q = (m - 1) / 2;
    let mut angles = Vec::with_capacity(m);
    let mut vecs = DMatrix::zeros(m, m);
    let mut stationary_index = 0;
    for k in 1..=m {
        let col = k - 1;
        if k <= q {
            let theta = 2.0 * PI * k as f64 / m as f64;
            for j in 1..=m {
                let jf = j as f64;
                vecs[(j - 1, col)] = rv * ((jf - 1.0) * theta).sin() - (jf * theta).sin();
            }
            angles.push(theta);
        } else {
            let l = k - q - 1;
            let theta = 2.0 * PI * l as f64 / (m + 1) as f64;
            if l == 0 {
                stationary_index = col;
                for (j, v) in stationary_vector(m, r).into_iter().enumerate() {
                    vecs[(j, col)] = v;
                }
            } else {
                for j in 1..=m {
                    vecs[(j - 1, col)] = (j as f64 * theta).sin();
                }
            }
            angles.push(theta);
        }
        let norm = vecs.column(col).amax();
        vecs.column_mut(col).scale_mut(1.0 / norm);
    }
    let eigenvalues = angles.iter().map(|th| 2.0 - 2.0 * th.cos()).collect();
    Ok(SpectralData {
        m,
        r,
        angles,
        eigenvalues,
        eigenvectors: vecs,
        stationary_index,
    })
}

impl SpectralData {
    /// `max_k |A v_k - lambda_k v_k|_inf / |v_k|_inf` against the dense matrix.
    pub fn max_residual(&self, a: &DMatrix<f64>) -> f64 {
        (0..self.m)
            .map(|k| {
                let v = self.eigenvectors.column(k);
                (a * v - v * self.eigenvalues[k]).amax() / v.amax()
            })
            .fold(0.0, f64::max)
    }
}
