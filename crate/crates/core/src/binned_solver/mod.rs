//! Finite-difference version of the linked diffusion on `m` interior nodes
//! `x_j = j h`, `h = 1/(m+1)`, with ghost values at `x_0 = 0` and
//! `x_{m+1} = 1` tied to the interior by the boundary conditions.

mod evolve;
mod matrix;
mod spectral;

use std::io::Write;

pub use evolve::{
    backward_euler_evolve, matrix_exponential_evolve, ExponentialEvolution, ExponentialMethod,
};
pub use matrix::{build_four_corners, FourCornersMatrix, ImplicitStep};
pub use spectral::{spectral_data, stationary_vector, SpectralData};

use crate::error::{Error, Result};
use crate::types::{BoundaryRatio, SampleSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinnedGrid {
    m: usize,
    h: f64,
    dt: f64,
}

impl BinnedGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 interior nodes, got {m}"
            )));
        }
        let h = 1.0 / (m + 1) as f64;
        Ok(Self {
            m,
            h,
            dt: 2.0 * h * h,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// The natural step `2 h^2`, for which backward Euler solves `(I + A) u' = u`.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Position of node `j`, `0 <= j <= m + 1`.
    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.h
    }
}

/// `u_0 = r/(r+1) (u_1 + u_m)` and `u_{m+1} = 1/(r+1) (u_1 + u_m)`.
pub fn ghost_values(u1: f64, um: f64, r: BoundaryRatio) -> (f64, f64) {
    let rv = r.get();
    let right = (u1 + um) / (rv + 1.0);
    (rv * right, right)
}

/// Interior node values of a binned density; ghosts are derived on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedDensity {
    pub grid: BinnedGrid,
    pub interior: Vec<f64>,
    pub r: BoundaryRatio,
    /// Binned weight that fell on a boundary node and was moved inward.
    pub folded_mass: f64,
}

impl BinnedDensity {
    pub fn new(grid: BinnedGrid, interior: Vec<f64>, r: BoundaryRatio) -> Result<Self> {
        if interior.len() != grid.m() {
            return Err(Error::InvalidInput(format!(
                "expected {} interior values, got {}",
                grid.m(),
                interior.len()
            )));
        }
        Ok(Self {
            grid,
            interior,
            r,
            folded_mass: 0.0,
        })
    }

    pub fn ghosts(&self) -> (f64, f64) {
        ghost_values(self.interior[0], self.interior[self.grid.m() - 1], self.r)
    }

    /// All `m + 2` node values including both ghosts.
    pub fn nodes(&self) -> Vec<f64> {
        let (g0, g1) = self.ghosts();
        let mut out = Vec::with_capacity(self.grid.m() + 2);
        out.push(g0);
        out.extend_from_slice(&self.interior);
        out.push(g1);
        out
    }

    pub fn interior_sum(&self) -> f64 {
        self.interior.iter().sum()
    }

    /// Rows `node,x,value` for every node, ghosts included.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "node,x,value")?;
        for (j, v) in self.nodes().iter().enumerate() {
            writeln!(out, "{j},{:.16e},{v:.16e}", self.grid.node(j))?;
        }
        Ok(())
    }
}

/// Linear binning with weight `1/(n h)` per sample, so that interior values
/// approximate the density. Weight on node `0` moves to node `1` and weight on
/// node `m+1` to node `m`.
pub fn bin_samples(samples: &SampleSet, m: usize, r: BoundaryRatio) -> Result<BinnedDensity> {
    let grid = BinnedGrid::new(m)?;
    let weight = 1.0 / (samples.len() as f64 * grid.h());
    let mut nodes = vec![0.0; m + 2];
    for &x in samples.values() {
        let pos = x * (m + 1) as f64;
        let left = (pos.floor() as usize).min(m);
        let frac = pos - left as f64;
        nodes[left] += weight * (1.0 - frac);
        nodes[left + 1] += weight * frac;
    }
    let folded_mass = nodes[0] + nodes[m + 1];
    let mut interior = nodes[1..=m].to_vec();
    interior[0] += nodes[0];
    interior[m - 1] += nodes[m + 1];
    Ok(BinnedDensity {
        grid,
        interior,
        r,
        folded_mass,
    })
}
