//! Validated value types shared by every estimator.

use crate::error::{Error, Result};
use crate::quadrature::trapezoid;

/// Diffusion time `t`, the square of the kernel bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DiffusionTime(f64);

impl DiffusionTime {
    pub fn new(t: f64) -> Result<Self> {
        if t.is_finite() && t > 0.0 {
            Ok(Self(t))
        } else {
            Err(Error::InvalidParameter(format!(
                "diffusion time must be positive and finite, got {t}"
            )))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// The equivalent Gaussian bandwidth `sqrt(t)`.
    pub fn bandwidth(self) -> f64 {
        self.0.sqrt()
    }
}

/// The ratio `r` in the linked boundary condition `f(0) = r f(1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BoundaryRatio(f64);

impl BoundaryRatio {
    pub const PERIODIC: BoundaryRatio = BoundaryRatio(1.0);

    pub fn new(r: f64) -> Result<Self> {
        if r.is_finite() && r >= 0.0 {
            Ok(Self(r))
        } else {
            Err(Error::InvalidParameter(format!(
                "boundary ratio must be finite and non-negative, got {r}"
            )))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `(1 - r) / (1 + r)`, the weight of every non-periodic correction term.
    #[inline]
    pub fn contrast(self) -> f64 {
        (1.0 - self.0) / (1.0 + self.0)
    }

    pub fn is_periodic(self) -> bool {
        self.0 == 1.0
    }

    /// `max{2r/(1+r), 2/(1+r)}`, the amplification bound of the linked
    /// diffusion in the maximum norm.
    pub fn max_amplification(self) -> f64 {
        let r = self.0;
        (2.0 * r / (1.0 + r)).max(2.0 / (1.0 + r))
    }

    /// `min{2r/(1+r), 2/(1+r)}`.
    pub fn min_amplification(self) -> f64 {
        let r = self.0;
        (2.0 * r / (1.0 + r)).min(2.0 / (1.0 + r))
    }
}

/// An i.i.d. sample on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("sample set is empty".into()));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && (0.0..=1.0).contains(*v)))
        {
            return Err(Error::InvalidInput(format!(
                "sample {i} = {v} lies outside [0, 1]"
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// True when every observation has the same value.
    pub fn is_constant(&self) -> bool {
        let first = self.values[0];
        self.values.iter().all(|&v| v == first)
    }
}

/// Strictly increasing evaluation points inside `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationGrid {
    points: Vec<f64>,
    spacing: Option<f64>,
}

impl EvaluationGrid {
    /// The default grid `l * 1e-3`, `l = 0..=1000`.
    pub const DEFAULT_COUNT: usize = 1001;

    /// `count` equally spaced points spanning `[0, 1]`.
    pub fn uniform(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidParameter(format!(
                "a uniform grid needs at least 2 points, got {count}"
            )));
        }
        let last = (count - 1) as f64;
        let points = (0..count).map(|l| l as f64 / last).collect();
        Ok(Self {
            points,
            spacing: Some(1.0 / last),
        })
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("evaluation grid is empty".into()));
        }
        if points
            .iter()
            .any(|p| !(p.is_finite() && (0.0..=1.0).contains(p)))
        {
            return Err(Error::InvalidInput("grid points must lie in [0, 1]".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "grid points must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            points,
            spacing: None,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> Option<f64> {
        self.spacing
    }

    /// True when the first point is 0 and the last is 1.
    pub fn spans_unit_interval(&self) -> bool {
        self.points[0] == 0.0 && *self.points.last().unwrap() == 1.0
    }
}

impl Default for EvaluationGrid {
    fn default() -> Self {
        Self::uniform(Self::DEFAULT_COUNT).expect("default grid is valid")
    }
}

/// Density values on an evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    pub grid: EvaluationGrid,
    pub values: Vec<f64>,
    /// `None` for estimators that ignore the linked boundary condition.
    pub r: Option<BoundaryRatio>,
    pub t: DiffusionTime,
}

impl GridDensity {
    /// Composite trapezoid integral over the grid.
    pub fn mass(&self) -> f64 {
        trapezoid(self.grid.points(), &self.values)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `f(x_first) - r f(x_last)`; zero for a linked estimate on a grid that
    /// spans `[0, 1]`.
    pub fn boundary_residual(&self) -> Option<f64> {
        let r = self.r?;
        Some(self.values[0] - r.get() * self.values[self.values.len() - 1])
    }
}
