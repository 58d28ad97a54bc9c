use crate::error::{Error, Result};
use crate::quadrature::trapezoid;
use crate::types::{EvaluationGrid, GridDensity};

/// Distances between an estimate and the true density on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub l2: f64,
    pub linf: f64,
    pub grid: EvaluationGrid,
    pub n: usize,
    pub method: String,
    pub seed: u64,
}

impl ErrorReport {
    /// Integrated squared error, `l2^2`.
    pub fn ise(&self) -> f64 {
        self.l2 * self.l2
    }
}

/// `l2` by the trapezoid rule and `linf` over grid points. `n`, `method` and
/// `seed` are left empty for the caller to fill in.
pub fn error_metrics(estimate: &GridDensity, truth: &[f64]) -> Result<ErrorReport> {
    if truth.len() != estimate.values.len() {
        return Err(Error::InvalidInput(format!(
            "estimate has {} grid values, truth has {}",
            estimate.values.len(),
            truth.len()
        )));
    }
    let sq: Vec<f64> = estimate
        .values
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b) * (a - b))
        .collect();
    let linf = estimate
        .values
        .iter()
        .zip(truth)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(ErrorReport {
        l2: trapezoid(estimate.grid.points(), &sq).sqrt(),
        linf,
        grid: estimate.grid.clone(),
        n: 0,
        method: String::new(),
        seed: 0,
    })
}

/// Least-squares slope of `log(error)` against `log(n)`.
pub fn rate_fit(ns: &[usize], errors: &[f64]) -> Result<f64> {
    if ns.len() != errors.len() || ns.len() < 2 {
        return Err(Error::InvalidInput(
            "rate fit needs two equally long lists with at least 2 points".into(),
        ));
    }
    if ns.contains(&0) || errors.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidInput(
            "rate fit needs positive sizes and errors".into(),
        ));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput(
            "rate fit needs at least two distinct sizes".into(),
        ));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::DiffusionTime;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn density(values: Vec<f64>) -> GridDensity {
        GridDensity {
            grid: EvaluationGrid::uniform(values.len()).unwrap(),
            values,
            r: None,
            t: DiffusionTime::new(0.1).unwrap(),
        }
    }

    #[test]
    fn metric_examples() {
        let truth: Vec<f64> = (0..1001).map(|i| 1.0 + i as f64 * 1e-3).collect();
        let same = error_metrics(&density(truth.clone()), &truth).unwrap();
        assert_eq!((same.l2, same.linf), (0.0, 0.0));

        let shifted =
            error_metrics(&density(truth.iter().map(|v| v + 0.25).collect()), &truth).unwrap();
        assert!((shifted.l2 - 0.25).abs() < 1e-14 && (shifted.linf - 0.25).abs() < 1e-14);

        let g = EvaluationGrid::default();
        let sine: Vec<f64> = g.points().iter().map(|x| (2.0 * PI * x).sin()).collect();
        let rep = error_metrics(&density(sine), &vec![0.0; 1001]).unwrap();
        assert!((rep.l2 - 0.5f64.sqrt()).abs() < 1e-6);
        assert!((rep.ise() - 0.5).abs() < 1e-6);

        assert!(error_metrics(&density(vec![0.0; 5]), &[0.0; 4]).is_err());
    }

    #[test]
    fn rate_fit_examples() {
        assert!((rate_fit(&[100, 1000], &[1e-2, 1e-3]).unwrap() + 1.0).abs() < 1e-12);
        assert!(rate_fit(&[10, 100, 1000], &[0.3, 0.3, 0.3]).unwrap().abs() < 1e-12);
        assert!(rate_fit(&[10, 100], &[0.3, 0.0]).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ns = [100usize, 316, 1000, 3162, 10000];
        let errs: Vec<f64> = ns
            .iter()
            .map(|&n| {
                2.0 * (n as f64).powf(-0.8) * (1.0 + 0.01 * (2.0 * rng.random::<f64>() - 1.0))
            })
            .collect();
        let s = rate_fit(&ns, &errs).unwrap();
        assert!((-0.85..=-0.75).contains(&s), "slope {s}");
    }
}
