//! Choice of the diffusion time `t`: Silverman's rule, least-squares
//! cross-validation, the closed-form AMISE optima, and the plug-in estimate
//! of the boundary ratio `r`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heat_kernels::SummationControl;
use crate::linked_kernel::eval_linked_kernel;
use crate::quadrature::trapezoid;
use crate::series_solver::{
    empirical_transforms, eval_series_grid, truncation_bound, SeriesConfig,
};
use crate::types::{BoundaryRatio, DiffusionTime, EvaluationGrid, SampleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandwidthRule {
    Silverman,
    Lscv,
    OracleMatching,
    OracleNonmatching,
    Fixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthSelection {
    pub t: DiffusionTime,
    pub rule: BandwidthRule,
    /// `(t, objective)` pairs when the rule scanned a grid.
    pub diagnostics: Option<Vec<(f64, f64)>>,
}

impl BandwidthSelection {
    pub fn fixed(t: DiffusionTime) -> Self {
        Self {
            t,
            rule: BandwidthRule::Fixed,
            diagnostics: None,
        }
    }
}

/// Smoothness summary of a known target density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetDensityInfo {
    /// `int_0^1 f''(x)^2 dx`.
    pub f_second_norm_sq: f64,
    pub fprime0: f64,
    pub fprime1: f64,
    pub r_true: BoundaryRatio,
}

impl TargetDensityInfo {
    pub fn new(
        f_second_norm_sq: f64,
        fprime0: f64,
        fprime1: f64,
        r_true: BoundaryRatio,
    ) -> Result<Self> {
        if !(f_second_norm_sq.is_finite() && f_second_norm_sq >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "squared L2 norm of f'' must be non-negative, got {f_second_norm_sq}"
            )));
        }
        if !(fprime0.is_finite() && fprime1.is_finite()) {
            return Err(Error::InvalidParameter(
                "boundary derivatives must be finite".into(),
            ));
        }
        Ok(Self {
            f_second_norm_sq,
            fprime0,
            fprime1,
            r_true,
        })
    }

    /// `f'(1) - f'(0)`.
    pub fn fprime_gap(&self) -> f64 {
        self.fprime1 - self.fprime0
    }
}

/// `((4/(3n))^{1/5} sigma)^2` with `sigma = min(sd, IQR/1.34)`.
pub fn silverman_bandwidth(samples: &SampleSet) -> Result<BandwidthSelection> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "Silverman's rule needs at least 2 samples".into(),
        ));
    }
    if samples.is_constant() {
        return Err(Error::DegenerateSample("all samples are identical".into()));
    }
    let sd = sample_std(samples.values());
    let sorted = samples.sorted();
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    // A zero IQR with positive spread happens for heavily tied data.
    let sigma = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let h = (4.0 / (3.0 * n as f64)).powf(0.2) * sigma;
    Ok(BandwidthSelection {
        t: DiffusionTime::new(h * h)?,
        rule: BandwidthRule::Silverman,
        diagnostics: None,
    })
}

fn sample_std(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let ss: f64 = v.iter().map(|x| (x - mean).powi(2)).sum();
    (ss / (n - 1.0)).sqrt()
}

/// Inverse of the empirical distribution function.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let idx = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[idx - 1]
}

/// `int f^2 - (2/n) sum_i f_{-i}(X_i)` for each `t`, with the leave-one-out
/// values from `f_{-i}(X_i) = (n f(X_i) - K(X_i, X_i)) / (n - 1)`.
pub fn lscv_objective(
    samples: &SampleSet,
    r: BoundaryRatio,
    t_grid: &[DiffusionTime],
) -> Result<Vec<f64>> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::InvalidInput(
            "cross-validation needs at least 3 samples".into(),
        ));
    }
    if samples.is_constant() {
        return Err(Error::DegenerateSample("all samples are identical".into()));
    }
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("empty bandwidth grid".into()));
    }
    let ctl = SummationControl::default();
    let cfg = SeriesConfig { r, truncation: ctl };
    let t_min = t_grid.iter().map(|t| t.get()).fold(f64::INFINITY, f64::min);
    let modes = truncation_bound(DiffusionTime::new(t_min)?, ctl.tol());
    if modes > ctl.max_terms() {
        return Err(Error::TruncationFailure {
            tol: ctl.tol(),
            max_terms: ctl.max_terms(),
        });
    }
    let tr = empirical_transforms(samples, modes);
    let quad = EvaluationGrid::uniform(2001)?;
    let at_samples = EvaluationGrid::from_points(distinct_sorted(samples))?;
    let nf = n as f64;

    t_grid
        .par_iter()
        .map(|&t| {
            let f = eval_series_grid(&tr, &cfg, t, &quad)?;
            let sq: Vec<f64> = f.values.iter().map(|v| v * v).collect();
            let integral = trapezoid(quad.points(), &sq);
            let fx = eval_series_grid(&tr, &cfg, t, &at_samples)?;
            let mut loo = 0.0;
            for &x in samples.values() {
                let i = at_samples.points().partition_point(|&p| p < x);
                let k = eval_linked_kernel(r, x, x, t, &ctl)?;
                loo += (nf * fx.values[i] - k) / (nf - 1.0);
            }
            Ok(integral - 2.0 * loo / nf)
        })
        .collect()
}

fn distinct_sorted(samples: &SampleSet) -> Vec<f64> {
    let mut v = samples.sorted();
    v.dedup();
    v
}

/// Minimiser of [`lscv_objective`] over `t_grid`; ties go to the larger `t`.
pub fn lscv_bandwidth(
    samples: &SampleSet,
    r: BoundaryRatio,
    t_grid: &[DiffusionTime],
) -> Result<BandwidthSelection> {
    let values = lscv_objective(samples, r, t_grid)?;
    let mut best = 0;
    for i in 1..values.len() {
        let better = values[i] < values[best]
            || (values[i] == values[best] && t_grid[i].get() > t_grid[best].get());
        if better {
            best = i;
        }
    }
    Ok(BandwidthSelection {
        t: t_grid[best],
        rule: BandwidthRule::Lscv,
        diagnostics: Some(t_grid.iter().map(|t| t.get()).zip(values).collect()),
    })
}

/// `count` times spaced evenly in `log t` over `[lo, hi]`.
pub fn log_time_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<DiffusionTime>> {
    if !(lo > 0.0 && hi > lo && count >= 2) {
        return Err(Error::InvalidParameter(format!(
            "bad log grid [{lo}, {hi}] with {count} points"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| DiffusionTime::new((a + (b - a) * i as f64 / (count - 1) as f64).exp()))
        .collect()
}

/// `(4 - 2 sqrt 2)/sqrt(pi) (r^2 + 1)/(1 + r)^2`.
pub fn amise_constant_a(r: BoundaryRatio) -> f64 {
    let r = r.get();
    (4.0 - 2.0 * 2f64.sqrt()) / PI.sqrt() * (r * r + 1.0) / ((1.0 + r) * (1.0 + r))
}

/// AMISE-optimal `t` for the linked estimator.
pub fn oracle_amise_bandwidth(n: usize, info: &TargetDensityInfo) -> Result<BandwidthSelection> {
    optimum(
        n,
        info.f_second_norm_sq,
        amise_constant_a(info.r_true) * info.fprime_gap().powi(2),
    )
}

/// AMISE-optimal `t` for the reflecting (cosine) estimator, whose boundary
/// term involves `f'(0)^2 + f'(1)^2` instead of the gap.
pub fn cosine_oracle_bandwidth(n: usize, info: &TargetDensityInfo) -> Result<BandwidthSelection> {
    optimum(n, info.f_second_norm_sq, cosine_boundary_weight(info))
}

fn cosine_boundary_weight(info: &TargetDensityInfo) -> f64 {
    (4.0 - 2.0 * 2f64.sqrt()) / PI.sqrt() * (info.fprime0.powi(2) + info.fprime1.powi(2))
}

/// `boundary` is the coefficient `B` in the `t^{3/2} B / 3` bias term.
fn optimum(n: usize, f2: f64, boundary: f64) -> Result<BandwidthSelection> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "sample size must be positive".into(),
        ));
    }
    let c = 2.0 * n as f64 * PI.sqrt();
    let (t, rule) = if boundary == 0.0 {
        if f2 == 0.0 {
            return Err(Error::NoFiniteOptimum);
        }
        ((c * f2).powf(-0.4), BandwidthRule::OracleMatching)
    } else {
        ((c * boundary).powf(-0.5), BandwidthRule::OracleNonmatching)
    };
    Ok(BandwidthSelection {
        t: DiffusionTime::new(t)?,
        rule,
        diagnostics: None,
    })
}

/// Leading-order MISE of the linked estimator.
pub fn amise_value(t: DiffusionTime, n: usize, info: &TargetDensityInfo) -> f64 {
    amise(
        t.get(),
        n,
        info.f_second_norm_sq,
        amise_constant_a(info.r_true) * info.fprime_gap().powi(2),
    )
}

/// Leading-order MISE of the reflecting (cosine) estimator.
pub fn cosine_amise_value(t: DiffusionTime, n: usize, info: &TargetDensityInfo) -> f64 {
    amise(
        t.get(),
        n,
        info.f_second_norm_sq,
        cosine_boundary_weight(info),
    )
}

fn amise(t: f64, n: usize, f2: f64, boundary: f64) -> f64 {
    let variance = 1.0 / (2.0 * n as f64 * (PI * t).sqrt());
    if boundary == 0.0 {
        variance + t * t * f2 / 4.0
    } else {
        variance + t.powf(1.5) * boundary / 3.0
    }
}

/// `#{X < n^{-1/2}} / #{X > 1 - n^{-1/2}}`.
pub fn estimate_r(samples: &SampleSet) -> Result<BoundaryRatio> {
    let eps = 1.0 / (samples.len() as f64).sqrt();
    let left = samples.values().iter().filter(|&&x| x < eps).count();
    let right = samples.values().iter().filter(|&&x| x > 1.0 - eps).count();
    if right == 0 {
        return Err(Error::EstimationFailure { numerator: left });
    }
    BoundaryRatio::new(left as f64 / right as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(v: f64) -> BoundaryRatio {
        BoundaryRatio::new(v).unwrap()
    }

    fn t(v: f64) -> DiffusionTime {
        DiffusionTime::new(v).unwrap()
    }

    fn matching(f2: f64) -> TargetDensityInfo {
        TargetDensityInfo::new(f2, 0.0, 0.0, r(1.0)).unwrap()
    }

    #[test]
    fn silverman_two_points() {
        let s = silverman_bandwidth(&SampleSet::new(vec![0.0, 1.0]).unwrap()).unwrap();
        let sigma = 0.5f64.sqrt();
        let expect = ((4.0 / 6.0f64).powf(0.2) * sigma).powi(2);
        assert!((s.t.get() - expect).abs() < 1e-15);
        assert!((s.t.get() - 0.4251).abs() < 1e-4);
        assert_eq!(s.rule, BandwidthRule::Silverman);
    }

    #[test]
    fn silverman_degenerate_and_scaling() {
        let e = silverman_bandwidth(&SampleSet::new(vec![0.3; 5]).unwrap()).unwrap_err();
        assert!(matches!(e, Error::DegenerateSample(_)));
        // The floating-point mean of 0.4, 0.4, 0.4 is not exactly 0.4.
        let e = silverman_bandwidth(&SampleSet::new(vec![0.4; 3]).unwrap()).unwrap_err();
        assert!(matches!(e, Error::DegenerateSample(_)));
        // Tied data with zero IQR still has a spread.
        let mut v = vec![0.5; 20];
        v[0] = 0.1;
        assert!(silverman_bandwidth(&SampleSet::new(v).unwrap()).is_ok());
        // Replicating the data 32 times changes sigma^2 only by the
        // (n - 1) denominator, 9 -> 319.
        let base: Vec<f64> = (0..10).map(|i| 0.05 + 0.09 * i as f64).collect();
        let big: Vec<f64> = base.iter().cycle().take(320).copied().collect();
        let t1 = silverman_bandwidth(&SampleSet::new(base).unwrap())
            .unwrap()
            .t
            .get();
        let t2 = silverman_bandwidth(&SampleSet::new(big).unwrap())
            .unwrap()
            .t
            .get();
        let ratio = t2 / t1;
        let expect = 32f64.powf(-0.4) * (32.0 * 9.0 / 319.0);
        assert!((ratio / expect - 1.0).abs() < 1e-12, "ratio {ratio}");
    }

    #[test]
    fn oracle_examples() {
        let unit = 1.0 / (2.0 * PI.sqrt());
        assert!((oracle_amise_bandwidth(1, &matching(unit)).unwrap().t.get() - 1.0).abs() < 1e-15);

        let cos = oracle_amise_bandwidth(1000, &matching(2.0 * PI.powi(4))).unwrap();
        assert_eq!(cos.rule, BandwidthRule::OracleMatching);
        assert!((cos.t.get() - 4.615e-3).abs() < 5e-6);

        let info = TargetDensityInfo::new(144.0, 6.0, -6.0, r(1.0)).unwrap();
        let sel = oracle_amise_bandwidth(1000, &info).unwrap();
        assert_eq!(sel.rule, BandwidthRule::OracleNonmatching);
        assert!((sel.t.get() - 2.435e-3).abs() < 1e-6, "{}", sel.t.get());

        let flat = matching(0.0);
        assert_eq!(
            oracle_amise_bandwidth(10, &flat).unwrap_err(),
            Error::NoFiniteOptimum
        );
    }

    #[test]
    fn minimum_values() {
        let f2 = 2.0 * PI.powi(4);
        let info = matching(f2);
        let n = 1000;
        let ts = oracle_amise_bandwidth(n, &info).unwrap().t;
        let closed = 5.0 * f2.powf(0.2) / (2f64.powf(2.8) * PI.powf(0.4)) * (n as f64).powf(-0.8);
        let v = amise_value(ts, n, &info);
        assert!((v / closed - 1.0).abs() < 1e-12);
        assert!(amise_value(t(ts.get() * 1.01), n, &info) > v);
        assert!(amise_value(t(ts.get() * 0.99), n, &info) > v);
        assert!(amise_value(t(1e6), n, &info) > 1e9);

        let info = TargetDensityInfo::new(10.0, 0.5, 2.5, r(3.0)).unwrap();
        let ts = oracle_amise_bandwidth(n, &info).unwrap().t;
        let gap: f64 = 2.0;
        let closed = 2f64.powf(1.25) * gap.sqrt() / (3.0 * PI.powf(0.375))
            * amise_constant_a(r(3.0)).powf(0.25)
            * (n as f64).powf(-0.75);
        assert!((amise_value(ts, n, &info) / closed - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_oracle_uses_both_slopes() {
        let info = TargetDensityInfo::new(1.0, 1.0, 1.0, r(1.0)).unwrap();
        // Equal slopes: linked is in the matching regime, cosine is not.
        assert_eq!(
            oracle_amise_bandwidth(100, &info).unwrap().rule,
            BandwidthRule::OracleMatching
        );
        let c = cosine_oracle_bandwidth(100, &info).unwrap();
        assert_eq!(c.rule, BandwidthRule::OracleNonmatching);
        let v = cosine_amise_value(c.t, 100, &info);
        assert!(cosine_amise_value(t(c.t.get() * 1.05), 100, &info) > v);
        assert!(cosine_amise_value(t(c.t.get() / 1.05), 100, &info) > v);
    }

    #[test]
    fn estimate_r_counts() {
        let s = SampleSet::new(vec![0.05, 0.08, 0.5, 0.95]).unwrap();
        assert_eq!(estimate_r(&s).unwrap().get(), 2.0);
        let s = SampleSet::new(vec![0.05, 0.3, 0.4, 0.5]).unwrap();
        assert_eq!(
            estimate_r(&s).unwrap_err(),
            Error::EstimationFailure { numerator: 3 }
        );
        let sym: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).collect();
        assert_eq!(
            estimate_r(&SampleSet::new(sym).unwrap()).unwrap().get(),
            1.0
        );
    }

    #[test]
    fn lscv_single_point_grid_and_determinism() {
        let s = SampleSet::new(
            (0..40)
                .map(|i| ((i * 37) % 40) as f64 / 41.0 + 0.01)
                .collect(),
        )
        .unwrap();
        let one = lscv_bandwidth(&s, r(0.5), &[t(0.01)]).unwrap();
        assert_eq!(one.t.get(), 0.01);
        let grid = log_time_grid(1e-4, 1.0, 12).unwrap();
        let a = lscv_bandwidth(&s, r(0.5), &grid).unwrap();
        let b = lscv_bandwidth(&s, r(0.5), &grid).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.diagnostics.as_ref().unwrap().len(), 12);
        assert!(lscv_bandwidth(&SampleSet::new(vec![0.2; 4]).unwrap(), r(1.0), &grid).is_err());
    }

    #[test]
    fn lscv_matches_brute_force() {
        // Direct O(n^2) kernel sums on the same quadrature grid.
        let xs = vec![0.02, 0.1, 0.33, 0.34, 0.6, 0.91, 0.97];
        let s = SampleSet::new(xs.clone()).unwrap();
        let ctl = SummationControl::default();
        let rr = r(2.0);
        let tt = t(0.005);
        let n = xs.len() as f64;
        let quad = EvaluationGrid::uniform(2001).unwrap();
        let f: Vec<f64> = quad
            .points()
            .iter()
            .map(|&x| {
                xs.iter()
                    .map(|&y| eval_linked_kernel(rr, x, y, tt, &ctl).unwrap())
                    .sum::<f64>()
                    / n
            })
            .collect();
        let sq: Vec<f64> = f.iter().map(|v| v * v).collect();
        let mut loo = 0.0;
        for (i, &xi) in xs.iter().enumerate() {
            let mut acc = 0.0;
            for (j, &xj) in xs.iter().enumerate() {
                if i != j {
                    acc += eval_linked_kernel(rr, xi, xj, tt, &ctl).unwrap();
                }
            }
            loo += acc / (n - 1.0);
        }
        let brute = trapezoid(quad.points(), &sq) - 2.0 * loo / n;
        let fast = lscv_objective(&s, rr, &[tt]).unwrap()[0];
        assert!((brute - fast).abs() < 1e-9, "{brute} vs {fast}");
    }

    proptest! {
        #[test]
        fn a_is_inversion_symmetric(rv in 1e-3f64..1e3) {
            let a = amise_constant_a(r(rv));
            let b = amise_constant_a(r(1.0 / rv));
            prop_assert!((a - b).abs() <= 1e-14 * a);
        }

        #[test]
        fn oracle_scaling_laws(f2 in 0.1f64..100.0, gap in 0.1f64..10.0) {
            let m = matching(f2);
            let nm = TargetDensityInfo::new(f2, 0.0, gap, r(0.5)).unwrap();
            for &(n1, n2) in &[(100usize, 1000usize), (1000, 10000)] {
                let q = oracle_amise_bandwidth(n2, &m).unwrap().t.get()
                    / oracle_amise_bandwidth(n1, &m).unwrap().t.get();
                prop_assert!((q.log10() + 0.4).abs() < 1e-12);
                let q = oracle_amise_bandwidth(n2, &nm).unwrap().t.get()
                    / oracle_amise_bandwidth(n1, &nm).unwrap().t.get();
                prop_assert!((q.log10() + 0.5).abs() < 1e-12);
            }
        }

        #[test]
        fn oracle_minimises_amise_on_log_grid(f2 in 0.1f64..100.0, gap in -5.0f64..5.0, n in 10usize..100000) {
            let info = TargetDensityInfo::new(f2, 0.0, gap, r(2.0)).unwrap();
            let ts = oracle_amise_bandwidth(n, &info).unwrap().t;
            let best = amise_value(ts, n, &info);
            for i in 0..100 {
                let tv = ts.get() * 10f64.powf(-1.0 + 2.0 * i as f64 / 99.0);
                prop_assert!(best <= amise_value(t(tv), n, &info) * (1.0 + 1e-14));
            }
        }
    }
}
