use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;

use linked_kde::bench::{sample_synthetic, SyntheticTarget};
use linked_kde::binned_solver::{stationary_vector, ExponentialMethod};
use linked_kde::{
    backward_euler_evolve, bin_samples, build_four_corners, eval_series_grid,
    matrix_exponential_evolve, spectral_data, BinnedDensity, BinnedGrid, BoundaryRatio,
    DiffusionTime, EmpiricalTransforms, EvaluationGrid, SampleSet, SeriesConfig,
};

fn r(v: f64) -> BoundaryRatio {
    BoundaryRatio::new(v).unwrap()
}

fn t(v: f64) -> DiffusionTime {
    DiffusionTime::new(v).unwrap()
}

fn inf_norm(a: &DMatrix<f64>) -> f64 {
    a.row_iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[test]
fn column_sums_vanish() {
    for &m in &[2usize, 3, 17, 50, 201] {
        for &rv in &[0.0, 0.5, 1.0, 2.0, 10.0] {
            let a = build_four_corners(m, r(rv)).unwrap();
            for s in a.column_sums() {
                assert!(s.abs() <= 1e-14, "m={m} r={rv}: {s}");
            }
        }
    }
}

#[test]
fn implicit_step_norm_is_bounded() {
    for &m in &[5usize, 20, 60] {
        for &rv in &[0.5, 2.0, 10.0] {
            let a = build_four_corners(m, r(rv)).unwrap().dense();
            let inv = (DMatrix::identity(m, m) + a).try_inverse().unwrap();
            let bound = (2.0 * rv / (1.0 + rv)).max(2.0 / (1.0 + rv)) + 1e-10;
            let mut p = inv.clone();
            for k in 1..=13 {
                assert!(inf_norm(&p) <= bound, "m={m} r={rv} K=2^{}", k - 1);
                p = &p * &p;
            }
        }
    }
}

#[test]
fn binning_of_uniform_samples() {
    let s = sample_synthetic(&SyntheticTarget::cosine_bump(0.0).unwrap(), 10_000, 11).unwrap();
    let b = bin_samples(&s, 99, r(1.0)).unwrap();
    let h = b.grid.h();
    assert!((h * b.interior_sum() - 1.0).abs() < 1e-12);
    let sd = (2.0 / (3.0 * 10_000.0 * h)).sqrt();
    for &v in &b.interior[1..98] {
        assert!((v - 1.0).abs() <= 5.0 * sd, "{v}");
    }
    // The end nodes also collect the folded half-hat from the boundary.
    for v in [b.interior[0], b.interior[98]] {
        assert!((v - 1.5).abs() <= 5.0 * 1.5 * sd, "{v}");
    }
}

#[test]
fn w_class_eigenvectors_approach_sines() {
    let m = 400;
    let sd = spectral_data(m, r(2.0)).unwrap();
    let h = 1.0 / (m + 1) as f64;
    let q = (m - 1) / 2;
    for l in 1..=3usize {
        let col = sd.eigenvectors.column(q + l);
        let mut at_nodes = 0.0f64;
        let mut anywhere = 0.0f64;
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let j = ((m + 1) as f64 * x).floor() as usize;
            if (1..=m).contains(&j) {
                anywhere = anywhere.max((col[j - 1] - (2.0 * PI * l as f64 * x).sin()).abs());
            }
        }
        for j in 1..=m {
            let x = j as f64 * h;
            at_nodes = at_nodes.max((col[j - 1] - (2.0 * PI * l as f64 * x).sin()).abs());
        }
        assert!(at_nodes <= 5e-3, "l={l}: {at_nodes}");
        assert!(
            anywhere <= 2.0 * PI * l as f64 * h + 5e-3,
            "l={l}: {anywhere}"
        );
    }
}

#[test]
fn v_class_eigenvectors_approach_sines() {
    let m = 401;
    for &rv in &[0.5, 3.0] {
        let sd = spectral_data(m, r(rv)).unwrap();
        for k in 1..=3usize {
            let col = sd.eigenvectors.column(k - 1);
            let sign = if (col[m / (4 * k)] > 0.0)
                == ((2.0 * PI * k as f64 * (m / (4 * k)) as f64 / m as f64).sin() > 0.0)
            {
                1.0
            } else {
                -1.0
            };
            let err = (1..=m)
                .map(|j| {
                    (sign * col[j - 1] - (2.0 * PI * k as f64 * j as f64 / m as f64).sin()).abs()
                })
                .fold(0.0f64, f64::max);
            assert!(err <= 20.0 * k as f64 / m as f64, "r={rv} k={k}: {err}");
        }
    }
}

fn parabolic_setup(m: usize, rv: f64) -> (BinnedDensity, Vec<f64>, EmpiricalTransforms) {
    let poly = SyntheticTarget::parabolic().polynomial().unwrap().clone();
    let grid = BinnedGrid::new(m).unwrap();
    let xs: Vec<f64> = (1..=m).map(|j| grid.node(j)).collect();
    let init = xs.iter().map(|&x| poly.eval(x)).collect();
    let tr = EmpiricalTransforms::from_supplier(&poly, 400);
    (BinnedDensity::new(grid, init, r(rv)).unwrap(), xs, tr)
}

fn sup_error_vs_series(m: usize, tv: f64) -> f64 {
    let (u, xs, tr) = parabolic_setup(m, 2.0);
    let out = matrix_exponential_evolve(&u, t(tv)).unwrap().density;
    let oracle = eval_series_grid(
        &tr,
        &SeriesConfig::new(r(2.0)),
        t(tv),
        &EvaluationGrid::from_points(xs).unwrap(),
    )
    .unwrap();
    out.interior
        .iter()
        .zip(&oracle.values)
        .fold(0.0f64, |mx, (a, b)| mx.max((a - b).abs()))
}

// The node sum is conserved by the scheme while the continuum node sum drifts
// by h (f(0,t) + f(1,t)) / 2, so the observed order is one.
#[test]
fn convergence_to_the_continuum_is_first_order() {
    for &tv in &[0.01, 0.05] {
        let errs: Vec<f64> = [50usize, 100, 200, 400]
            .iter()
            .map(|&m| sup_error_vs_series(m, tv))
            .collect();
        for w in errs.windows(2) {
            let q = w[0] / w[1];
            assert!((1.7..=2.3).contains(&q), "t={tv}: {errs:?}");
        }
    }
}

#[test]
fn mass_drift_explains_the_error() {
    let m = 200;
    let tv = 0.05;
    let (u, xs, tr) = parabolic_setup(m, 2.0);
    let h = u.grid.h();
    let out = matrix_exponential_evolve(&u, t(tv)).unwrap().density;
    let oracle = eval_series_grid(
        &tr,
        &SeriesConfig::new(r(2.0)),
        t(tv),
        &EvaluationGrid::from_points(xs).unwrap(),
    )
    .unwrap();
    let drift = h * (out.interior_sum() - oracle.values.iter().sum::<f64>());
    assert!((h * out.interior_sum() - h * u.interior_sum()).abs() < 1e-12);
    assert!(drift.abs() > 1e-4 && drift.abs() < 10.0 * h, "{drift}");
}

#[test]
fn exponential_and_euler_agree_at_order_dt() {
    let (u, _, _) = parabolic_setup(100, 0.5);
    let a = matrix_exponential_evolve(&u, t(0.02)).unwrap().density;
    let b = backward_euler_evolve(&u, t(0.02)).unwrap();
    let diff = a
        .interior
        .iter()
        .zip(&b.interior)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(diff <= 50.0 * u.grid.dt(), "{diff}");
}

#[test]
fn nearly_periodic_ratio_at_large_m() {
    let m = 300;
    let base = bin_samples(&SampleSet::new(vec![0.1, 0.35, 0.8]).unwrap(), m, r(1.0)).unwrap();
    let periodic = matrix_exponential_evolve(&base, t(0.01)).unwrap();
    assert_eq!(periodic.method, ExponentialMethod::SymmetricEigen);
    let near = BinnedDensity {
        r: r(1.0 + 1e-9),
        ..base.clone()
    };
    let evo = matrix_exponential_evolve(&near, t(0.01)).unwrap();
    assert_ne!(evo.method, ExponentialMethod::SymmetricEigen);
    let diff = evo
        .density
        .interior
        .iter()
        .zip(&periodic.density.interior)
        .fold(0.0f64, |mx, (a, b)| mx.max((a - b).abs()));
    assert!(diff < 1e-5, "{:?}: {diff}", evo.method);
}

#[test]
fn stationary_vector_is_in_the_kernel() {
    for &m in &[3usize, 40, 257] {
        for &rv in &[0.0, 0.3, 4.0] {
            let w = stationary_vector(m, r(rv));
            let aw = build_four_corners(m, r(rv)).unwrap().apply(&w);
            assert!(aw.iter().all(|v| v.abs() < 1e-12), "m={m} r={rv}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn euler_preserves_sum_and_sign(
        xs in prop::collection::vec(0.0f64..=1.0, 1..30),
        m in 3usize..80,
        rv in 0.0f64..8.0,
        tv in 1e-4f64..0.2,
    ) {
        let u = bin_samples(&SampleSet::new(xs).unwrap(), m, r(rv)).unwrap();
        let before = u.interior_sum();
        let out = backward_euler_evolve(&u, t(tv)).unwrap();
        prop_assert!((out.interior_sum() - before).abs() <= 1e-11 * before);
        prop_assert!(out.interior.iter().all(|&v| v >= -1e-14));
        let (g0, g1) = out.ghosts();
        prop_assert!((g0 - rv * g1).abs() <= 1e-12 * g0.abs().max(1.0));
    }

    #[test]
    fn exponential_preserves_sum(
        xs in prop::collection::vec(0.0f64..=1.0, 1..30),
        m in 3usize..60,
        rv in 0.0f64..8.0,
        tv in 1e-4f64..0.5,
    ) {
        let u = bin_samples(&SampleSet::new(xs).unwrap(), m, r(rv)).unwrap();
        let out = matrix_exponential_evolve(&u, t(tv)).unwrap().density;
        prop_assert!((out.interior_sum() - u.interior_sum()).abs() <= 1e-8 * u.interior_sum());
        prop_assert!(out.interior.iter().all(|&v| v >= -1e-8 * u.interior_sum()));
    }
}
