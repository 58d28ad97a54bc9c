//! Polynomial densities on `[0, 1]` with closed-form transforms.

use crate::error::{Error, Result};
use crate::series_solver::CoefficientSupplier;
use std::f64::consts::PI;

/// `f(x) = sum_p coeffs[p] x^p` restricted to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "polynomial needs at least one finite coefficient".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial { coeffs: vec![0.0] };
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(p, c)| (p + 1) as f64 * c)
            .collect();
        Polynomial { coeffs }
    }

    /// Antiderivative vanishing at 0.
    pub fn integral(&self) -> Polynomial {
        let mut coeffs = vec![0.0];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(p, c)| c / (p + 1) as f64),
        );
        Polynomial { coeffs }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial { coeffs }
    }

    /// `int_0^1 f(x) dx`.
    pub fn mass(&self) -> f64 {
        self.integral().eval(1.0)
    }

    /// `int_0^1 x^p e^{-i k_n x} dx` for `p = 0..=max_power`, `k_n = 2 pi n`,
    /// as `(re, im)` pairs. Uses `e^{-i k_n} = 1`.
    fn monomial_transforms(n: usize, max_power: usize) -> Vec<(f64, f64)> {
        if n == 0 {
            return (0..=max_power)
                .map(|p| (1.0 / (p + 1) as f64, 0.0))
                .collect();
        }
        let k = 2.0 * PI * n as f64;
        let mut out = Vec::with_capacity(max_power + 1);
        out.push((0.0, 0.0));
        for p in 1..=max_power {
            // I_p = (p I_{p-1} - 1) / (i k) = -i (p I_{p-1} - 1) / k
            let (re, im) = out[p - 1];
            let (a, b) = (p as f64 * re - 1.0, p as f64 * im);
            out.push((b / k, -a / k));
        }
        out
    }
}

impl CoefficientSupplier for Polynomial {
    fn transforms(&self, n: usize) -> (f64, f64, f64) {
        let i = Self::monomial_transforms(n, self.coeffs.len());
        let (mut fr, mut fi, mut xi) = (0.0, 0.0, 0.0);
        for (p, c) in self.coeffs.iter().enumerate() {
            fr += c * i[p].0;
            fi += c * i[p].1;
            xi += c * i[p + 1].1;
        }
        // cos transform is the real part, sin transforms are minus the imaginary part
        (fr, -fi, -xi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::trapezoid_fn;

    #[test]
    fn transforms_match_quadrature() {
        let p = Polynomial::new(vec![12.0 / 11.0, 6.0 / 11.0, -12.0 / 11.0]).unwrap();
        for n in 0..5 {
            let k = 2.0 * PI * n as f64;
            let c = trapezoid_fn(|x| (k * x).cos() * p.eval(x), 0.0, 1.0, 20001);
            let s = trapezoid_fn(|x| (k * x).sin() * p.eval(x), 0.0, 1.0, 20001);
            let s1 = trapezoid_fn(|x| x * (k * x).sin() * p.eval(x), 0.0, 1.0, 20001);
            let (a, b, d) = p.transforms(n);
            assert!((a - c).abs() < 1e-7, "n={n}");
            assert!((b - s).abs() < 1e-7, "n={n}");
            assert!((d - s1).abs() < 1e-7, "n={n}");
        }
    }

    #[test]
    fn uniform_density_coefficients() {
        let u = Polynomial::new(vec![1.0]).unwrap();
        assert_eq!(u.transforms(0), (1.0, 0.0, 0.0));
        let (c, s, s1) = u.transforms(3);
        assert!(c.abs() < 1e-15 && s.abs() < 1e-15);
        assert!((s1 + 1.0 / (6.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn calculus() {
        let p = Polynomial::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.derivative().coeffs(), &[2.0, 6.0]);
        assert!((p.mass() - 3.0).abs() < 1e-15);
        assert_eq!(p.mul(&p).eval(2.0), 17.0 * 17.0);
    }
}
