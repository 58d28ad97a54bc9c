use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bandwidth::TargetDensityInfo;
use crate::error::{Error, Result};
use crate::polynomial::Polynomial;
use crate::types::{BoundaryRatio, SampleSet};

#[derive(Debug, Clone, PartialEq)]
pub enum TargetKind {
    /// `(b(1,2; x) + 2 b(a,1; x)) / 3 = (2 - 2x + 2a x^{a-1}) / 3`, `a > 0`.
    BetaMixture { a: f64 },
    /// `1 + amplitude cos(2 pi x)`, `|amplitude| <= 1`.
    CosineBump { amplitude: f64 },
    /// `6/11 (-2x^2 + x + 2)`.
    Parabolic,
    /// `0.3 Beta(1,6) + 0.4 Beta(8,8) + 0.3 Beta(4,1)`: modes at both ends and
    /// in the middle, `f(0) = 1.8`, `f(1) = 1.2`.
    Trimodal,
    /// Any polynomial density.
    Custom(Polynomial),
}

/// A known density on `[0, 1]` used for simulation studies.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTarget {
    kind: TargetKind,
    // density and cdf, for kinds that are polynomials
    poly: Option<(Polynomial, Polynomial)>,
}

impl SyntheticTarget {
    pub fn new(kind: TargetKind) -> Result<Self> {
        match &kind {
            TargetKind::BetaMixture { a } if !(a.is_finite() && *a > 0.0) => {
                return Err(Error::InvalidTarget(format!(
                    "beta mixture needs a > 0, got {a}"
                )));
            }
            TargetKind::CosineBump { amplitude } if amplitude.is_nan() || amplitude.abs() > 1.0 => {
                return Err(Error::InvalidTarget(format!(
                    "cosine bump needs |amplitude| <= 1, got {amplitude}"
                )));
            }
            TargetKind::Custom(p) if (p.mass() - 1.0).abs() > 1e-9 => {
                return Err(Error::InvalidTarget(format!(
                    "custom density has mass {}",
                    p.mass()
                )));
            }
            _ => {}
        }
        let poly = polynomial_form(&kind).map(|p| {
            let c = p.integral();
            (p, c)
        });
        Ok(Self { kind, poly })
    }

    pub fn beta_mixture(a: f64) -> Result<Self> {
        Self::new(TargetKind::BetaMixture { a })
    }

    pub fn cosine_bump(amplitude: f64) -> Result<Self> {
        Self::new(TargetKind::CosineBump { amplitude })
    }

    pub fn parabolic() -> Self {
        Self::new(TargetKind::Parabolic).expect("valid target")
    }

    pub fn trimodal() -> Self {
        Self::new(TargetKind::Trimodal).expect("valid target")
    }

    pub fn custom(p: Polynomial) -> Result<Self> {
        Self::new(TargetKind::Custom(p))
    }

    pub fn kind(&self) -> &TargetKind {
        &self.kind
    }

    /// Polynomial form, when there is one.
    pub fn polynomial(&self) -> Option<&Polynomial> {
        self.poly.as_ref().map(|(p, _)| p)
    }

    pub fn density(&self, x: f64) -> f64 {
        if let Some((p, _)) = &self.poly {
            return p.eval(x);
        }
        match &self.kind {
            TargetKind::BetaMixture { a } => (2.0 - 2.0 * x + 2.0 * a * x.powf(a - 1.0)) / 3.0,
            TargetKind::CosineBump { amplitude } => 1.0 + amplitude * (2.0 * PI * x).cos(),
            _ => unreachable!("polynomial kinds are cached"),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if let Some((_, c)) = &self.poly {
            return c.eval(x);
        }
        match &self.kind {
            TargetKind::BetaMixture { a } => (2.0 * x - x * x + 2.0 * x.powf(*a)) / 3.0,
            TargetKind::CosineBump { amplitude } => {
                x + amplitude * (2.0 * PI * x).sin() / (2.0 * PI)
            }
            _ => unreachable!("polynomial kinds are cached"),
        }
    }

    /// `f(0) / f(1)`.
    pub fn r_true(&self) -> Result<BoundaryRatio> {
        let right = self.density(1.0);
        if right.is_nan() || right <= 0.0 {
            return Err(Error::InvalidTarget("density vanishes at x = 1".into()));
        }
        BoundaryRatio::new(self.density(0.0) / right)
            .map_err(|e| Error::InvalidTarget(e.to_string()))
    }

    /// `||f''||^2`, `f'(0)`, `f'(1)` and `r`; fails when `f` is not `C^2` up
    /// to the boundary.
    pub fn info(&self) -> Result<TargetDensityInfo> {
        let r = self.r_true()?;
        if let Some(p) = self.polynomial() {
            let d = p.derivative();
            let d2 = d.derivative();
            return TargetDensityInfo::new(d2.mul(&d2).mass(), d.eval(0.0), d.eval(1.0), r);
        }
        match &self.kind {
            TargetKind::BetaMixture { a } => {
                let a = *a;
                if a < 2.5 {
                    return Err(Error::InvalidTarget(format!(
                        "beta mixture with a = {a} has unbounded or non-square-integrable f''"
                    )));
                }
                let c = 2.0 * a * (a - 1.0) * (a - 2.0) / 3.0;
                let f2 = c * c / (2.0 * a - 5.0);
                let fprime1 = (-2.0 + 2.0 * a * (a - 1.0)) / 3.0;
                TargetDensityInfo::new(f2, -2.0 / 3.0, fprime1, r)
            }
            TargetKind::CosineBump { amplitude } => {
                TargetDensityInfo::new(8.0 * PI.powi(4) * amplitude * amplitude, 0.0, 0.0, r)
            }
            _ => unreachable!("polynomial kinds are handled above"),
        }
    }

    /// Short label for tables.
    pub fn label(&self) -> String {
        match &self.kind {
            TargetKind::BetaMixture { a } => format!("beta_mixture:a={a}"),
            TargetKind::CosineBump { amplitude } => format!("cosine_bump:amp={amplitude}"),
            TargetKind::Parabolic => "parabolic".into(),
            TargetKind::Trimodal => "trimodal".into(),
            TargetKind::Custom(_) => "custom".into(),
        }
    }
}

fn polynomial_form(kind: &TargetKind) -> Option<Polynomial> {
    match kind {
        TargetKind::Parabolic => {
            Some(Polynomial::new(vec![12.0 / 11.0, 6.0 / 11.0, -12.0 / 11.0]).expect("finite"))
        }
        TargetKind::Trimodal => Some(trimodal_polynomial()),
        TargetKind::Custom(p) => Some(p.clone()),
        TargetKind::BetaMixture { a } if a.fract() == 0.0 && (1.0..=64.0).contains(a) => {
            let a = *a as usize;
            let mut coeffs = vec![0.0; a.max(2)];
            coeffs[0] += 2.0 / 3.0;
            coeffs[1] -= 2.0 / 3.0;
            coeffs[a - 1] += 2.0 * a as f64 / 3.0;
            Some(Polynomial::new(coeffs).expect("finite"))
        }
        _ => None,
    }
}

/// `x^{p-1} (1-x)^{q-1} / B(p, q)` expanded in monomials.
fn beta_polynomial(p: usize, q: usize) -> Polynomial {
    let mut coeffs = vec![0.0; p + q - 1];
    let mut binom = 1.0;
    for k in 0..q {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[p - 1 + k] = sign * binom;
        binom = binom * (q - 1 - k) as f64 / (k + 1) as f64;
    }
    // 1 / B(p, q) = (p + q - 1)! / ((p - 1)! (q - 1)!)
    let mut norm = 1.0;
    for i in 1..p + q {
        norm *= i as f64;
    }
    for i in 1..p {
        norm /= i as f64;
    }
    for i in 1..q {
        norm /= i as f64;
    }
    Polynomial::new(coeffs.into_iter().map(|c| c * norm).collect()).expect("finite")
}

fn trimodal_polynomial() -> Polynomial {
    let parts = [(0.3, 1, 6), (0.4, 8, 8), (0.3, 4, 1)];
    let mut coeffs = vec![0.0; 15];
    for (w, p, q) in parts {
        for (i, c) in beta_polynomial(p, q).coeffs().iter().enumerate() {
            coeffs[i] += w * c;
        }
    }
    Polynomial::new(coeffs).expect("finite")
}

/// `n` draws by inverting the cdf with bisection, from a ChaCha8 stream
/// seeded with `seed`.
pub fn sample_synthetic(target: &SyntheticTarget, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    check_monotone_cdf(target)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n)
        .map(|_| invert_cdf(target, rng.random::<f64>()))
        .collect();
    SampleSet::new(values)
}

fn check_monotone_cdf(target: &SyntheticTarget) -> Result<()> {
    const STEPS: usize = 4096;
    let mut prev = target.cdf(0.0);
    if prev.abs() > 1e-9 {
        return Err(Error::InvalidTarget(format!("cdf(0) = {prev}")));
    }
    for i in 1..=STEPS {
        let c = target.cdf(i as f64 / STEPS as f64);
        if c.is_nan() || c < prev - 1e-12 {
            return Err(Error::InvalidTarget(format!(
                "cdf decreases near x = {}",
                i as f64 / STEPS as f64
            )));
        }
        prev = c;
    }
    if (prev - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidTarget(format!("cdf(1) = {prev}")));
    }
    Ok(())
}

fn invert_cdf(target: &SyntheticTarget, u: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if target.cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
