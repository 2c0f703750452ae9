//! Linear least-squares fits of sampled functions of `t` against bases of
//! monomials `t^z log^k t`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::Rational;

/// Condition number above which a fit is refused.
pub const CONDITION_LIMIT: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need {need} samples for {basis} monomials, got {got}")]
    TooFewSamples { need: usize, basis: usize, got: usize },
    #[error("ts and ys differ in length ({ts} vs {ys})")]
    LengthMismatch { ts: usize, ys: usize },
    #[error("sample t = {0} is not admissible for this basis")]
    BadSample(f64),
    #[error("design matrix is rank deficient (condition estimate {condition:e})")]
    RankDeficient { condition: f64 },
}

/// `t^z log^k t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub z: Rational,
    pub k: u32,
}

impl Monomial {
    pub fn new(z: impl Into<Rational>, k: u32) -> Self {
        Monomial { z: z.into(), k }
    }

    pub fn finite_at_zero(&self) -> bool {
        self.z.is_positive() || (self.z.is_zero() && self.k == 0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t == 0.0 {
            return if self.z.is_zero() && self.k == 0 { 1.0 } else { 0.0 };
        }
        let z = self.z.to_f64().expect("rational exponent fits in f64");
        let power = if self.z.is_integer() {
            t.powi(z as i32)
        } else {
            t.powf(z)
        };
        power * t.ln().powi(self.k as i32)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k {
            0 => write!(f, "t^{}", self.z),
            1 => write!(f, "t^{} log t", self.z),
            k => write!(f, "t^{} log^{k} t", self.z),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BasisSpec {
    pub monomials: Vec<Monomial>,
}

impl BasisSpec {
    pub fn new(monomials: impl IntoIterator<Item = Monomial>) -> Self {
        BasisSpec { monomials: monomials.into_iter().collect() }
    }

    /// `{1, t², t⁴}`.
    pub fn default_smooth() -> Self {
        Self::new([Monomial::new(0, 0), Monomial::new(2, 0), Monomial::new(4, 0)])
    }

    /// `{1, t², t⁴, t² log t}`.
    pub fn default_log() -> Self {
        let mut b = Self::default_smooth();
        b.monomials.push(Monomial::new(2, 1));
        b
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    fn has_duplicates(&self) -> bool {
        let mut sorted = self.monomials.clone();
        sorted.sort();
        sorted.windows(2).any(|w| w[0] == w[1])
    }

    pub fn eval(&self, coefficients: &[f64], t: f64) -> f64 {
        self.monomials.iter().zip(coefficients).map(|(m, c)| c * m.eval(t)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub coefficients: Vec<f64>,
    pub rms_residual: f64,
    pub condition_estimate: f64,
}

pub fn fit_basis(ts: &[f64], ys: &[f64], basis: &BasisSpec) -> Result<FitReport, FitError> {
    if ts.len() != ys.len() {
        return Err(FitError::LengthMismatch { ts: ts.len(), ys: ys.len() });
    }
    let p = basis.len();
    if ts.len() < p + 2 {
        return Err(FitError::TooFewSamples { need: p + 2, basis: p, got: ts.len() });
    }
    let zero_allowed = basis.monomials.iter().all(|m| m.finite_at_zero() && m.k == 0);
    if let Some(&t) = ts.iter().find(|&&t| !(t > 0.0 || (t == 0.0 && zero_allowed)) || !t.is_finite()) {
        return Err(FitError::BadSample(t));
    }
    if p == 0 {
        return Ok(FitReport { coefficients: Vec::new(), rms_residual: rms(ys), condition_estimate: 1.0 });
    }
    if basis.has_duplicates() {
        return Err(FitError::RankDeficient { condition: f64::INFINITY });
    }

    let m = ts.len();
    let mut a = DMatrix::from_fn(m, p, |i, j| basis.monomials[j].eval(ts[i]));
    let scales: Vec<f64> = (0..p)
        .map(|j| {
            let n = a.column(j).norm();
            if n > 0.0 { n } else { 1.0 }
        })
        .collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let sigma_min = svd.singular_values.min();
    let condition = if sigma_min > 0.0 { sigma_max / sigma_min } else { f64::INFINITY };
    if !(condition <= CONDITION_LIMIT) {
        return Err(FitError::RankDeficient { condition });
    }
    let y = DVector::from_column_slice(ys);
    let x = svd
        .solve(&y, 0.0)
        .map_err(|_| FitError::RankDeficient { condition })?;
    let residual = &y - &a * &x;
    let coefficients = x.iter().zip(&scales).map(|(c, s)| c / s).collect();
    Ok(FitReport {
        coefficients,
        rms_residual: rms(residual.as_slice()),
        condition_estimate: condition,
    })
}

fn rms(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelComparison {
    pub smooth: FitReport,
    pub log: FitReport,
    pub residual_smooth: f64,
    pub residual_log: f64,
    /// `residual_smooth / residual_log`.
    pub ratio: f64,
}

/// Fit both bases and compare their residuals. Residuals are floored at the
/// rounding level of the data so that two exact fits compare as equal.
pub fn compare_models(
    ts: &[f64],
    ys: &[f64],
    smooth: &BasisSpec,
    log: &BasisSpec,
) -> Result<ModelComparison, FitError> {
    let s = fit_basis(ts, ys, smooth)?;
    let l = fit_basis(ts, ys, log)?;
    let floor = 64.0 * f64::EPSILON * rms(ys);
    let rs = s.rms_residual.max(floor);
    let rl = l.rms_residual.max(floor);
    let ratio = if rl > 0.0 { rs / rl } else { 1.0 };
    Ok(ModelComparison { residual_smooth: rs, residual_log: rl, ratio, smooth: s, log: l })
}

/// `n` points geometrically spaced from `lo` to `hi`, both included.
pub fn geometric_samples(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let r = (hi / lo).ln() / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|i| lo * (r * i as f64).exp()).collect();
            v[n - 1] = hi;
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t2logt() -> BasisSpec {
        BasisSpec::new([Monomial::new(0, 0), Monomial::new(2, 1)])
    }

    #[test]
    fn exact_model_recovered() {
        let ts: Vec<f64> = (1..=20).map(|i| 0.025 * i as f64).collect();
        let ys: Vec<f64> = ts.iter().map(|t| 1.0 + 0.5 * t * t * t.ln()).collect();
        let r = fit_basis(&ts, &ys, &t2logt()).unwrap();
        assert!((r.coefficients[0] - 1.0).abs() < 1e-8);
        assert!((r.coefficients[1] - 0.5).abs() < 1e-8);
        assert!(r.rms_residual < 1e-12);
    }

    #[test]
    fn zero_data() {
        let ts: Vec<f64> = (1..=10).map(|i| 0.05 * i as f64).collect();
        let r = fit_basis(&ts, &[0.0; 10], &BasisSpec::default_log()).unwrap();
        assert!(r.coefficients.iter().all(|&c| c == 0.0));
        assert_eq!(r.rms_residual, 0.0);
    }

    #[test]
    fn refuses_bad_input() {
        let ts: Vec<f64> = (1..=10).map(|i| 0.05 * i as f64).collect();
        let dup = BasisSpec::new([Monomial::new(2, 0), Monomial::new(2, 0)]);
        assert!(matches!(fit_basis(&ts, &ts, &dup), Err(FitError::RankDeficient { .. })));
        assert!(matches!(
            fit_basis(&ts[..3], &ts[..3], &t2logt()),
            Err(FitError::TooFewSamples { .. })
        ));
        let mut with_zero = ts.clone();
        with_zero[0] = 0.0;
        assert!(matches!(fit_basis(&with_zero, &ts, &t2logt()), Err(FitError::BadSample(_))));
        assert!(fit_basis(&with_zero, &ts, &BasisSpec::default_smooth()).is_ok());
        let near = BasisSpec::new([Monomial::new(2, 0), Monomial::new(Rational::new(2_000_000_001, 1_000_000_000), 0)]);
        assert!(matches!(fit_basis(&ts, &ts, &near), Err(FitError::RankDeficient { .. })));
    }

    #[test]
    fn comparison() {
        let ts = geometric_samples(1e-3, 0.5, 25);
        let smooth_ys: Vec<f64> = ts.iter().map(|t| 2.0 - t * t + 0.3 * t.powi(4)).collect();
        let c = compare_models(&ts, &smooth_ys, &BasisSpec::default_smooth(), &BasisSpec::default_log()).unwrap();
        assert!((c.ratio - 1.0).abs() < 0.5, "ratio {}", c.ratio);
        let log_ys: Vec<f64> = ts.iter().zip(&smooth_ys).map(|(t, y)| y + 0.1 * t * t * t.ln()).collect();
        let c = compare_models(&ts, &log_ys, &BasisSpec::default_smooth(), &BasisSpec::default_log()).unwrap();
        assert!(c.ratio >= 10.0);
    }

    #[test]
    fn samples() {
        let s = geometric_samples(1e-3, 0.5, 25);
        assert_eq!(s.len(), 25);
        assert_eq!(s[0], 1e-3);
        assert_eq!(s[24], 0.5);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    proptest! {
        #[test]
        fn permutation_invariant(seed in 0u64..1000, shift in 0usize..20) {
            let ts = geometric_samples(1e-2, 0.5, 20);
            let ys: Vec<f64> = ts.iter().map(|t| (seed as f64 * 0.01 + t).sin()).collect();
            let a = fit_basis(&ts, &ys, &BasisSpec::default_log()).unwrap();
            let mut tp = ts.clone();
            let mut yp = ys.clone();
            tp.rotate_left(shift);
            yp.rotate_left(shift);
            tp.swap(0, 19);
            yp.swap(0, 19);
            let b = fit_basis(&tp, &yp, &BasisSpec::default_log()).unwrap();
            for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
                prop_assert!((x - y).abs() <= 1e-8 * x.abs().max(1.0));
            }
        }

        #[test]
        fn nested_models_never_worse(seed in 0u64..1000) {
            let ts = geometric_samples(1e-3, 0.5, 25);
            let ys: Vec<f64> = ts.iter().map(|t| ((seed as f64) * 0.37 + 3.0 * t).cos() * t.sqrt()).collect();
            let small = fit_basis(&ts, &ys, &BasisSpec::default_smooth()).unwrap();
            let big = fit_basis(&ts, &ys, &BasisSpec::default_log()).unwrap();
            prop_assert!(big.rms_residual <= small.rms_residual * (1.0 + 1e-12) + 1e-15);
        }

        #[test]
        fn exact_recovery(c in proptest::collection::vec((0.1f64..10.0, proptest::bool::ANY), 4)) {
            let coeffs: Vec<f64> = c.iter().map(|(m, neg)| if *neg { -m } else { *m }).collect();
            let basis = BasisSpec::default_log();
            let ts = geometric_samples(1e-3, 0.5, 25);
            let ys: Vec<f64> = ts.iter().map(|&t| basis.eval(&coeffs, t)).collect();
            let r = fit_basis(&ts, &ys, &basis).unwrap();
            for (x, y) in r.coefficients.iter().zip(&coeffs) {
                prop_assert!((x - y).abs() <= 1e-8 * y.abs());
            }
        }
    }
}
