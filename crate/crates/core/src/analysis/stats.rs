//! Goodness-of-fit tests and binomial intervals in their standard asymptotic forms.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Asymptotic Kolmogorov survival function `Q(λ) = 2 Σ (-1)^(k-1) exp(-2k²λ²)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let a2 = -2.0 * lambda * lambda;
    let mut sum = 0.0;
    let mut sign = 1.0;
    let mut prev = 0.0f64;
    for k in 1..=100 {
        let k = k as f64;
        let term = sign * (a2 * k * k).exp();
        sum += term;
        if term.abs() <= 1e-10 * prev || term.abs() <= 1e-16 * sum.abs() {
            return (2.0 * sum).clamp(0.0, 1.0);
        }
        sign = -sign;
        prev = term.abs();
    }
    1.0
}

/// One-sample KS statistic of `sample` against a continuous CDF.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// KS test against Exp(1), `F(t) = 1 - e^-t`.
pub fn ks_test_exp1(sample: &[f64]) -> Result<TestResult> {
    if sample.len() < 10 {
        return Err(Error::TooFewSamples { needed: 10, got: sample.len() });
    }
    if let Some(&bad) = sample.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::NonPositiveSample(bad));
    }
    let d = ks_statistic(sample, |t| -(-t).exp_m1());
    let sn = (sample.len() as f64).sqrt();
    Ok(TestResult { statistic: d, p_value: kolmogorov_q((sn + 0.12 + 0.11 / sn) * d) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub p_value: f64,
    pub dof: usize,
    /// Pooled bins as `(count_a, count_b)`.
    pub pooled: Vec<(u64, u64)>,
}

/// Two-sample chi-square test of homogeneity. Adjacent bins are pooled left
/// to right until both expected counts reach 5; a short tail joins the last
/// pooled bin.
pub fn chi_square_compare(a: &[u64], b: &[u64]) -> Result<ChiSquareResult> {
    if a.len() != b.len() {
        return Err(Error::BinMismatch(a.len(), b.len()));
    }
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    if na == 0 || nb == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let n = (na + nb) as f64;
    let (fa, fb) = (na as f64 / n, nb as f64 / n);
    let mut pooled: Vec<(u64, u64)> = Vec::new();
    let (mut ca, mut cb) = (0u64, 0u64);
    for (&x, &y) in a.iter().zip(b) {
        ca += x;
        cb += y;
        let t = (ca + cb) as f64;
        if t * fa >= 5.0 && t * fb >= 5.0 {
            pooled.push((ca, cb));
            ca = 0;
            cb = 0;
        }
    }
    if ca + cb > 0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += ca;
                last.1 += cb;
            }
            None => pooled.push((ca, cb)),
        }
    }
    let statistic: f64 = pooled
        .iter()
        .map(|&(x, y)| {
            let t = (x + y) as f64;
            let (ea, eb) = (t * fa, t * fb);
            (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb
        })
        .sum();
    let dof = pooled.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64).map(|c| c.sf(statistic)).unwrap_or(f64::NAN)
    };
    Ok(ChiSquareResult { statistic, p_value, dof, pooled })
}

/// Wilson score interval for `k` successes in `n` trials at normal quantile `z`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// One-sided 99% normal quantile.
pub const Z_99_ONE_SIDED: f64 = 2.326_347_874_040_841;
/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Lag-1 sample autocorrelation.
pub fn lag1_autocorrelation(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let var: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    let cov: f64 = xs.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    cov / var
}

/// Histogram of integer observations into bins `0..=max_bin`, with the
/// last bin absorbing everything above.
pub fn histogram(values: impl IntoIterator<Item = usize>, max_bin: usize) -> Vec<u64> {
    let mut h = vec![0u64; max_bin + 1];
    for v in values {
        h[v.min(max_bin)] += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_quantile_sample_has_small_statistic() {
        let n = 10;
        let xs: Vec<f64> = (0..n).map(|i| -(1.0 - (i as f64 + 0.5) / n as f64).ln()).collect();
        let r = ks_test_exp1(&xs).unwrap();
        assert!((r.statistic - 0.05).abs() < 1e-12);
        assert!(r.statistic < 0.1);
    }

    #[test]
    fn ks_rejects_constant_sample() {
        let r = ks_test_exp1(&[1.0; 100]).unwrap();
        assert!(r.p_value < 1e-6, "p = {}", r.p_value);
    }

    #[test]
    fn ks_errors() {
        assert!(matches!(ks_test_exp1(&[1.0; 9]), Err(Error::TooFewSamples { .. })));
        let mut xs = vec![1.0; 20];
        xs[3] = 0.0;
        assert!(matches!(ks_test_exp1(&xs), Err(Error::NonPositiveSample(_))));
    }

    #[test]
    fn kolmogorov_reference_values() {
        // Q(1.36) ≈ 0.049, Q(1.63) ≈ 0.0098.
        assert!((kolmogorov_q(1.36) - 0.0494).abs() < 1e-3);
        assert!((kolmogorov_q(1.628) - 0.0100).abs() < 5e-4);
        assert_eq!(kolmogorov_q(0.1), 1.0);
    }

    #[test]
    fn chi_square_identical_histograms() {
        let h = [10, 40, 25, 3, 1];
        let r = chi_square_compare(&h, &h).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn chi_square_detects_shift() {
        let a = [100, 50, 10, 0];
        let b = [10, 50, 100, 0];
        let r = chi_square_compare(&a, &b).unwrap();
        assert!(r.p_value < 1e-10);
        assert_eq!(r.dof, 2);
    }

    #[test]
    fn chi_square_errors() {
        assert!(matches!(chi_square_compare(&[1, 2], &[1]), Err(Error::BinMismatch(2, 1))));
        assert!(chi_square_compare(&[0, 0], &[1, 2]).is_err());
    }

    #[test]
    fn chi_square_pools_sparse_tail() {
        let r = chi_square_compare(&[30, 30, 2, 1], &[30, 30, 1, 2]).unwrap();
        assert_eq!(r.pooled.len(), 2);
        assert_eq!(r.pooled[1], (33, 33));
    }

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(30, 100, Z_95);
        assert!(lo < 0.3 && 0.3 < hi);
        assert_eq!(wilson_interval(0, 50, Z_95).0, 0.0);
    }

    #[test]
    fn autocorrelation_of_alternating_series() {
        let xs: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!(lag1_autocorrelation(&xs) < -0.95);
    }
}
