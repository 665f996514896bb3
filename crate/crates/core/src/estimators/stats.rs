//! Point estimates with standard errors, least squares and the
//! Kolmogorov-Smirnov distance to `Exp(1)`.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// A sample mean with `stderr = sd / sqrt(n)` and a 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub ci95: (f64, f64),
}

impl Estimate {
    /// Frequency of `successes` among `n` trials with a Wilson interval.
    pub fn proportion(successes: u64, n: u64) -> Self {
        assert!(n > 0 && successes <= n);
        let nf = n as f64;
        let q = successes as f64 / nf;
        let sd = if n > 1 { (q * (1.0 - q) * nf / (nf - 1.0)).sqrt() } else { 0.0 };
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / nf;
        let centre = (q + z2 / (2.0 * nf)) / denom;
        let half = Z95 * (q * (1.0 - q) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
        Self {
            mean: q,
            stderr: sd / nf.sqrt(),
            n,
            // the Wilson interval touches 0 or 1 exactly at the extremes
            ci95: (
                if successes == 0 { 0.0 } else { (centre - half).max(0.0) },
                if successes == n { 1.0 } else { (centre + half).min(1.0) },
            ),
        }
    }

    /// Sample mean with a normal interval.
    pub fn from_samples(xs: &[f64]) -> Self {
        assert!(!xs.is_empty());
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let stderr = (var / n).sqrt();
        Self::normal(mean, stderr, xs.len() as u64)
    }

    /// An estimate with a given standard error and normal interval.
    pub fn normal(mean: f64, stderr: f64, n: u64) -> Self {
        Self { mean, stderr, n, ci95: (mean - Z95 * stderr, mean + Z95 * stderr) }
    }

    /// `sqrt(se_a^2 + se_b^2)`.
    pub fn combined_stderr(&self, other: &Estimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }

    /// `|a - b| <= k * combined stderr`.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        (self.mean - other.mean).abs() <= k * self.combined_stderr(other)
    }

    /// Multiplies mean, stderr and interval by a positive constant.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            mean: self.mean * c,
            stderr: self.stderr * c.abs(),
            n: self.n,
            ci95: if c >= 0.0 { (self.ci95.0 * c, self.ci95.1 * c) } else { (self.ci95.1 * c, self.ci95.0 * c) },
        }
    }
}

/// Ordinary least squares `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Standard error of the slope (0 with two points).
    pub slope_stderr: f64,
    pub points: usize,
}

/// Needs at least two distinct `x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let slope_stderr = if n > 2 { (sse / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    Some(LinearFit { slope, intercept, r_squared, slope_stderr, points: n })
}

/// `sup_x |F_n(x) - (1 - e^{-x})|` for the samples rescaled by their mean.
pub fn ks_exponential(samples: &[f64]) -> f64 {
    assert!(!samples.is_empty());
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let mut xs: Vec<f64> = samples.iter().map(|x| x / mean).collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let f = 1.0 - (-x).exp();
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// Equal-width histogram over `[lo, hi]`; the last bin is closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        assert!(bins > 0 && hi > lo);
        let mut counts = vec![0; bins];
        for &x in samples {
            if x < lo || x > hi {
                continue;
            }
            let b = (((x - lo) / (hi - lo)) * bins as f64) as usize;
            counts[b.min(bins - 1)] += 1;
        }
        Self { lo, hi, counts }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn proportion_extremes() {
        let e = Estimate::proportion(10, 10);
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.stderr, 0.0);
        assert!(e.ci95.0 > 0.6 && e.ci95.1 == 1.0);
        let e = Estimate::proportion(0, 1);
        assert_eq!((e.mean, e.stderr), (0.0, 0.0));
    }

    #[test]
    fn wilson_reference_value() {
        // 8 of 10: Wilson interval (0.4902, 0.9433)
        let e = Estimate::proportion(8, 10);
        assert!((e.ci95.0 - 0.4902).abs() < 1e-4, "{:?}", e.ci95);
        assert!((e.ci95.1 - 0.9433).abs() < 1e-4, "{:?}", e.ci95);
    }

    #[test]
    fn fit_recovers_a_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12 && (f.intercept - 3.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0], &[2.0]).is_none());
        assert!(linear_fit(&[1.0, 1.0], &[2.0, 3.0]).is_none());
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| -(1.0 - (i as f64 + 0.5) / n as f64).ln()).collect();
        assert!(ks_exponential(&xs) < 0.01);
        assert!(ks_exponential(&vec![1.0; 100]) > 0.3);
    }

    proptest! {
        #[test]
        fn mean_is_order_free(xs in proptest::collection::vec(-1e3f64..1e3, 1..60)) {
            let a = Estimate::from_samples(&xs);
            let mut r = xs.clone();
            r.reverse();
            let b = Estimate::from_samples(&r);
            prop_assert!((a.mean - b.mean).abs() <= 1e-9 * (1.0 + a.mean.abs()));
            prop_assert!((a.stderr - b.stderr).abs() <= 1e-9 * (1.0 + a.stderr));
        }

        #[test]
        fn wilson_contains_the_frequency(k in 0u64..50, extra in 0u64..50) {
            let n = k + extra + 1;
            let e = Estimate::proportion(k, n);
            prop_assert!(e.ci95.0 <= e.mean + 1e-12 && e.mean <= e.ci95.1 + 1e-12);
            prop_assert!(e.stderr >= 0.0);
        }
    }
}
