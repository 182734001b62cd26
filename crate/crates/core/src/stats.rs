//! Monte-Carlo summaries.

/// Two-sided 95% standard-normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Sample mean with a 95% normal-approximation (Wald) confidence half-width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricEstimate {
    pub mean: f64,
    pub ci_halfwidth: f64,
    pub n_samples: usize,
}

impl MetricEstimate {
    /// Summarizes per-trial values, reduced in slice order.
    ///
    /// The half-width is `Z95 * s / sqrt(n)` with the unbiased sample standard
    /// deviation `s`; a single sample gives a zero half-width.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        assert!(n > 0, "MetricEstimate needs at least one sample");
        let mean = samples.iter().sum::<f64>() / n as f64;
        let ci_halfwidth = if n > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            Z95 * (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            ci_halfwidth,
            n_samples: n,
        }
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.ci_halfwidth
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.ci_halfwidth
    }

    pub fn overlaps(&self, other: &MetricEstimate) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.ci_halfwidth / Z95
    }
}

/// Median of a non-empty slice (mean of the two middle values for even length).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sample_has_zero_width() {
        let e = MetricEstimate::from_samples(&[0.4]);
        assert_eq!(e.mean, 0.4);
        assert_eq!(e.ci_halfwidth, 0.0);
    }

    #[test]
    fn wald_width() {
        // values 0,1 alternating: mean 0.5, s^2 = n/(4(n-1))
        let v: Vec<f64> = (0..100).map(|i| (i % 2) as f64).collect();
        let e = MetricEstimate::from_samples(&v);
        let s = (100.0 / (4.0 * 99.0) as f64).sqrt();
        assert!((e.ci_halfwidth - Z95 * s / 10.0).abs() < 1e-15);
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
