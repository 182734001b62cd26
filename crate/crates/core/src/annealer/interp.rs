use crate::error::{Error, Result};

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson slopes, which
/// keeps monotone data monotone and never overshoots between nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Nodes must be strictly increasing or strictly decreasing in `x`.
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let (x, y) = Self::ordered(x, y)?;
        let slopes = pchip_slopes(&x, &y);
        Ok(Self { x, y, slopes })
    }

    /// Hermite interpolant with caller-supplied node derivatives.
    pub fn with_slopes(x: &[f64], y: &[f64], slopes: &[f64]) -> Result<Self> {
        if slopes.len() != x.len() {
            return Err(Error::InvalidDimension("one slope per node required".into()));
        }
        let reversed = x.len() > 1 && x[0] > x[1];
        let (x, y) = Self::ordered(x, y)?;
        let mut slopes = slopes.to_vec();
        if reversed {
            slopes.reverse();
        }
        Ok(Self { x, y, slopes })
    }

    fn ordered(x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::InvalidDimension(format!(
                "interpolation needs >= 2 nodes with matching values (got {} and {})",
                x.len(),
                y.len()
            )));
        }
        let (mut x, mut y) = (x.to_vec(), y.to_vec());
        if x[0] > x[1] {
            x.reverse();
            y.reverse();
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("interpolation nodes must be strictly monotone".into()));
        }
        Ok((x, y))
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Value at `t`, clamped to the end values outside the node range.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let k = self.x.partition_point(|&xi| xi <= t) - 1;
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[k] + h10 * h * self.slopes[k] + h01 * self.y[k + 1] + h11 * h * self.slopes[k + 1]
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

// one-sided three-point estimate, limited to preserve shape
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}
