//! Clamped cubic interpolating splines with exact local Taylor expansions.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::jets::MAX_ORDER;

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    knots: Vec<f64>,
    /// Per segment: value, first, second and third Taylor coefficient at the left knot.
    segments: Vec<[f64; 4]>,
}

impl CubicSpline {
    /// Interpolates `(x[i], y[i])` with prescribed end slopes.
    pub fn clamped(x: &[f64], y: &[f64], slope0: f64, slope1: f64) -> Result<Self, Error> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::InvalidParameter { name: "knots".into(), reason: "need at least two matching knots".into() });
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter { name: "knots".into(), reason: "must be strictly increasing".into() });
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        // tridiagonal system for the knot second derivatives
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut lower = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 2.0 * h[0];
        upper[0] = h[0];
        rhs[0] = 6.0 * ((y[1] - y[0]) / h[0] - slope0);
        for i in 1..n - 1 {
            lower[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            upper[i] = h[i];
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        lower[n - 1] = h[n - 2];
        diag[n - 1] = 2.0 * h[n - 2];
        rhs[n - 1] = 6.0 * (slope1 - (y[n - 1] - y[n - 2]) / h[n - 2]);
        for i in 1..n {
            let m = lower[i] / diag[i - 1];
            diag[i] -= m * upper[i - 1];
            rhs[i] -= m * rhs[i - 1];
        }
        let mut m2 = vec![0.0; n];
        m2[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m2[i] = (rhs[i] - upper[i] * m2[i + 1]) / diag[i];
        }
        let segments = (0..n - 1)
            .map(|i| {
                let d1 = (y[i + 1] - y[i]) / h[i] - h[i] * (2.0 * m2[i] + m2[i + 1]) / 6.0;
                [y[i], d1, m2[i] / 2.0, (m2[i + 1] - m2[i]) / (6.0 * h[i])]
            })
            .collect();
        Ok(Self { knots: x.to_vec(), segments })
    }

    pub fn span(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    fn segment(&self, x: f64) -> usize {
        let i = self.knots.partition_point(|&k| k <= x);
        i.saturating_sub(1).min(self.segments.len() - 1)
    }

    /// Taylor coefficients at `x`, taken from the segment containing `x`.
    pub fn series(&self, x: f64) -> [f64; MAX_ORDER + 1] {
        let i = self.segment(x);
        let [a, b, c, d] = self.segments[i];
        let t = x - self.knots[i];
        let mut s = [0.0; MAX_ORDER + 1];
        s[0] = a + t * (b + t * (c + t * d));
        s[1] = b + t * (2.0 * c + 3.0 * t * d);
        s[2] = c + 3.0 * t * d;
        s[3] = d;
        s
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.series(x)[0]
    }
}
