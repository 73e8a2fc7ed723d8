//! Natural cubic spline interpolation.

use crate::error::{HypError, Result};
use num_complex::Complex64;

/// Natural cubic spline through `(x[i], y[i])`; evaluates to the boundary
/// behaviour chosen by the caller outside `[x[0], x[n-1]]`.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<CubicSpline> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(HypError::InvalidParameter("spline needs at least two points and matching lengths".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(HypError::InvalidParameter("spline nodes must be strictly increasing".into()));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
                let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
                c[i] = h1 / diag;
                d[i] = (rhs - h0 * d[i - 1]) / diag;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - c[i] * m[i + 1];
            }
        }
        Ok(CubicSpline { x: x.to_vec(), y: y.to_vec(), m })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    /// Value at `t`, clamped to the end intervals.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i] + b * self.y[i + 1] + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

/// Spline of a complex sequence (real and imaginary parts separately).
#[derive(Clone, Debug)]
pub struct ComplexSpline {
    re: CubicSpline,
    im: CubicSpline,
}

impl ComplexSpline {
    pub fn new(x: &[f64], y: &[Complex64]) -> Result<ComplexSpline> {
        let re: Vec<f64> = y.iter().map(|v| v.re).collect();
        let im: Vec<f64> = y.iter().map(|v| v.im).collect();
        Ok(ComplexSpline { re: CubicSpline::new(x, &re)?, im: CubicSpline::new(x, &im)? })
    }

    pub fn range(&self) -> (f64, f64) {
        self.re.range()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        Complex64::new(self.re.eval(t), self.im.eval(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_nodes_and_cubics_inside() {
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.1).powf(1.3)).collect();
        let y: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let s = CubicSpline::new(&x, &y).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((s.eval(*a) - b).abs() < 1e-14);
        }
        let t = 1.234;
        assert!((s.eval(t) - t.sin()).abs() < 1e-4);
    }

    #[test]
    fn linear_data_is_reproduced() {
        let x = [0.0, 1.0, 3.0, 4.5];
        let y = [1.0, 3.0, 7.0, 10.0];
        let s = CubicSpline::new(&x, &y).unwrap();
        assert!((s.eval(2.0) - 5.0).abs() < 1e-14);
        assert!(CubicSpline::new(&[0.0, 0.0], &[1.0, 2.0]).is_err());
    }
}
