use num_complex::Complex64;

use crate::error::{Error, Result};

/// Cubic interpolating spline with not-a-knot end conditions.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<Complex64>,
    slopes: Vec<Complex64>,
}

impl CubicSpline {
    /// Fits the spline; `knots` must be strictly increasing with at least
    /// four entries.
    pub fn new(knots: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        let n = knots.len();
        if n < 4 {
            return Err(Error::InvalidGrid(format!(
                "not-a-knot spline needs at least 4 knots, got {n}"
            )));
        }
        if values.len() != n {
            return Err(Error::InvalidGrid(format!(
                "{} values for {n} knots",
                values.len()
            )));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("spline knots must increase".into()));
        }
        let slopes = not_a_knot_slopes(&knots, &values);
        Ok(Self {
            knots,
            values,
            slopes,
        })
    }

    /// First and last knot.
    pub fn range(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    pub fn slopes(&self) -> &[Complex64] {
        &self.slopes
    }

    /// Evaluates the spline, extrapolating with the end cubics.
    pub fn eval(&self, x: f64) -> Complex64 {
        let n = self.knots.len();
        let i = match self.knots.partition_point(|&k| k <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let dx = self.knots[i + 1] - self.knots[i];
        let t = (x - self.knots[i]) / dx;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        self.values[i] * h00
            + self.slopes[i] * (h10 * dx)
            + self.values[i + 1] * h01
            + self.slopes[i + 1] * (h11 * dx)
    }
}

/// Node slopes from the tridiagonal continuity system, solved by the
/// Thomas algorithm.
fn not_a_knot_slopes(x: &[f64], y: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let m: Vec<Complex64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / dx[i]).collect();

    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];

    let d0 = x[2] - x[0];
    diag[0] = dx[1];
    sup[0] = d0;
    rhs[0] = (m[0] * ((dx[0] + 2.0 * d0) * dx[1]) + m[1] * (dx[0] * dx[0])) / d0;
    for i in 1..n - 1 {
        sub[i] = dx[i];
        diag[i] = 2.0 * (dx[i - 1] + dx[i]);
        sup[i] = dx[i - 1];
        rhs[i] = (m[i - 1] * dx[i] + m[i] * dx[i - 1]) * 3.0;
    }
    let d1 = x[n - 1] - x[n - 3];
    sub[n - 1] = d1;
    diag[n - 1] = dx[n - 3];
    rhs[n - 1] = (m[n - 3] * (dx[n - 2] * dx[n - 2])
        + m[n - 2] * ((2.0 * d1 + dx[n - 2]) * dx[n - 3]))
        / d1;

    for i in 1..n {
        let w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        let prev = rhs[i - 1];
        rhs[i] -= prev * w;
    }
    let mut s = vec![Complex64::new(0.0, 0.0); n];
    s[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        s[i] = (rhs[i] - s[i + 1] * sup[i]) / diag[i];
    }
    s
}
