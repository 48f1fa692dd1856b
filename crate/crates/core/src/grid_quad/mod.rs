//! Uniform grids, composite six-point Newton–Cotes quadrature and spline
//! differentiation.
//!
//! Every grid carries a whole number of five-interval panels, so the closed
//! six-point rule (exact on quintics) applies panel by panel. Cumulative
//! integrals at interior panel nodes integrate the panel's quintic
//! interpolant up to that node, which keeps them exact on quintics too and
//! makes the running total at panel boundaries agree with [`integrate`].

mod spline;

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use spline::CubicSpline;

/// Nodes per panel minus one.
pub const PANEL: usize = 5;

/// `PANEL_WEIGHTS[j][i] * h` integrates the quintic through the six panel
/// nodes from node 0 to node `j + 1`, weighted at node `i`.
const PANEL_WEIGHTS: [[f64; 6]; 5] = {
    const D: f64 = 1440.0;
    [
        [475.0 / D, 1427.0 / D, -798.0 / D, 482.0 / D, -173.0 / D, 27.0 / D],
        [448.0 / D, 2064.0 / D, 224.0 / D, 224.0 / D, -96.0 / D, 16.0 / D],
        [459.0 / D, 1971.0 / D, 1026.0 / D, 1026.0 / D, -189.0 / D, 27.0 / D],
        [448.0 / D, 2048.0 / D, 768.0 / D, 2048.0 / D, 448.0 / D, 0.0],
        [475.0 / D, 1875.0 / D, 1250.0 / D, 1250.0 / D, 1875.0 / D, 475.0 / D],
    ]
};

/// Equispaced nodes on `[x_min, x_max]` with a whole number of panels.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformGrid {
    x_min: f64,
    x_max: f64,
    nodes_per_unit: f64,
    points: Vec<f64>,
}

impl UniformGrid {
    /// Grid with at least `nodes_per_unit` intervals per unit length; the
    /// interval count is rounded up to a multiple of five.
    pub fn new(x_min: f64, x_max: f64, nodes_per_unit: f64) -> Result<Self> {
        if !(nodes_per_unit.is_finite() && nodes_per_unit > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "nodes per unit must be positive, got {nodes_per_unit}"
            )));
        }
        check_bounds(x_min, x_max)?;
        let raw = ((x_max - x_min) * nodes_per_unit - 1e-9).ceil().max(1.0);
        if raw > 1e9 {
            return Err(Error::InvalidGrid(format!("{raw} intervals is too many")));
        }
        let intervals = (raw as usize).div_ceil(PANEL) * PANEL;
        Self::build(x_min, x_max, nodes_per_unit, intervals)
    }

    /// Grid with exactly `count` points; `count - 1` must be a positive
    /// multiple of five.
    pub fn with_count(x_min: f64, x_max: f64, count: usize) -> Result<Self> {
        check_bounds(x_min, x_max)?;
        if count < PANEL + 1 || (count - 1) % PANEL != 0 {
            return Err(Error::InvalidGrid(format!(
                "point count {count} is not 1 + a positive multiple of {PANEL}"
            )));
        }
        let npu = (count - 1) as f64 / (x_max - x_min);
        Self::build(x_min, x_max, npu, count - 1)
    }

    fn build(x_min: f64, x_max: f64, nodes_per_unit: f64, intervals: usize) -> Result<Self> {
        let width = x_max - x_min;
        let points = (0..=intervals)
            .map(|i| {
                if i == intervals {
                    x_max
                } else {
                    x_min + width * (i as f64 / intervals as f64)
                }
            })
            .collect();
        Ok(Self {
            x_min,
            x_max,
            nodes_per_unit,
            points,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// The density the grid was requested with.
    pub fn nodes_per_unit(&self) -> f64 {
        self.nodes_per_unit
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.points.len() - 1) as f64
    }

    /// Index of the node closest to `x` (clamped to the grid).
    pub fn nearest_index(&self, x: f64) -> usize {
        let t = ((x - self.x_min) / self.step()).round();
        t.clamp(0.0, (self.len() - 1) as f64) as usize
    }
}

fn check_bounds(x_min: f64, x_max: f64) -> Result<()> {
    if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
        return Err(Error::InvalidGrid(format!(
            "need finite x_min < x_max, got [{x_min}, {x_max}]"
        )));
    }
    Ok(())
}

/// Complex samples on a shared uniform grid.
#[derive(Clone, Debug)]
pub struct SampledComplexFunction {
    grid: Arc<UniformGrid>,
    values: Vec<Complex64>,
}

impl SampledComplexFunction {
    pub fn new(grid: Arc<UniformGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<UniformGrid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().iter().map(|&x| f(x)).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: Arc<UniformGrid>) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<UniformGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.values)
    }

    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values,
        }
    }
}

pub(crate) fn max_abs(values: &[Complex64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.norm()))
}

fn check_panels(len: usize) -> Result<()> {
    if len < PANEL + 1 || (len - 1) % PANEL != 0 {
        return Err(Error::InvalidGrid(format!(
            "{len} samples do not form whole six-point panels"
        )));
    }
    Ok(())
}

/// Composite six-point Newton–Cotes integral over the whole grid.
pub fn integrate(f: &SampledComplexFunction) -> Result<Complex64> {
    integrate_values(f.values(), f.grid().step())
}

/// Slice form of [`integrate`]; `values.len() - 1` must be a multiple of five.
pub fn integrate_values(values: &[Complex64], h: f64) -> Result<Complex64> {
    check_panels(values.len())?;
    let w = &PANEL_WEIGHTS[PANEL - 1];
    let mut total = Complex64::new(0.0, 0.0);
    for panel in values.windows(PANEL + 1).step_by(PANEL) {
        let mut s = Complex64::new(0.0, 0.0);
        for (wi, v) in w.iter().zip(panel) {
            s += v * *wi;
        }
        total += s;
    }
    Ok(total * h)
}

/// `F(x_j) = ∫_{x_min}^{x_j} f`.
pub fn cumulative_from_left(f: &SampledComplexFunction) -> Result<SampledComplexFunction> {
    let out = cumulative_left_values(f.values(), f.grid().step())?;
    Ok(f.with_values(out))
}

/// `F(x_j) = ∫_{x_j}^{x_max} f`.
pub fn cumulative_from_right(f: &SampledComplexFunction) -> Result<SampledComplexFunction> {
    let out = cumulative_right_values(f.values(), f.grid().step())?;
    Ok(f.with_values(out))
}

/// Derivative at the nodes of the not-a-knot cubic spline through `f`.
pub fn spline_derivative(f: &SampledComplexFunction) -> Result<SampledComplexFunction> {
    if f.values().len() < 5 {
        return Err(Error::InvalidGrid(
            "spline differentiation needs at least 5 points".into(),
        ));
    }
    let spline = CubicSpline::new(f.grid().points().to_vec(), f.values().to_vec())?;
    Ok(f.with_values(spline.slopes().to_vec()))
}

pub fn cumulative_left_values(values: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    panel_sweep(values, h, None, &mut out)?;
    Ok(out)
}

pub fn cumulative_right_values(values: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
    let reversed: Vec<Complex64> = values.iter().rev().copied().collect();
    let mut out = cumulative_left_values(&reversed, h)?;
    out.reverse();
    Ok(out)
}

/// `D(x_j) = ∫_{x_0}^{x_j} e^{-(x_j - s)} F(s) ds`, computed panel by panel
/// so the exponential never exceeds `e^{5h}` whatever the interval length.
pub fn damped_cumulative_left_values(values: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    panel_sweep(values, h, Some(1.0), &mut out)?;
    Ok(out)
}

/// `D(x_j) = ∫_{x_j}^{x_end} e^{-(s - x_j)} F(s) ds`.
pub fn damped_cumulative_right_values(values: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
    let reversed: Vec<Complex64> = values.iter().rev().copied().collect();
    let mut out = damped_cumulative_left_values(&reversed, h)?;
    out.reverse();
    Ok(out)
}

fn panel_sweep(
    values: &[Complex64],
    h: f64,
    decay: Option<f64>,
    out: &mut [Complex64],
) -> Result<()> {
    check_panels(values.len())?;
    // weights[j][i]: contribution of panel node i to the integral up to node j + 1
    let mut weights = [[0.0f64; 6]; 5];
    let mut carry = [1.0f64; 5];
    for j in 0..PANEL {
        for i in 0..=PANEL {
            let damp = decay.map_or(1.0, |k| (-k * (j as f64 + 1.0 - i as f64) * h).exp());
            weights[j][i] = PANEL_WEIGHTS[j][i] * h * damp;
        }
        if let Some(k) = decay {
            carry[j] = (-k * (j as f64 + 1.0) * h).exp();
        }
    }
    out[0] = Complex64::new(0.0, 0.0);
    let mut start = Complex64::new(0.0, 0.0);
    for (p, panel) in values.windows(PANEL + 1).step_by(PANEL).enumerate() {
        let base = p * PANEL;
        for j in 0..PANEL {
            let mut s = Complex64::new(0.0, 0.0);
            for (w, v) in weights[j].iter().zip(panel) {
                s += v * *w;
            }
            out[base + j + 1] = start * carry[j] + s;
        }
        start = out[base + PANEL];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sampled(grid: UniformGrid, f: impl Fn(f64) -> Complex64) -> SampledComplexFunction {
        SampledComplexFunction::from_fn(Arc::new(grid), f)
    }

    #[test]
    fn grid_rounds_up_to_whole_panels() {
        let g = UniformGrid::new(-12.0, 12.0, 1500.0).unwrap();
        assert_eq!(g.len(), 36001);
        assert_eq!(g.points()[18000], 0.0);
        let g = UniformGrid::new(0.0, 1.0, 7.0).unwrap();
        assert_eq!(g.len(), 11);
        assert!((g.step() - 0.1).abs() < 1e-15);
        assert!(UniformGrid::with_count(0.0, 1.0, 100).is_err());
        assert!(UniformGrid::new(1.0, 0.0, 10.0).is_err());
    }

    #[test]
    fn integrates_linear_and_quintic_exactly() {
        let f = sampled(UniformGrid::with_count(0.0, 1.0, 101).unwrap(), c);
        assert!((integrate(&f).unwrap() - c(0.5)).norm() < 1e-14);
        let f = sampled(UniformGrid::with_count(0.0, 1.0, 101).unwrap(), |x| c(x.powi(5)));
        assert!((integrate(&f).unwrap() - c(1.0 / 6.0)).norm() < 1e-13);
    }

    #[test]
    fn integrates_sine() {
        let f = sampled(UniformGrid::with_count(0.0, PI, 1501).unwrap(), |x| c(x.sin()));
        assert!((integrate(&f).unwrap() - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_short_or_ragged_input() {
        let h = 0.1;
        assert!(integrate_values(&[c(1.0); 5], h).is_err());
        assert!(integrate_values(&[c(1.0); 8], h).is_err());
        assert!(cumulative_left_values(&[c(1.0); 4], h).is_err());
    }

    #[test]
    fn cumulative_of_zero_and_one() {
        let g = UniformGrid::new(0.0, 2.0, 50.0).unwrap();
        let zero = sampled(g.clone(), |_| c(0.0));
        assert!(cumulative_from_left(&zero).unwrap().max_abs() == 0.0);
        assert!(cumulative_from_right(&zero).unwrap().max_abs() == 0.0);

        let one = sampled(g.clone(), |_| c(1.0));
        let left = cumulative_from_left(&one).unwrap();
        let right = cumulative_from_right(&one).unwrap();
        for (i, &x) in g.points().iter().enumerate() {
            assert!((left.values()[i] - c(x)).norm() < 1e-13);
            assert!((right.values()[i] - c(2.0 - x)).norm() < 1e-13);
        }
    }

    #[test]
    fn cumulative_cosine_matches_sine() {
        let g = UniformGrid::new(0.0, PI, 1500.0).unwrap();
        let f = sampled(g.clone(), |x| c(x.cos()));
        let left = cumulative_from_left(&f).unwrap();
        let err = g
            .points()
            .iter()
            .zip(left.values())
            .map(|(x, v)| (v - c(x.sin())).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-10, "{err}");
    }

    #[test]
    fn left_plus_right_is_total() {
        let g = UniformGrid::new(-3.0, 2.0, 40.0).unwrap();
        let f = sampled(g, |x| Complex64::new((2.0 * x).sin(), x * x - 1.0));
        let total = integrate(&f).unwrap();
        let left = cumulative_from_left(&f).unwrap();
        let right = cumulative_from_right(&f).unwrap();
        assert!((left.values()[left.values().len() - 1] - total).norm() <= 1e-12 * total.norm());
        for (l, r) in left.values().iter().zip(right.values()) {
            assert!((l + r - total).norm() < 1e-12);
        }
    }

    #[test]
    fn interior_panel_nodes_are_quintic_exact() {
        let g = UniformGrid::with_count(0.0, 1.0, 11).unwrap();
        let poly = |x: f64| 1.0 - 2.0 * x + 3.0 * x.powi(4) + x.powi(5);
        let anti = |x: f64| x - x * x + 0.6 * x.powi(5) + x.powi(6) / 6.0;
        let f = sampled(g.clone(), |x| c(poly(x)));
        let left = cumulative_from_left(&f).unwrap();
        for (x, v) in g.points().iter().zip(left.values()) {
            assert!((v.re - anti(*x)).abs() < 1e-14);
        }
    }

    #[test]
    fn damped_cumulative_matches_closed_form() {
        // ∫_0^x e^{-(x-s)} ds = 1 - e^{-x}; values far to the right would
        // overflow an undamped e^{s} formulation.
        let g = UniformGrid::new(0.0, 800.0, 100.0).unwrap();
        let ones = vec![c(1.0); g.len()];
        let d = damped_cumulative_left_values(&ones, g.step()).unwrap();
        for (x, v) in g.points().iter().zip(&d) {
            assert!((v.re - (1.0 - (-x).exp())).abs() < 1e-12);
        }
        let d = damped_cumulative_right_values(&ones, g.step()).unwrap();
        for (x, v) in g.points().iter().zip(&d) {
            assert!((v.re - (1.0 - (-(800.0 - x)).exp())).abs() < 1e-12);
        }
    }

    #[test]
    fn spline_derivative_of_polynomials() {
        let g = UniformGrid::new(-1.0, 1.0, 50.0).unwrap();
        let f = sampled(g.clone(), |x| c(x * x));
        let d = spline_derivative(&f).unwrap();
        for (x, v) in g.points().iter().zip(d.values()) {
            assert!((v.re - 2.0 * x).abs() < 1e-10);
        }
        let f = sampled(g, |_| Complex64::new(3.0, -1.0));
        assert!(spline_derivative(&f).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn spline_derivative_of_sech() {
        let g = UniformGrid::new(-10.0, 10.0, 1500.0).unwrap();
        let f = sampled(g.clone(), |x| c(1.0 / x.cosh()));
        let d = spline_derivative(&f).unwrap();
        let err = g
            .points()
            .iter()
            .zip(d.values())
            .map(|(x, v)| (v.re + x.tanh() / x.cosh()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-8, "{err}");
    }

    #[test]
    fn spline_needs_five_points() {
        let g = Arc::new(UniformGrid::with_count(0.0, 1.0, 6).unwrap());
        let f = SampledComplexFunction::new(g, vec![c(1.0); 6]).unwrap();
        assert!(spline_derivative(&f).is_ok());
        assert!(CubicSpline::new(vec![0.0, 1.0, 2.0], vec![c(0.0); 3]).is_err());
    }

    #[test]
    fn derivative_then_integral_recovers_function() {
        let g = UniformGrid::new(-4.0, 4.0, 200.0).unwrap();
        let f = sampled(g, |x| Complex64::new((-x * x).exp(), (0.5 * x).sin()));
        let d = spline_derivative(&f).unwrap();
        let back = cumulative_from_left(&d).unwrap();
        let f0 = f.values()[0];
        for (b, v) in back.values().iter().zip(f.values()) {
            assert!((b - (v - f0)).norm() < 1e-8);
        }
    }
}
