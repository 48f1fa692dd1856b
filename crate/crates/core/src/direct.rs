//! Direct transform: scattering coefficients on the real line, eigenvalues
//! and norming constants from the power-series coefficients at one node.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid_quad::{SampledComplexFunction, UniformGrid};
use crate::potentials::{evaluate, PotentialSpec, TruncatedDomain};
use crate::roots::{horner, poly_mul, polish_newton, polynomial_roots};
use crate::scattering::{ScatteringData, ScatteringMeta};
use crate::spps::{build_table_with, CoefficientColumn, JostKind, SppsOptions, SppsTable, SpectralPoint};
use crate::zs_base::{solve_base, zeroth_coefficients};

/// `z = (1/2 + iρ)/(1/2 − iρ)` together with `z̃ = 1/z`.
pub fn rho_to_z(rho: Complex64) -> Result<SpectralPoint> {
    if rho == Complex64::new(0.0, -0.5) {
        return Err(Error::Pole("ρ = −i/2 is a pole of z(ρ)".into()));
    }
    Ok(SpectralPoint::new(rho))
}

/// `ρ = (z − 1) / (2i (z + 1))`.
pub fn z_to_rho(z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(-1.0, 0.0) {
        return Err(Error::Pole("z = −1 is a pole of ρ(z)".into()));
    }
    Ok((z - 1.0) / (Complex64::new(0.0, 2.0) * (z + 1.0)))
}

/// Power-series polynomials at an anchor node `x0`: coefficient `n` of
/// `b1` is `(−1)ⁿ b_{1,n}(x0)`, and so on.
#[derive(Clone, Debug, PartialEq)]
pub struct SppsPolynomials {
    pub a1: Vec<Complex64>,
    pub a2: Vec<Complex64>,
    pub b1: Vec<Complex64>,
    pub b2: Vec<Complex64>,
    pub anchor: f64,
}

impl SppsPolynomials {
    pub fn from_column(col: &CoefficientColumn, anchor: f64) -> Self {
        let alt = |v: &[Complex64]| {
            v.iter()
                .enumerate()
                .map(|(n, c)| if n % 2 == 0 { *c } else { -*c })
                .collect()
        };
        Self {
            a1: alt(&col.a1),
            a2: alt(&col.a2),
            b1: alt(&col.b1),
            b2: alt(&col.b2),
            anchor,
        }
    }

    pub fn from_table(table: &SppsTable, x_index: usize) -> Result<Self> {
        let col = table.column(x_index)?;
        Ok(Self::from_column(&col, table.grid().points()[x_index]))
    }

    pub fn order(&self) -> usize {
        self.a1.len() - 1
    }

    /// Coefficients of `(1+(z+1)B1)(1+(z+1)A2) − (z+1)² B2 A1`, degree `2N+2`.
    pub fn a_polynomial(&self) -> Vec<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let zp1 = [one, one];
        let mut p1 = poly_mul(&zp1, &self.b1);
        p1[0] += one;
        let mut p2 = poly_mul(&zp1, &self.a2);
        p2[0] += one;
        let p3 = poly_mul(&poly_mul(&zp1, &zp1), &poly_mul(&self.b2, &self.a1));
        let mut p = poly_mul(&p1, &p2);
        for (i, v) in p3.iter().enumerate() {
            p[i] -= v;
        }
        p
    }

    fn sums(&self, z: Complex64) -> [Complex64; 4] {
        [
            horner(&self.a1, z),
            horner(&self.a2, z),
            horner(&self.b1, z),
            horner(&self.b2, z),
        ]
    }

    /// `(φ₁, φ₂, ψ₁, ψ₂)` at the anchor with the exponential factors removed.
    fn stripped_jost(&self, z: Complex64) -> [Complex64; 4] {
        let [sa1, sa2, sb1, sb2] = self.sums(z);
        let zp1 = z + 1.0;
        [1.0 + zp1 * sb1, zp1 * sb2, zp1 * sa1, 1.0 + zp1 * sa2]
    }
}

const DISK_SLACK: f64 = 1e-12;

/// Truncated-series `a(ρ)`, valid on the closed upper half plane.
pub fn evaluate_a(polys: &SppsPolynomials, point: &SpectralPoint) -> Result<Complex64> {
    let z = point.z;
    if !(z.norm() <= 1.0 + DISK_SLACK) {
        return Err(Error::SpectralDomain(format!(
            "a(ρ) needs |z| ≤ 1, got |z| = {} at ρ = {}",
            z.norm(),
            point.rho
        )));
    }
    let [p1, p2, s1, s2] = polys.stripped_jost(z);
    Ok(p1 * s2 - p2 * s1)
}

/// Truncated-series `b(ρ)` for real ρ.
pub fn evaluate_b(polys: &SppsPolynomials, point: &SpectralPoint) -> Result<Complex64> {
    if point.rho.im != 0.0 || !point.rho.re.is_finite() {
        return Err(Error::SpectralDomain(format!(
            "b(ρ) is defined for real ρ only, got {}",
            point.rho
        )));
    }
    let z = point.z;
    let zb = z.conj();
    let zp1 = z + 1.0;
    let zbp1 = zb + 1.0;
    let b1 = horner(&polys.b1, z);
    let b2 = horner(&polys.b2, z);
    let conj_eval = |c: &[Complex64]| horner_conj(c, zb);
    let a1c = conj_eval(&polys.a1);
    let a2c = conj_eval(&polys.a2);
    let core = zp1 * b2 * (1.0 + zbp1 * a2c) + zbp1 * (1.0 + zp1 * b1) * a1c;
    let x0 = polys.anchor;
    Ok(core * Complex64::new(0.0, -2.0 * point.rho.re * x0).exp())
}

/// `Σ conj(c[n]) wⁿ`.
fn horner_conj(c: &[Complex64], w: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, v| acc * w + v.conj())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    /// Roots with `|z| > 1 − disk_margin` are discarded.
    pub disk_margin: f64,
    /// Accept a root only if `|a_N(z)| ≤ residual_tol · max_{|w|=1} |a_N(w)|`.
    pub residual_tol: f64,
    /// The two norming-constant quotients must agree to this relative tolerance.
    pub quotient_tol: f64,
    /// Quotient denominators below this are unusable.
    pub denominator_floor: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            disk_margin: 1e-6,
            residual_tol: 1e-8,
            quotient_tol: 1e-6,
            denominator_floor: 1e-12,
        }
    }
}

/// An accepted eigenvalue with its quality metrics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigenvalue {
    pub z: Complex64,
    pub rho: Complex64,
    pub norming_constant: Complex64,
    /// `|c_first − c_second| / |c|` between the two quotients.
    pub quotient_discrepancy: f64,
    /// `|a_N(z)|` relative to the maximum of `|a_N|` on the unit circle.
    pub residual: f64,
}

/// Norming constant from one of the two quotients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormingConstant {
    pub value: Complex64,
    pub discrepancy: f64,
}

fn choose_quotient(
    num1: Complex64,
    den1: Complex64,
    num2: Complex64,
    den2: Complex64,
    floor: f64,
    z: Complex64,
) -> Result<NormingConstant> {
    if den1.norm() < floor && den2.norm() < floor {
        return Err(Error::DegenerateEigenvector { z: z.to_string() });
    }
    let c1 = num1 / den1;
    let c2 = num2 / den2;
    let value = if den1.norm() >= den2.norm() { c1 } else { c2 };
    let discrepancy = if den1.norm() < floor || den2.norm() < floor {
        0.0
    } else {
        (c1 - c2).norm() / value.norm().max(f64::MIN_POSITIVE)
    };
    Ok(NormingConstant { value, discrepancy })
}

/// `c_m` from `φ = c_m ψ` at grid node `x_index`, using the series
/// evaluation of the Jost solutions.
pub fn norming_constant(table: &SppsTable, z: Complex64, x_index: usize) -> Result<NormingConstant> {
    if !(z.norm() < 1.0) {
        return Err(Error::SpectralDomain(format!("|z| = {} is not inside the disk", z.norm())));
    }
    let point = SpectralPoint::new(z_to_rho(z)?);
    let phi = table.evaluate_jost(&point, JostKind::Phi, x_index)?;
    let psi = table.evaluate_jost(&point, JostKind::Psi, x_index)?;
    // the exponentials make the raw components tiny or huge away from x = 0
    let scale = (Complex64::i() * point.rho * table.grid().points()[x_index]).exp().norm();
    choose_quotient(phi[0], psi[0], phi[1], psi[1], 1e-12 * scale, z)
}

/// Zeros of the degree-`2N+2` polynomial `a_N(z)` inside the unit disk that
/// pass the residual and quotient checks, sorted by decreasing `Im ρ`.
pub fn find_eigenvalues(polys: &SppsPolynomials, opts: &EigenOptions) -> Result<Vec<Eigenvalue>> {
    let p = polys.a_polynomial();
    let roots = polynomial_roots(&p)?;
    let circle_max = (0..1024)
        .map(|k| {
            let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 1024.0);
            horner(&p, w).norm()
        })
        .fold(0.0, f64::max);
    let mut out = Vec::new();
    for z0 in roots {
        if !(z0.norm() <= 1.0 - opts.disk_margin) {
            continue;
        }
        let z = polish_newton(&p, z0, 8);
        if !(z.norm() <= 1.0 - opts.disk_margin) {
            continue;
        }
        let residual = horner(&p, z).norm() / circle_max.max(f64::MIN_POSITIVE);
        if !(residual <= opts.residual_tol) {
            continue;
        }
        let rho = z_to_rho(z)?;
        let [p1, p2, s1, s2] = polys.stripped_jost(z);
        let nc = match choose_quotient(p1, s1, p2, s2, opts.denominator_floor, z) {
            Ok(nc) => nc,
            Err(_) => continue,
        };
        if !(nc.discrepancy <= opts.quotient_tol) {
            continue;
        }
        let phase = Complex64::new(0.0, -2.0) * rho * polys.anchor;
        out.push(Eigenvalue {
            z,
            rho,
            norming_constant: nc.value * phase.exp(),
            quotient_discrepancy: nc.discrepancy,
            residual,
        });
    }
    out.sort_by(|a, b| b.rho.im.total_cmp(&a.rho.im));
    Ok(out)
}

/// Real spectral sample points.
#[derive(Clone, Debug, PartialEq)]
pub enum RhoGrid {
    /// `k/2` points `10^α`, α uniform on `[log10 min, log10 max]`, plus their
    /// negatives; `k` must be even.
    LogSymmetric { k: usize, min: f64, max: f64 },
    Explicit(Vec<f64>),
}

impl Default for RhoGrid {
    fn default() -> Self {
        Self::LogSymmetric {
            k: 5000,
            min: 1e-3,
            max: 70.0,
        }
    }
}

impl RhoGrid {
    pub fn log_symmetric(k: usize) -> Self {
        Self::LogSymmetric { k, min: 1e-3, max: 70.0 }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        match *self {
            Self::LogSymmetric { k, min, max } => {
                if k < 2 || k % 2 != 0 {
                    return Err(Error::Configuration(format!("K = {k} must be even and at least 2")));
                }
                if !(min > 0.0 && max > min && max.is_finite()) {
                    return Err(Error::Configuration(format!("bad ρ range [{min}, {max}]")));
                }
                let half = k / 2;
                let (l0, l1) = (min.log10(), max.log10());
                let pos: Vec<f64> = (0..half)
                    .map(|j| {
                        let t = if half == 1 { 0.0 } else { j as f64 / (half - 1) as f64 };
                        10f64.powf(l0 + (l1 - l0) * t)
                    })
                    .collect();
                Ok(pos.iter().rev().map(|r| -r).chain(pos.iter().copied()).collect())
            }
            Self::Explicit(ref v) => {
                if v.is_empty() || v.windows(2).any(|w| !(w[1] > w[0])) || v.iter().any(|r| !r.is_finite()) {
                    return Err(Error::Configuration("ρ samples must be finite and increasing".into()));
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct DirectConfig {
    pub order: usize,
    pub domain: TruncatedDomain,
    pub nodes_per_unit: f64,
    pub rho_grid: RhoGrid,
    pub eigen: EigenOptions,
}

impl DirectConfig {
    pub fn new(order: usize, domain: TruncatedDomain) -> Self {
        Self {
            order,
            domain,
            nodes_per_unit: 1500.0,
            rho_grid: RhoGrid::default(),
            eigen: EigenOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DirectResult {
    pub data: ScatteringData,
    pub eigenvalues: Vec<Eigenvalue>,
    pub polynomials: SppsPolynomials,
    pub base_iterations: (usize, usize),
    /// `|W[φ(i/2); ψ(i/2)]|` spread over the grid.
    pub base_wronskian_spread: f64,
}

/// Samples the potential and runs [`run_direct_on`].
pub fn run_direct(spec: &PotentialSpec, cfg: &DirectConfig) -> Result<DirectResult> {
    let grid = Arc::new(UniformGrid::new(cfg.domain.x_min, cfg.domain.x_max, cfg.nodes_per_unit)?);
    let q = evaluate(spec, &grid)?;
    run_direct_on(&q, cfg)
}

/// Base solve, coefficient recurrences at the node nearest `x = 0`,
/// `a` and `b` on the ρ grid, eigenvalues and norming constants.
pub fn run_direct_on(q: &SampledComplexFunction, cfg: &DirectConfig) -> Result<DirectResult> {
    let rho = cfg.rho_grid.points()?;
    let grid = q.grid();
    let base = solve_base(q)?;
    let zeroth = zeroth_coefficients(&base, q);
    let anchor = grid.nearest_index(0.0);
    let opts = SppsOptions::new(cfg.order).keep(vec![anchor]);
    let table = build_table_with(q, &base, &zeroth, &opts)?;
    let polys = SppsPolynomials::from_table(&table, anchor)?;

    let ab: Vec<(Complex64, Complex64)> = rho
        .par_iter()
        .map(|&r| {
            let pt = SpectralPoint::real(r);
            Ok((evaluate_a(&polys, &pt)?, evaluate_b(&polys, &pt)?))
        })
        .collect::<Result<_>>()?;
    let (a, b): (Vec<_>, Vec<_>) = ab.into_iter().unzip();
    let eigenvalues = find_eigenvalues(&polys, &cfg.eigen)?;

    let w: Vec<f64> = base.wronskian().iter().map(|v| v.norm()).collect();
    let spread = w.iter().cloned().fold(f64::MIN, f64::max) - w.iter().cloned().fold(f64::MAX, f64::min);

    let data = ScatteringData {
        meta: ScatteringMeta {
            n: cfg.order,
            k: rho.len(),
            domain: (grid.x_min(), grid.x_max()),
            nodes_per_unit: cfg.nodes_per_unit,
            t: 0.0,
        },
        rho,
        a,
        b,
        eigenvalues: eigenvalues.iter().map(|e| e.rho).collect(),
        norming_constants: eigenvalues.iter().map(|e| e.norming_constant).collect(),
    };
    Ok(DirectResult {
        data,
        eigenvalues,
        polynomials: polys,
        base_iterations: base.iterations,
        base_wronskian_spread: spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn mobius_map_special_points() {
        assert_eq!(rho_to_z(Complex64::new(0.0, 0.5)).unwrap().z, Complex64::new(0.0, 0.0));
        assert_eq!(rho_to_z(Complex64::new(0.0, 0.0)).unwrap().z, Complex64::new(1.0, 0.0));
        assert!(matches!(rho_to_z(Complex64::new(0.0, -0.5)), Err(Error::Pole(_))));
        assert!(matches!(z_to_rho(Complex64::new(-1.0, 0.0)), Err(Error::Pole(_))));
        let rho = Complex64::new(0.5, PI / 2.0);
        let p = rho_to_z(rho).unwrap();
        assert!(p.z.norm() < 1.0);
        assert!((z_to_rho(p.z).unwrap() - rho).norm() < 1e-15);
    }

    #[test]
    fn mobius_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let rho = Complex64::new(rng.gen_range(-20.0..20.0), rng.gen_range(0.0..20.0));
            let back = z_to_rho(rho_to_z(rho).unwrap().z).unwrap();
            assert!((back - rho).norm() <= 1e-14 * rho.norm().max(1.0), "{rho} -> {back}");
        }
    }

    #[test]
    fn log_symmetric_grid() {
        let r = RhoGrid::log_symmetric(10).points().unwrap();
        assert_eq!(r.len(), 10);
        assert!((r[5] - 1e-3).abs() < 1e-18 && (r[9] - 70.0).abs() < 1e-12);
        assert_eq!(r[0], -r[9]);
        assert!(r.windows(2).all(|w| w[1] > w[0]));
        assert!(RhoGrid::log_symmetric(7).points().is_err());
        assert!(RhoGrid::Explicit(vec![1.0, 0.0]).points().is_err());
    }

    #[test]
    fn zero_potential_direct() {
        let domain = TruncatedDomain::user(-5.0, 5.0).unwrap();
        let mut cfg = DirectConfig::new(10, domain);
        cfg.nodes_per_unit = 50.0;
        cfg.rho_grid = RhoGrid::log_symmetric(50);
        let r = run_direct(&PotentialSpec::zero(), &cfg).unwrap();
        assert!(r.data.a.iter().all(|a| *a == Complex64::new(1.0, 0.0)));
        assert!(r.data.b.iter().all(|b| b.norm() == 0.0));
        assert!(r.data.eigenvalues.is_empty());
    }

    #[test]
    fn b_rejects_complex_rho_and_a_rejects_lower_half_plane() {
        let polys = SppsPolynomials {
            a1: vec![Complex64::new(0.0, 0.0)],
            a2: vec![Complex64::new(0.0, 0.0)],
            b1: vec![Complex64::new(0.0, 0.0)],
            b2: vec![Complex64::new(0.0, 0.0)],
            anchor: 0.0,
        };
        assert!(evaluate_b(&polys, &SpectralPoint::new(Complex64::new(1.0, 0.1))).is_err());
        assert!(evaluate_a(&polys, &SpectralPoint::new(Complex64::new(1.0, -0.1))).is_err());
        assert_eq!(evaluate_a(&polys, &SpectralPoint::new(Complex64::new(1.0, 0.1))).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn soliton_eigenvalue_and_unitarity_on_a_coarse_grid() {
        let spec = PotentialSpec::soliton(0.5, PI / 2.0, 0.1, 0.1);
        let mut cfg = DirectConfig::new(60, TruncatedDomain::user(-12.0, 12.0).unwrap());
        cfg.nodes_per_unit = 400.0;
        cfg.rho_grid = RhoGrid::log_symmetric(400);
        let r = run_direct(&spec, &cfg).unwrap();
        assert_eq!(r.eigenvalues.len(), 1);
        assert!((r.eigenvalues[0].rho - Complex64::new(0.5, PI / 2.0)).norm() < 1e-8);
        assert!(r.data.unitarity_defect() < 1e-8);
    }

    #[test]
    fn anchored_polynomials_agree_with_origin() {
        // a is anchor-independent; b and c pick up e^{−2iρx0}, which the
        // evaluators undo. Agreement is limited by the coarse grid.
        let spec = PotentialSpec::soliton(0.5, PI / 2.0, 0.1, 0.1);
        let grid = Arc::new(UniformGrid::new(-12.0, 12.0, 300.0).unwrap());
        let q = evaluate(&spec, &grid).unwrap();
        let base = solve_base(&q).unwrap();
        let z = zeroth_coefficients(&base, &q);
        let i0 = grid.nearest_index(0.0);
        let i1 = grid.nearest_index(0.7);
        let t = build_table_with(&q, &base, &z, &SppsOptions::new(60).keep(vec![i0, i1])).unwrap();
        let p0 = SppsPolynomials::from_table(&t, i0).unwrap();
        let p1 = SppsPolynomials::from_table(&t, i1).unwrap();
        for r in [-2.0, -0.3, 0.0, 0.8, 3.0] {
            let pt = SpectralPoint::real(r);
            assert!((evaluate_a(&p0, &pt).unwrap() - evaluate_a(&p1, &pt).unwrap()).norm() < 1e-7);
            assert!((evaluate_b(&p0, &pt).unwrap() - evaluate_b(&p1, &pt).unwrap()).norm() < 1e-7);
        }
        let e0 = find_eigenvalues(&p0, &EigenOptions::default()).unwrap();
        let e1 = find_eigenvalues(&p1, &EigenOptions::default()).unwrap();
        assert!((e0[0].norming_constant - e1[0].norming_constant).norm() < 1e-8);
        let direct = norming_constant(&t, e1[0].z, i1).unwrap();
        assert!((direct.value - e0[0].norming_constant).norm() < 1e-8);
        assert!(direct.discrepancy < 1e-8);
    }
}
