//! Inverse transform: per-x overdetermined linear systems for the truncated
//! coefficient blocks, least-squares solution, and recovery of `q` from the
//! zeroth coefficients.
//!
//! Unknowns at a fixed `x` are ordered
//! `[b_{1,0..N} | a_{1,0..N} | conj(a_{2,0..N}) | conj(b_{2,0..N})]`.
//! With `v_n(z) = (z+1)(−z)ⁿ` and `e = e^{−iρx}` the rows are, for every
//! real sample,
//!
//! ```text
//! e Σb1ₙvₙ − b ē Σa1ₙvₙ − a e Σā2ₙv̄ₙ          = (a − 1) e
//! ā ē Σa1ₙvₙ − b̄ e Σā2ₙv̄ₙ + ē Σb̄2ₙv̄ₙ          = b̄ e
//! ```
//!
//! and for every eigenvalue `ρₘ` with norming constant `cₘ`
//!
//! ```text
//! e^{−iρₘx} Σb1ₙvₙ(zₘ) − cₘ e^{iρₘx} Σa1ₙvₙ(zₘ)              = −e^{−iρₘx}
//! −c̄ₘ e^{−iρ̄ₘx} Σā2ₙv̄ₙ(zₘ) + e^{iρ̄ₘx} Σb̄2ₙv̄ₙ(zₘ)          = c̄ₘ e^{−iρ̄ₘx}
//! ```
//!
//! The eigenvalue rows are imposed exactly (they come from identities at
//! isolated points and carry no sampling noise); the real-line rows are
//! solved in the least-squares sense within the constraint null space.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::direct::rho_to_z;
use crate::grid_quad::{spline_derivative, SampledComplexFunction, UniformGrid};
use crate::linalg::{cholesky, cholesky_condition, cholesky_solve, HouseholderQr};
use crate::scattering::ScatteringData;
use crate::{Error, Result};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Default spacing of the recovery grid.
pub const DEFAULT_X_STEP: f64 = 0.01;
/// Denominator floor in the potential reconstruction.
pub const RECOVERY_FLOOR: f64 = 1e-10;
/// Condition estimate above which the automatic ridge is switched on.
pub const AUTO_RIDGE_CONDITION: f64 = 1e12;
/// Relative size of the automatic ridge.
pub const AUTO_RIDGE_SCALE: f64 = 1e-12;

/// How the constrained least-squares problem is factored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LsqMethod {
    /// Gram matrix assembled from Toeplitz/Hankel moment sums, reduced to
    /// the constraint null space and factored by Cholesky. `O(KN)` per x.
    #[default]
    Structured,
    /// Householder QR of the full dense system. `O(KN²)` per x.
    Householder,
}

#[derive(Clone, Debug)]
pub struct InverseConfig {
    /// Truncation order: `N` coefficients per block.
    pub n: usize,
    /// Number of real samples used; `None` takes all of them. A smaller
    /// value picks evenly spread indices.
    pub k: Option<usize>,
    pub x_grid: Arc<UniformGrid>,
    /// Tikhonov parameter `λ` (objective `‖Au − r‖² + λ²‖u‖²`).
    pub regularization: f64,
    pub residual_report: bool,
    pub method: LsqMethod,
}

impl InverseConfig {
    pub fn new(n: usize, x_grid: Arc<UniformGrid>) -> Self {
        Self {
            n,
            k: None,
            x_grid,
            regularization: 0.0,
            residual_report: false,
            method: LsqMethod::default(),
        }
    }

    /// Recovery grid on `[lo, hi]` with spacing close to `step`.
    pub fn on_domain(n: usize, domain: (f64, f64), step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::Configuration(format!("x step must be positive, got {step}")));
        }
        let grid = UniformGrid::new(domain.0, domain.1, 1.0 / step)?;
        Ok(Self::new(n, Arc::new(grid)))
    }
}

/// Dense system at one `x`, row-major.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub rows: usize,
    pub cols: usize,
    pub matrix: Vec<C>,
    pub rhs: Vec<C>,
}

/// Solution of one per-x system.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSolution {
    pub x: f64,
    /// The unknown vector in the documented block order.
    pub unknowns: Vec<C>,
    /// `‖Au − r‖/‖r‖` when requested.
    pub residual: Option<f64>,
    /// `λ` actually used (user value or automatic).
    pub ridge: f64,
    pub condition: f64,
}

impl PointSolution {
    fn n(&self) -> usize {
        self.unknowns.len() / 4
    }

    pub fn b1(&self) -> &[C] {
        &self.unknowns[..self.n()]
    }

    pub fn a1(&self) -> &[C] {
        let n = self.n();
        &self.unknowns[n..2 * n]
    }

    pub fn a2(&self) -> Vec<C> {
        let n = self.n();
        self.unknowns[2 * n..3 * n].iter().map(|c| c.conj()).collect()
    }

    pub fn b2(&self) -> Vec<C> {
        let n = self.n();
        self.unknowns[3 * n..].iter().map(|c| c.conj()).collect()
    }

    /// `(a10, a20, b10, b20)`.
    pub fn zeroth(&self) -> (C, C, C, C) {
        let n = self.n();
        (
            self.unknowns[n],
            self.unknowns[2 * n].conj(),
            self.unknowns[0],
            self.unknowns[3 * n].conj(),
        )
    }
}

#[derive(Clone, Debug)]
pub struct InverseSolveResult {
    pub q_recovered: SampledComplexFunction,
    pub b10: SampledComplexFunction,
    pub b20: SampledComplexFunction,
    pub a10: SampledComplexFunction,
    pub a20: SampledComplexFunction,
    /// Per-x relative residuals; empty unless `residual_report` is set.
    pub ls_residuals: Vec<f64>,
    pub wronskian_epsilon: f64,
    /// Number of x values where a nonzero ridge was applied.
    pub regularized_points: usize,
    pub max_condition: f64,
}

struct Eigen {
    rho: C,
    zp1: C,
    /// `(−zₘ)ⁿ`, `n < N`.
    powers: Vec<C>,
    c: C,
}

/// Precomputed x-independent parts of the per-x systems.
pub struct InverseSolver {
    n: usize,
    regularization: f64,
    method: LsqMethod,
    residual_report: bool,
    rho: Vec<f64>,
    a: Vec<C>,
    b: Vec<C>,
    z: Vec<C>,
    zp1: Vec<C>,
    w2: Vec<f64>,
    /// `(−z_k)^j`, `j < 2N − 1`, row-major by sample.
    powers: Vec<C>,
    eigen: Vec<Eigen>,
    toe_one: (Vec<C>, Vec<C>),
    toe_ab: (Vec<C>, Vec<C>),
    hankel: Vec<C>,
    g_b1: Vec<C>,
    g_a2: Vec<C>,
    rhs_norm_real: f64,
}

fn subsample(avail: usize, k: usize) -> Vec<usize> {
    if k >= avail {
        return (0..avail).collect();
    }
    if k == 1 {
        return vec![0];
    }
    (0..k)
        .map(|i| ((i as f64) * (avail - 1) as f64 / (k - 1) as f64).round() as usize)
        .collect()
}

fn horner(coeffs: &[C], w: C) -> C {
    coeffs.iter().rev().fold(ZERO, |acc, c| acc * w + c)
}

fn toe(t: &(Vec<C>, Vec<C>), m: usize, n: usize) -> C {
    if n >= m {
        t.0[n - m]
    } else {
        t.1[m - n]
    }
}

impl InverseSolver {
    pub fn new(sd: &ScatteringData, cfg: &InverseConfig) -> Result<Self> {
        let n = cfg.n;
        if n == 0 {
            return Err(Error::Configuration("inverse truncation order must be positive".into()));
        }
        if !(cfg.regularization >= 0.0) || !cfg.regularization.is_finite() {
            return Err(Error::Configuration(format!(
                "regularization must be a nonnegative number, got {}",
                cfg.regularization
            )));
        }
        let avail = sd.rho.len();
        if sd.a.len() != avail || sd.b.len() != avail {
            return Err(Error::Configuration("scattering data arrays differ in length".into()));
        }
        if sd.eigenvalues.len() != sd.norming_constants.len() {
            return Err(Error::Configuration(
                "eigenvalue and norming constant counts differ".into(),
            ));
        }
        let k = cfg.k.unwrap_or(avail);
        if k == 0 || k > avail {
            return Err(Error::Configuration(format!(
                "K = {k} samples requested, {avail} available"
            )));
        }
        let m = sd.eigenvalues.len();
        if 2 * n > k + m {
            return Err(Error::Configuration(format!(
                "2N = {} exceeds K + M = {}",
                2 * n,
                k + m
            )));
        }
        let idx = subsample(avail, k);
        let rho: Vec<f64> = idx.iter().map(|&i| sd.rho[i]).collect();
        let a: Vec<C> = idx.iter().map(|&i| sd.a[i]).collect();
        let b: Vec<C> = idx.iter().map(|&i| sd.b[i]).collect();
        let z: Vec<C> = rho
            .iter()
            .map(|&r| rho_to_z(C::new(r, 0.0)).map(|p| p.z))
            .collect::<Result<_>>()?;
        let zp1: Vec<C> = z.iter().map(|z| z + 1.0).collect();
        let w2: Vec<f64> = zp1.iter().map(|c| c.norm_sqr()).collect();

        let np = 2 * n - 1;
        let mut powers = vec![ZERO; k * np];
        for (row, zk) in powers.chunks_mut(np).zip(&z) {
            let mut p = ONE;
            for slot in row.iter_mut() {
                *slot = p;
                p *= -zk;
            }
        }

        let mut eigen = Vec::with_capacity(m);
        for (&rho_m, &c) in sd.eigenvalues.iter().zip(&sd.norming_constants) {
            let zm = rho_to_z(rho_m)?.z;
            if !(rho_m.im > 0.0) || zm.norm() >= 1.0 {
                return Err(Error::Configuration(format!(
                    "eigenvalue {rho_m} is not in the upper half-plane"
                )));
            }
            let mut p = ONE;
            let powers = (0..n)
                .map(|_| {
                    let v = p;
                    p *= -zm;
                    v
                })
                .collect();
            eigen.push(Eigen { rho: rho_m, zp1: zm + 1.0, powers, c });
        }

        let moments = |w: &dyn Fn(usize) -> f64| {
            let mut pos = vec![ZERO; n];
            let mut neg = vec![ZERO; n];
            for (kk, row) in powers.chunks(np).enumerate() {
                let wk = w(kk) * w2[kk];
                for j in 0..n {
                    pos[j] += row[j] * wk;
                    neg[j] += row[j].conj() * wk;
                }
            }
            (pos, neg)
        };
        let ab2: Vec<f64> = a.iter().zip(&b).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
        let toe_one = moments(&|_| 1.0);
        let toe_ab = moments(&|kk| ab2[kk]);

        let mut hankel = vec![ZERO; np];
        let mut g_b1 = vec![ZERO; n];
        let mut g_a2 = vec![ZERO; n];
        for (kk, row) in powers.chunks(np).enumerate() {
            let h = a[kk].conj() * zp1[kk] * zp1[kk];
            for j in 0..np {
                hankel[j] += h * row[j];
            }
            let am1 = a[kk] - 1.0;
            let ga = a[kk].conj() - ab2[kk];
            for j in 0..n {
                let v = zp1[kk] * row[j];
                g_b1[j] += am1 * v.conj();
                g_a2[j] += ga * v;
            }
        }
        let rhs_norm_real = a
            .iter()
            .zip(&b)
            .map(|(a, b)| (a - 1.0).norm_sqr() + b.norm_sqr())
            .sum::<f64>();

        Ok(Self {
            n,
            regularization: cfg.regularization,
            method: cfg.method,
            residual_report: cfg.residual_report,
            rho,
            a,
            b,
            z,
            zp1,
            w2,
            powers,
            eigen,
            toe_one,
            toe_ab,
            hankel,
            g_b1,
            g_a2,
            rhs_norm_real,
        })
    }

    pub fn samples(&self) -> usize {
        self.rho.len()
    }

    pub fn unknowns(&self) -> usize {
        4 * self.n
    }

    /// The raw (unweighted) system at `x`: two rows per real sample, then
    /// two rows per eigenvalue.
    pub fn system(&self, x: f64) -> LinearSystem {
        let n = self.n;
        let cols = 4 * n;
        let k = self.samples();
        let rows = 2 * k + 2 * self.eigen.len();
        let mut matrix = vec![ZERO; rows * cols];
        let mut rhs = vec![ZERO; rows];
        let np = 2 * n - 1;
        for kk in 0..k {
            let e = C::new(0.0, -self.rho[kk] * x).exp();
            let (a, b) = (self.a[kk], self.b[kk]);
            let pw = &self.powers[kk * np..kk * np + n];
            let (r1, r2) = matrix[2 * kk * cols..(2 * kk + 2) * cols].split_at_mut(cols);
            for j in 0..n {
                let v = self.zp1[kk] * pw[j];
                let vb = v.conj();
                r1[j] = e * v;
                r1[n + j] = -b * e.conj() * v;
                r1[2 * n + j] = -a * e * vb;
                r2[n + j] = a.conj() * e.conj() * v;
                r2[2 * n + j] = -b.conj() * e * vb;
                r2[3 * n + j] = e.conj() * vb;
            }
            rhs[2 * kk] = (a - 1.0) * e;
            rhs[2 * kk + 1] = b.conj() * e;
        }
        for (mi, (r1, r2, d1, d2)) in self.eigen_rows(x).into_iter().enumerate() {
            let base = 2 * k + 2 * mi;
            matrix[base * cols..(base + 1) * cols].copy_from_slice(&r1);
            matrix[(base + 1) * cols..(base + 2) * cols].copy_from_slice(&r2);
            rhs[base] = d1;
            rhs[base + 1] = d2;
        }
        LinearSystem { rows, cols, matrix, rhs }
    }

    fn eigen_rows(&self, x: f64) -> Vec<(Vec<C>, Vec<C>, C, C)> {
        let n = self.n;
        let i = C::new(0.0, 1.0);
        self.eigen
            .iter()
            .map(|eg| {
                let em = (-i * eg.rho * x).exp();
                let emp = (i * eg.rho * x).exp();
                let ebm = (i * eg.rho.conj() * x).exp();
                let ebmm = (-i * eg.rho.conj() * x).exp();
                let mut r1 = vec![ZERO; 4 * n];
                let mut r2 = vec![ZERO; 4 * n];
                for j in 0..n {
                    let v = eg.zp1 * eg.powers[j];
                    r1[j] = em * v;
                    r1[n + j] = -eg.c * emp * v;
                    r2[2 * n + j] = -eg.c.conj() * ebmm * v.conj();
                    r2[3 * n + j] = ebm * v.conj();
                }
                (r1, r2, -em, eg.c.conj() * ebmm)
            })
            .collect()
    }

    /// Eigenvalue rows scaled to unit max entry, as `(rows, rhs)`.
    fn constraints(&self, x: f64) -> (Vec<Vec<C>>, Vec<C>) {
        let mut rows = Vec::new();
        let mut d = Vec::new();
        for (r1, r2, d1, d2) in self.eigen_rows(x) {
            for (mut r, di) in [(r1, d1), (r2, d2)] {
                let s = r.iter().map(|c| c.norm()).fold(0.0, f64::max);
                if s > 0.0 {
                    r.iter_mut().for_each(|c| *c /= s);
                    rows.push(r);
                    d.push(di / s);
                } else {
                    rows.push(r);
                    d.push(di);
                }
            }
        }
        (rows, d)
    }

    /// Gram matrix `AᴴA` and `Aᴴr` of the real-sample rows.
    fn gram(&self, x: f64) -> (Vec<C>, Vec<C>) {
        let n = self.n;
        let dim = 4 * n;
        let np = 2 * n - 1;
        let mut pos = vec![ZERO; n];
        let mut neg = vec![ZERO; n];
        let mut g_a1 = vec![ZERO; n];
        let mut g_b2 = vec![ZERO; n];
        for kk in 0..self.samples() {
            // β = b̄ e^{−2iρx}
            let beta = self.b[kk].conj() * C::new(0.0, -2.0 * self.rho[kk] * x).exp();
            let w = beta.conj() * self.w2[kk];
            let bz = beta * self.zp1[kk];
            let bzc = beta * self.zp1[kk].conj();
            let pw = &self.powers[kk * np..kk * np + n];
            for j in 0..n {
                let p = pw[j];
                pos[j] += w * p;
                neg[j] += w * p.conj();
                g_a1[j] += bzc * p.conj();
                g_b2[j] += bz * p;
            }
        }
        let toe_bs = (pos, neg);

        let mut g = vec![ZERO; dim * dim];
        let at = |bi: usize, m: usize, bj: usize, nn: usize| (bi * n + m) * dim + bj * n + nn;
        for m in 0..n {
            for nn in 0..n {
                g[at(0, m, 0, nn)] = toe(&self.toe_one, m, nn);
                g[at(1, m, 1, nn)] = toe(&self.toe_ab, m, nn);
                g[at(2, m, 2, nn)] = toe(&self.toe_ab, nn, m);
                g[at(3, m, 3, nn)] = toe(&self.toe_one, nn, m);
                g[at(0, m, 1, nn)] = -toe(&toe_bs, m, nn);
                g[at(2, m, 3, nn)] = -toe(&toe_bs, nn, m);
                g[at(0, m, 2, nn)] = -self.hankel[m + nn].conj();
                g[at(1, m, 3, nn)] = self.hankel[m + nn].conj();
            }
        }
        for (bi, bj) in [(0, 1), (2, 3), (0, 2), (1, 3)] {
            for m in 0..n {
                for nn in 0..n {
                    g[at(bj, nn, bi, m)] = g[at(bi, m, bj, nn)].conj();
                }
            }
        }
        let mut rhs = Vec::with_capacity(dim);
        rhs.extend_from_slice(&self.g_b1);
        rhs.extend_from_slice(&g_a1);
        rhs.extend_from_slice(&self.g_a2);
        rhs.extend_from_slice(&g_b2);
        (g, rhs)
    }

    /// Solves the per-x system.
    pub fn solve_at(&self, x: f64) -> Result<PointSolution> {
        let (unknowns, ridge, condition) = match self.method {
            LsqMethod::Structured => self.solve_structured(x)?,
            LsqMethod::Householder => self.solve_householder(x)?,
        };
        let residual = self.residual_report.then(|| self.residual(x, &unknowns));
        Ok(PointSolution { x, unknowns, residual, ridge, condition })
    }

    fn solve_structured(&self, x: f64) -> Result<(Vec<C>, f64, f64)> {
        let dim = 4 * self.n;
        let (mut g, mut h) = self.gram(x);
        let (rows, d) = self.constraints(x);
        let p = rows.len();
        let qr = if p > 0 {
            let cols: Vec<Vec<C>> = rows.iter().map(|r| r.iter().map(|c| c.conj()).collect()).collect();
            Some(HouseholderQr::new(cols))
        } else {
            None
        };
        let mut w = Vec::new();
        if let Some(qr) = &qr {
            w = qr.solve_rh(&d).ok_or(Error::IllConditioned { x, condition: f64::INFINITY })?;
            qr.congruence(&mut g);
            qr.apply_qh(&mut h);
        }
        // reduced system G̃₂₂ y = h₂ − G̃₂₁ w
        let red = dim - p;
        let mut a = vec![ZERO; red * red];
        let mut rhs = vec![ZERO; red];
        for i in 0..red {
            for j in 0..red {
                a[i * red + j] = g[(p + i) * dim + p + j];
            }
            let mut s = h[p + i];
            for (j, wj) in w.iter().enumerate() {
                s -= g[(p + i) * dim + j] * wj;
            }
            rhs[i] = s;
        }
        let max_diag = (0..red).map(|i| a[i * red + i].re).fold(0.0, f64::max);
        let factor = |lambda2: f64| {
            let mut l = a.clone();
            for i in 0..red {
                l[i * red + i] += lambda2;
            }
            cholesky(&mut l, red).map(|_| {
                let c = cholesky_condition(&l, red);
                (l, c)
            })
        };
        let user = self.regularization * self.regularization;
        let mut ridge = self.regularization;
        let (l, condition) = match factor(user) {
            Some((l, c)) if c <= AUTO_RIDGE_CONDITION => (l, c),
            first => {
                let lambda2 = user.max(AUTO_RIDGE_SCALE * max_diag);
                ridge = lambda2.sqrt();
                match factor(lambda2) {
                    Some(f) => f,
                    None => {
                        let condition = first.map_or(f64::INFINITY, |f| f.1);
                        return Err(Error::IllConditioned { x, condition });
                    }
                }
            }
        };
        let y = cholesky_solve(&l, red, &rhs);
        let mut u: Vec<C> = w.into_iter().chain(y).collect();
        if let Some(qr) = &qr {
            qr.apply_q(&mut u);
        }
        Ok((u, ridge, condition))
    }

    fn solve_householder(&self, x: f64) -> Result<(Vec<C>, f64, f64)> {
        let dim = 4 * self.n;
        let sys = self.system(x);
        let nreal = 2 * self.samples();
        let (rows, d) = self.constraints(x);
        let p = rows.len();
        let qr_c = if p > 0 {
            let cols: Vec<Vec<C>> = rows.iter().map(|r| r.iter().map(|c| c.conj()).collect()).collect();
            Some(HouseholderQr::new(cols))
        } else {
            None
        };
        let mut b_rows: Vec<Vec<C>> = (0..nreal)
            .map(|r| sys.matrix[r * dim..(r + 1) * dim].to_vec())
            .collect();
        let mut w = Vec::new();
        if let Some(qr) = &qr_c {
            w = qr.solve_rh(&d).ok_or(Error::IllConditioned { x, condition: f64::INFINITY })?;
            b_rows.par_iter_mut().for_each(|r| qr.apply_q_right(r));
        }
        let red = dim - p;
        let mut r_vec: Vec<C> = sys.rhs[..nreal].to_vec();
        for (ri, row) in r_vec.iter_mut().zip(&b_rows) {
            for (j, wj) in w.iter().enumerate() {
                *ri -= row[j] * wj;
            }
        }
        let frob = sys.matrix[..nreal * dim].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let solve = |lambda: f64| {
            let mut cols: Vec<Vec<C>> = (0..red)
                .map(|j| b_rows.iter().map(|r| r[p + j]).collect())
                .collect();
            let mut rhs = r_vec.clone();
            if lambda > 0.0 {
                for (j, col) in cols.iter_mut().enumerate() {
                    col.extend((0..red).map(|i| if i == j { C::new(lambda, 0.0) } else { ZERO }));
                }
                rhs.extend(std::iter::repeat(ZERO).take(red));
            }
            let qr = HouseholderQr::new(cols);
            let (lo, hi) = qr.r_diag().fold((f64::MAX, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
            let cond = hi / lo;
            qr.apply_qh(&mut rhs);
            (qr.solve_r(&rhs), cond)
        };
        let mut ridge = self.regularization;
        let (mut y, mut condition) = solve(ridge);
        if y.is_none() || condition > AUTO_RIDGE_CONDITION {
            ridge = ridge.max(AUTO_RIDGE_SCALE * frob);
            let again = solve(ridge);
            if again.0.is_none() {
                return Err(Error::IllConditioned { x, condition });
            }
            (y, condition) = again;
        }
        let mut u: Vec<C> = w.into_iter().chain(y.unwrap_or_default()).collect();
        if let Some(qr) = &qr_c {
            qr.apply_q(&mut u);
        }
        Ok((u, ridge, condition))
    }

    /// `‖Au − r‖/‖r‖` of the raw system, evaluated through the series.
    pub fn residual(&self, x: f64, u: &[C]) -> f64 {
        let n = self.n;
        let (b1, rest) = u.split_at(n);
        let (a1, rest) = rest.split_at(n);
        let (a2c, b2c) = rest.split_at(n);
        let mut num = 0.0;
        let mut den = self.rhs_norm_real;
        for kk in 0..self.samples() {
            let e = C::new(0.0, -self.rho[kk] * x).exp();
            let (a, b) = (self.a[kk], self.b[kk]);
            let w = -self.z[kk];
            let zp = self.zp1[kk];
            let sb1 = zp * horner(b1, w);
            let sa1 = zp * horner(a1, w);
            let sa2 = zp.conj() * horner(a2c, w.conj());
            let sb2 = zp.conj() * horner(b2c, w.conj());
            let r1 = e * sb1 - b * e.conj() * sa1 - a * e * sa2 - (a - 1.0) * e;
            let r2 = a.conj() * e.conj() * sa1 - b.conj() * e * sa2 + e.conj() * sb2 - b.conj() * e;
            num += r1.norm_sqr() + r2.norm_sqr();
        }
        for (r1, r2, d1, d2) in self.eigen_rows(x) {
            let dot = |r: &[C]| r.iter().zip(u).map(|(a, b)| a * b).sum::<C>();
            num += (dot(&r1) - d1).norm_sqr() + (dot(&r2) - d2).norm_sqr();
            den += d1.norm_sqr() + d2.norm_sqr();
        }
        if den == 0.0 {
            0.0
        } else {
            (num / den).sqrt()
        }
    }
}

/// Raw system at one `x` (see the module docs for the row layout).
pub fn assemble_system(sd: &ScatteringData, x: f64, cfg: &InverseConfig) -> Result<LinearSystem> {
    Ok(InverseSolver::new(sd, cfg)?.system(x))
}

/// Coefficient blocks and residual at one `x`.
pub fn solve_at(sd: &ScatteringData, x: f64, cfg: &InverseConfig) -> Result<PointSolution> {
    InverseSolver::new(sd, cfg)?.solve_at(x)
}

/// `q` from `G₁ = 1 + b_{1,0}` and `G₂ = b_{2,0}`: `q = G₁′/G₂` or
/// `q̄ = −(G₂′ + G₂)/G₁`, whichever denominator is larger.
pub fn recover_potential(
    b10: &SampledComplexFunction,
    b20: &SampledComplexFunction,
) -> Result<SampledComplexFunction> {
    if b10.grid() != b20.grid() {
        return Err(Error::InvalidGrid("b10 and b20 live on different grids".into()));
    }
    let g1 = b10.with_values(b10.values().iter().map(|v| v + 1.0).collect());
    let d1 = spline_derivative(&g1)?;
    let d2 = spline_derivative(b20)?;
    let mut flagged = Vec::new();
    let points = b10.grid().points();
    let q: Vec<C> = (0..points.len())
        .map(|i| {
            let (g1, g2) = (g1.values()[i], b20.values()[i]);
            let (num_a, num_b) = (d1.values()[i], -(d2.values()[i] + g2));
            if g2.norm() > g1.norm() {
                if g2.norm() >= RECOVERY_FLOOR {
                    return num_a / g2;
                }
            } else if g1.norm() >= RECOVERY_FLOOR {
                return (num_b / g1).conj();
            }
            if num_a.norm() >= RECOVERY_FLOOR || num_b.norm() >= RECOVERY_FLOOR {
                flagged.push(points[i]);
            }
            ZERO
        })
        .collect();
    if let Some(&first_x) = flagged.first() {
        return Err(Error::RecoverySingularity { first_x, count: flagged.len() });
    }
    Ok(b10.with_values(q))
}

/// `max|W| − min|W|` with `W = (1 + b_{1,0})(1 + a_{2,0}) − b_{2,0} a_{1,0}`,
/// the Wronskian of `φ(i/2, x)` and `ψ(i/2, x)`.
pub fn wronskian_indicator(
    b10: &SampledComplexFunction,
    b20: &SampledComplexFunction,
    a10: &SampledComplexFunction,
    a20: &SampledComplexFunction,
) -> f64 {
    let w = b10
        .values()
        .iter()
        .zip(b20.values())
        .zip(a10.values().iter().zip(a20.values()))
        .map(|((b1, b2), (a1, a2))| ((1.0 + b1) * (1.0 + a2) - b2 * a1).norm());
    let (lo, hi) = w.fold((f64::MAX, f64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi < lo {
        0.0
    } else {
        hi - lo
    }
}

/// Solves at every node of `cfg.x_grid` and reconstructs `q`.
pub fn run_inverse(sd: &ScatteringData, cfg: &InverseConfig) -> Result<InverseSolveResult> {
    let solver = InverseSolver::new(sd, cfg)?;
    let sols: Vec<PointSolution> = cfg
        .x_grid
        .points()
        .par_iter()
        .map(|&x| solver.solve_at(x))
        .collect::<Result<_>>()?;
    let grid = Arc::clone(&cfg.x_grid);
    let field = |f: &dyn Fn(&PointSolution) -> C| {
        SampledComplexFunction::new(Arc::clone(&grid), sols.iter().map(f).collect())
    };
    let a10 = field(&|s| s.zeroth().0)?;
    let a20 = field(&|s| s.zeroth().1)?;
    let b10 = field(&|s| s.zeroth().2)?;
    let b20 = field(&|s| s.zeroth().3)?;
    let q_recovered = recover_potential(&b10, &b20)?;
    let wronskian_epsilon = wronskian_indicator(&b10, &b20, &a10, &a20);
    Ok(InverseSolveResult {
        q_recovered,
        ls_residuals: sols.iter().filter_map(|s| s.residual).collect(),
        regularized_points: sols.iter().filter(|s| s.ridge > 0.0).count(),
        max_condition: sols.iter().map(|s| s.condition).fold(0.0, f64::max),
        b10,
        b20,
        a10,
        a20,
        wronskian_epsilon,
    })
}
