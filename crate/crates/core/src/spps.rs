//! Recurrent construction of the power-series coefficients `a_n(x)`,
//! `b_n(x)` of the Jost solutions and evaluation of the truncated series.
//!
//! In terms of `z = (1/2 + iρ)/(1/2 − iρ)`,
//!
//! ```text
//! φ(ρ,x) = e^{−iρx} [(1,0)ᵀ + (z+1) Σ (−z)ⁿ b_n(x)]
//! ψ(ρ,x) = e^{iρx}  [(0,1)ᵀ + (z+1) Σ (−z)ⁿ a_n(x)]
//! ```
//!
//! and the tilded solutions use `z̃ = 1/z` with `ã₁ = ā₂, ã₂ = −ā₁` (same
//! for `b`). The `a` rows depend only on data to the right of `x` and the
//! `b` rows only on data to the left, so when only a few nodes are kept
//! the `a` side is swept over a panel-aligned suffix of the grid and the
//! `b` side over a prefix; the kept values are identical to a full sweep.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid_quad::{
    cumulative_left_values, cumulative_right_values, damped_cumulative_left_values,
    damped_cumulative_right_values, max_abs, SampledComplexFunction, UniformGrid, PANEL,
};
use crate::zs_base::{BaseJost, ZerothCoefficients};

/// Slack on `|z| ≤ 1` for points on the unit circle.
const DISK_SLACK: f64 = 1e-12;

/// ρ together with its images `z(ρ)` and `z̃(ρ) = 1/z(ρ)`; an image at a
/// pole is stored as `∞ + 0i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPoint {
    pub rho: Complex64,
    pub z: Complex64,
    pub z_tilde: Complex64,
}

impl SpectralPoint {
    pub fn new(rho: Complex64) -> Self {
        let i = Complex64::i();
        let plus = 0.5 + i * rho;
        let minus = 0.5 - i * rho;
        Self {
            rho,
            z: safe_div(plus, minus),
            z_tilde: safe_div(minus, plus),
        }
    }

    pub fn real(rho: f64) -> Self {
        Self::new(Complex64::new(rho, 0.0))
    }
}

fn safe_div(a: Complex64, b: Complex64) -> Complex64 {
    if b == Complex64::new(0.0, 0.0) {
        Complex64::new(f64::INFINITY, 0.0)
    } else {
        a / b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JostKind {
    Phi,
    Psi,
    PhiTilde,
    PsiTilde,
}

/// Which grid nodes keep their coefficient values.
#[derive(Clone, Debug, PartialEq)]
pub enum TableStorage {
    Full,
    /// Sorted, deduplicated grid indices.
    Nodes(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SppsOptions {
    pub order: usize,
    pub storage: TableStorage,
    /// Smallest admissible `|f|`, `|g|`.
    pub base_floor: f64,
    /// Row magnitude treated as blow-up.
    pub overflow_limit: f64,
}

impl SppsOptions {
    pub fn new(order: usize) -> Self {
        Self {
            order,
            storage: TableStorage::Full,
            base_floor: 1e-12,
            overflow_limit: 1e150,
        }
    }

    pub fn keep(mut self, nodes: Vec<usize>) -> Self {
        self.storage = TableStorage::Nodes(nodes);
        self
    }
}

/// Largest magnitudes of one coefficient row over the swept part of the grid.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RowStats {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

/// Coefficient rows `n = 0..=N` at the kept nodes.
#[derive(Clone, Debug)]
pub struct SppsTable {
    order: usize,
    grid: Arc<UniformGrid>,
    kept: Vec<usize>,
    a1: Vec<Vec<Complex64>>,
    a2: Vec<Vec<Complex64>>,
    b1: Vec<Vec<Complex64>>,
    b2: Vec<Vec<Complex64>>,
    a1_prime: Vec<Vec<Complex64>>,
    b2_prime: Vec<Vec<Complex64>>,
    stats: Vec<RowStats>,
}

/// One coefficient row at the kept nodes.
#[derive(Clone, Copy, Debug)]
pub struct CoefficientRow<'a> {
    pub a1: &'a [Complex64],
    pub a2: &'a [Complex64],
    pub b1: &'a [Complex64],
    pub b2: &'a [Complex64],
    pub a1_prime: &'a [Complex64],
    pub b2_prime: &'a [Complex64],
}

/// All orders at one node: `a1[n] = a_{1,n}(x)` etc.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientColumn {
    pub a1: Vec<Complex64>,
    pub a2: Vec<Complex64>,
    pub b1: Vec<Complex64>,
    pub b2: Vec<Complex64>,
}

/// Tilded coefficients of one order at the kept nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct TildedRow {
    pub a1: Vec<Complex64>,
    pub a2: Vec<Complex64>,
    pub b1: Vec<Complex64>,
    pub b2: Vec<Complex64>,
}

pub fn build_table(
    q: &SampledComplexFunction,
    base: &BaseJost,
    zeroth: &ZerothCoefficients,
    order: usize,
) -> Result<SppsTable> {
    build_table_with(q, base, zeroth, &SppsOptions::new(order))
}

pub fn build_table_with(
    q: &SampledComplexFunction,
    base: &BaseJost,
    zeroth: &ZerothCoefficients,
    opts: &SppsOptions,
) -> Result<SppsTable> {
    let grid = Arc::clone(q.grid());
    let n_pts = grid.len();
    if base.f.values().len() != n_pts || zeroth.a10.values().len() != n_pts {
        return Err(Error::InvalidGrid(
            "potential, base solution and zeroth coefficients differ in length".into(),
        ));
    }
    let kept: Vec<usize> = match &opts.storage {
        TableStorage::Full => (0..n_pts).collect(),
        TableStorage::Nodes(nodes) => {
            let mut k = nodes.clone();
            k.sort_unstable();
            k.dedup();
            if k.is_empty() {
                return Err(Error::OutOfRange("no nodes requested".into()));
            }
            if let Some(&bad) = k.iter().find(|&&i| i >= n_pts) {
                return Err(Error::OutOfRange(format!(
                    "node {bad} outside a grid of {n_pts} points"
                )));
            }
            k
        }
    };
    // panel-aligned sweep ranges
    let a_start = ((kept[0] / PANEL) * PANEL).min(n_pts - 1 - PANEL);
    let b_end = (kept[kept.len() - 1].div_ceil(PANEL) * PANEL).max(PANEL);

    let x = grid.points();
    let check_floor = |vals: &[Complex64], offset: usize, which: &'static str| -> Result<()> {
        if let Some((i, v)) = vals
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.norm() >= opts.base_floor))
        {
            return Err(Error::SingularBase {
                which,
                magnitude: v.norm(),
                x: x[offset + i],
            });
        }
        Ok(())
    };
    check_floor(&base.f.values()[a_start..], a_start, "f")?;
    check_floor(&base.g.values()[..=b_end], 0, "g")?;

    let order = opts.order;
    let a_keep: Vec<usize> = kept.iter().map(|&i| i - a_start).collect();
    let a_rows = a_side(q, base, zeroth, a_start, order, SideRows::new(order, a_keep, opts.overflow_limit))?;
    let b_rows = b_side(q, base, zeroth, b_end, order, SideRows::new(order, kept.clone(), opts.overflow_limit))?;

    let stats = (0..=order)
        .map(|n| RowStats {
            a1: a_rows.stats[n].0,
            a2: a_rows.stats[n].1,
            b1: b_rows.stats[n].0,
            b2: b_rows.stats[n].1,
        })
        .collect();
    Ok(SppsTable {
        order,
        a1: a_rows.first,
        a2: a_rows.second,
        a1_prime: a_rows.prime,
        b1: b_rows.first,
        b2: b_rows.second,
        b2_prime: b_rows.prime,
        kept,
        grid,
        stats,
    })
}

/// Rows of one side, restricted to the kept positions as they are produced.
struct SideRows {
    keep: Vec<usize>,
    limit: f64,
    first: Vec<Vec<Complex64>>,
    second: Vec<Vec<Complex64>>,
    prime: Vec<Vec<Complex64>>,
    stats: Vec<(f64, f64)>,
}

impl SideRows {
    fn push(&mut self, first: &[Complex64], second: &[Complex64], prime: &[Complex64]) -> Result<()> {
        let n = self.first.len();
        let m1 = max_abs(first);
        let m2 = max_abs(second);
        let mp = max_abs(prime);
        // max_abs skips NaN, so finiteness is checked separately
        let finite = |v: &[Complex64]| v.iter().all(|c| c.re.is_finite() && c.im.is_finite());
        if !(m1.max(m2).max(mp) <= self.limit) || !(finite(first) && finite(second) && finite(prime)) {
            return Err(Error::Instability {
                order: n,
                last_stable: n.saturating_sub(1),
            });
        }
        let pick = |v: &[Complex64]| self.keep.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let (f, s, p) = (pick(first), pick(second), pick(prime));
        self.first.push(f);
        self.second.push(s);
        self.prime.push(p);
        self.stats.push((m1, m2));
        Ok(())
    }

    fn new(order: usize, keep: Vec<usize>, limit: f64) -> Self {
        Self {
            keep,
            limit,
            first: Vec::with_capacity(order + 1),
            second: Vec::with_capacity(order + 1),
            prime: Vec::with_capacity(order + 1),
            stats: Vec::with_capacity(order + 1),
        }
    }
}

/// `a` rows on `[start, end]`:
///
/// ```text
/// E_n    = ∫_x e^{−(s−x)} f (a'_{1,n−1} + a_{1,n−1} − q a_{2,n−1}) ds   (= e^x H_n)
/// a_{2,n} = −f ∫_x q̄ E_n / f² ds
/// a_{1,n} = (P/f) a_{2,n} − E_n / f
/// a'_{1,n} = a'_{1,n−1} + a_{1,n} + a_{1,n−1} + q (a_{2,n} − a_{2,n−1})
/// ```
fn a_side(
    q: &SampledComplexFunction,
    base: &BaseJost,
    zeroth: &ZerothCoefficients,
    start: usize,
    order: usize,
    mut rows: SideRows,
) -> Result<SideRows> {
    let h = q.grid().step();
    let qv = &q.values()[start..];
    let f = &base.f.values()[start..];
    let p = &base.psi1_scaled.values()[start..];
    let m = qv.len();
    let inv_f: Vec<Complex64> = f.iter().map(|v| v.inv()).collect();
    let p_over_f: Vec<Complex64> = (0..m).map(|i| p[i] * inv_f[i]).collect();
    let w: Vec<Complex64> = (0..m).map(|i| qv[i].conj() * inv_f[i] * inv_f[i]).collect();

    let mut a1 = zeroth.a10.values()[start..].to_vec();
    let mut a2 = zeroth.a20.values()[start..].to_vec();
    let mut a1p = zeroth.a10_prime.values()[start..].to_vec();
    rows.push(&a1, &a2, &a1p)?;
    let mut tmp = vec![Complex64::new(0.0, 0.0); m];
    for _ in 1..=order {
        for i in 0..m {
            tmp[i] = f[i] * (a1p[i] + a1[i] - qv[i] * a2[i]);
        }
        let e = damped_cumulative_right_values(&tmp, h)?;
        for i in 0..m {
            tmp[i] = w[i] * e[i];
        }
        let c = cumulative_right_values(&tmp, h)?;
        let mut a1n = vec![Complex64::new(0.0, 0.0); m];
        let mut a2n = vec![Complex64::new(0.0, 0.0); m];
        let mut a1pn = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..m {
            a2n[i] = -f[i] * c[i];
            a1n[i] = p_over_f[i] * a2n[i] - e[i] * inv_f[i];
            a1pn[i] = a1p[i] + a1n[i] + a1[i] + qv[i] * (a2n[i] - a2[i]);
        }
        rows.push(&a1n, &a2n, &a1pn)?;
        a1 = a1n;
        a2 = a2n;
        a1p = a1pn;
    }
    Ok(rows)
}

/// `b` rows on `[0, end]`:
///
/// ```text
/// E_n    = ∫^x e^{−(x−s)} g (b'_{2,n−1} − b_{2,n−1} + q̄ b_{1,n−1}) ds   (= e^{−x} P_n)
/// b_{1,n} = g ∫^x q E_n / g² ds
/// b_{2,n} = (Q/g) b_{1,n} + E_n / g
/// b'_{2,n} = b'_{2,n−1} − b_{2,n} − b_{2,n−1} − q̄ (b_{1,n} − b_{1,n−1})
/// ```
fn b_side(
    q: &SampledComplexFunction,
    base: &BaseJost,
    zeroth: &ZerothCoefficients,
    end: usize,
    order: usize,
    mut rows: SideRows,
) -> Result<SideRows> {
    let h = q.grid().step();
    let qv = &q.values()[..=end];
    let g = &base.g.values()[..=end];
    let qq = &base.phi2_scaled.values()[..=end];
    let m = qv.len();
    let inv_g: Vec<Complex64> = g.iter().map(|v| v.inv()).collect();
    let q_over_g: Vec<Complex64> = (0..m).map(|i| qq[i] * inv_g[i]).collect();
    let w: Vec<Complex64> = (0..m).map(|i| qv[i] * inv_g[i] * inv_g[i]).collect();

    let mut b1 = zeroth.b10.values()[..=end].to_vec();
    let mut b2 = zeroth.b20.values()[..=end].to_vec();
    let mut b2p = zeroth.b20_prime.values()[..=end].to_vec();
    rows.push(&b1, &b2, &b2p)?;
    let mut tmp = vec![Complex64::new(0.0, 0.0); m];
    for _ in 1..=order {
        for i in 0..m {
            tmp[i] = g[i] * (b2p[i] - b2[i] + qv[i].conj() * b1[i]);
        }
        let e = damped_cumulative_left_values(&tmp, h)?;
        for i in 0..m {
            tmp[i] = w[i] * e[i];
        }
        let c = cumulative_left_values(&tmp, h)?;
        let mut b1n = vec![Complex64::new(0.0, 0.0); m];
        let mut b2n = vec![Complex64::new(0.0, 0.0); m];
        let mut b2pn = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..m {
            b1n[i] = g[i] * c[i];
            b2n[i] = q_over_g[i] * b1n[i] + e[i] * inv_g[i];
            b2pn[i] = b2p[i] - b2n[i] - b2[i] - qv[i].conj() * (b1n[i] - b1[i]);
        }
        rows.push(&b1n, &b2n, &b2pn)?;
        b1 = b1n;
        b2 = b2n;
        b2p = b2pn;
    }
    Ok(rows)
}

impl SppsTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn grid(&self) -> &Arc<UniformGrid> {
        &self.grid
    }

    /// Grid indices with stored values, ascending.
    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn is_full(&self) -> bool {
        self.kept.len() == self.grid.len()
    }

    pub fn stats(&self) -> &[RowStats] {
        &self.stats
    }

    /// Position of grid index `x_index` among the kept nodes.
    pub fn position(&self, x_index: usize) -> Result<usize> {
        self.kept.binary_search(&x_index).map_err(|_| {
            Error::OutOfRange(format!("grid index {x_index} is not stored in this table"))
        })
    }

    pub fn row(&self, n: usize) -> Result<CoefficientRow<'_>> {
        self.check_order(n)?;
        Ok(CoefficientRow {
            a1: &self.a1[n],
            a2: &self.a2[n],
            b1: &self.b1[n],
            b2: &self.b2[n],
            a1_prime: &self.a1_prime[n],
            b2_prime: &self.b2_prime[n],
        })
    }

    pub fn column(&self, x_index: usize) -> Result<CoefficientColumn> {
        let k = self.position(x_index)?;
        let take = |rows: &[Vec<Complex64>]| rows.iter().map(|r| r[k]).collect();
        Ok(CoefficientColumn {
            a1: take(&self.a1),
            a2: take(&self.a2),
            b1: take(&self.b1),
            b2: take(&self.b2),
        })
    }

    /// Row `n` of a full table as functions on the grid.
    pub fn row_functions(&self, n: usize) -> Result<[SampledComplexFunction; 4]> {
        self.check_order(n)?;
        if !self.is_full() {
            return Err(Error::OutOfRange("table keeps only selected nodes".into()));
        }
        let f = |v: &Vec<Complex64>| SampledComplexFunction::new(Arc::clone(&self.grid), v.clone());
        Ok([f(&self.a1[n])?, f(&self.a2[n])?, f(&self.b1[n])?, f(&self.b2[n])?])
    }

    /// `ã_{1,n} = ā_{2,n}`, `ã_{2,n} = −ā_{1,n}`, `b̃_{1,n} = b̄_{2,n}`, `b̃_{2,n} = −b̄_{1,n}`.
    pub fn tilded_row(&self, n: usize) -> Result<TildedRow> {
        self.check_order(n)?;
        Ok(tilde(&self.a1[n], &self.a2[n], &self.b1[n], &self.b2[n]))
    }

    fn check_order(&self, n: usize) -> Result<()> {
        if n > self.order {
            return Err(Error::OutOfRange(format!(
                "order {n} exceeds table order {}",
                self.order
            )));
        }
        Ok(())
    }

    /// Truncated series value of the requested Jost solution at grid node `x_index`.
    pub fn evaluate_jost(
        &self,
        point: &SpectralPoint,
        which: JostKind,
        x_index: usize,
    ) -> Result<[Complex64; 2]> {
        let k = self.position(x_index)?;
        let x = self.grid.points()[x_index];
        let i = Complex64::i();
        let tilded = matches!(which, JostKind::PhiTilde | JostKind::PsiTilde);
        let w = if tilded { point.z_tilde } else { point.z };
        if !(w.norm() <= 1.0 + DISK_SLACK) {
            return Err(Error::SpectralDomain(format!(
                "|{}| = {} > 1 at ρ = {}",
                if tilded { "z̃" } else { "z" },
                w.norm(),
                point.rho
            )));
        }
        let (s1, s2) = match which {
            JostKind::Phi => horner2(&self.b1, &self.b2, k, -w, |v| v, |v| v),
            JostKind::Psi => horner2(&self.a1, &self.a2, k, -w, |v| v, |v| v),
            // b̃ = (b̄₂, −b̄₁), ã = (ā₂, −ā₁)
            JostKind::PhiTilde => horner2(&self.b2, &self.b1, k, -w, |v| v.conj(), |v| -v.conj()),
            JostKind::PsiTilde => horner2(&self.a2, &self.a1, k, -w, |v| v.conj(), |v| -v.conj()),
        };
        let zp1 = w + 1.0;
        let (lead, phase) = match which {
            JostKind::Phi => ([1.0, 0.0], -i * point.rho * x),
            JostKind::Psi => ([0.0, 1.0], i * point.rho * x),
            JostKind::PhiTilde => ([0.0, -1.0], i * point.rho * x),
            JostKind::PsiTilde => ([1.0, 0.0], -i * point.rho * x),
        };
        let e = phase.exp();
        Ok([
            e * (lead[0] + zp1 * s1),
            e * (lead[1] + zp1 * s2),
        ])
    }
}

fn horner2(
    first: &[Vec<Complex64>],
    second: &[Vec<Complex64>],
    k: usize,
    w: Complex64,
    m1: impl Fn(Complex64) -> Complex64,
    m2: impl Fn(Complex64) -> Complex64,
) -> (Complex64, Complex64) {
    let mut s1 = Complex64::new(0.0, 0.0);
    let mut s2 = Complex64::new(0.0, 0.0);
    for n in (0..first.len()).rev() {
        s1 = s1 * w + m1(first[n][k]);
        s2 = s2 * w + m2(second[n][k]);
    }
    (s1, s2)
}

fn tilde(a1: &[Complex64], a2: &[Complex64], b1: &[Complex64], b2: &[Complex64]) -> TildedRow {
    TildedRow {
        a1: a2.iter().map(|v| v.conj()).collect(),
        a2: a1.iter().map(|v| -v.conj()).collect(),
        b1: b2.iter().map(|v| v.conj()).collect(),
        b2: b1.iter().map(|v| -v.conj()).collect(),
    }
}

impl TildedRow {
    /// Applies the conjugation relation again; the result is the original
    /// row with both components negated.
    pub fn tilde_again(&self) -> TildedRow {
        tilde(&self.a1, &self.a2, &self.b1, &self.b2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{evaluate, PotentialSpec};
    use crate::zs_base::{solve_base, zeroth_coefficients};
    use std::f64::consts::PI;

    fn table(spec: PotentialSpec, l: f64, npu: f64, order: usize) -> SppsTable {
        let grid = Arc::new(UniformGrid::new(-l, l, npu).unwrap());
        let q = evaluate(&spec, &grid).unwrap();
        let base = solve_base(&q).unwrap();
        let z = zeroth_coefficients(&base, &q);
        build_table(&q, &base, &z, order).unwrap()
    }

    fn soliton() -> PotentialSpec {
        PotentialSpec::soliton(0.5, PI / 2.0, 0.1, 0.1)
    }

    #[test]
    fn spectral_point_images() {
        let p = SpectralPoint::new(Complex64::new(0.0, 0.5));
        assert_eq!(p.z, Complex64::new(0.0, 0.0));
        assert!(p.z_tilde.re.is_infinite());
        let p = SpectralPoint::new(Complex64::new(0.7, 0.3));
        assert!((p.z * p.z_tilde - 1.0).norm() < 1e-15);
        assert!(p.z.norm() < 1.0);
        assert!((SpectralPoint::real(2.0).z.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_potential_rows_vanish() {
        let t = table(PotentialSpec::zero(), 4.0, 20.0, 8);
        for n in 0..=8 {
            let r = t.row(n).unwrap();
            assert!(max_abs(r.a1) + max_abs(r.a2) + max_abs(r.b1) + max_abs(r.b2) == 0.0);
            assert_eq!(t.tilded_row(n).unwrap().a1.iter().map(|v| v.norm()).sum::<f64>(), 0.0);
        }
        let xi = 17;
        let x = t.grid().points()[xi];
        let psi = t.evaluate_jost(&SpectralPoint::real(1.3), JostKind::Psi, xi).unwrap();
        assert!(psi[0].norm() < 1e-15);
        assert!((psi[1] - Complex64::new(0.0, 1.3 * x).exp()).norm() < 1e-15);
    }

    #[test]
    fn derivative_identities_hold() {
        let t = table(soliton(), 10.0, 200.0, 12);
        let grid = Arc::new(UniformGrid::new(-10.0, 10.0, 200.0).unwrap());
        let q = evaluate(&soliton(), &grid).unwrap();
        for n in 1..=12 {
            let (r, p) = (t.row(n).unwrap(), t.row(n - 1).unwrap());
            for i in 0..q.values().len() {
                let qi = q.values()[i];
                let lhs = r.a1_prime[i];
                let rhs = p.a1_prime[i] + r.a1[i] + p.a1[i] + qi * (r.a2[i] - p.a2[i]);
                assert!((lhs - rhs).norm() <= 1e-14 * (1.0 + lhs.norm()));
                let lhs = r.b2_prime[i];
                let rhs = p.b2_prime[i] - r.b2[i] - p.b2[i] - qi.conj() * (r.b1[i] - p.b1[i]);
                assert!((lhs - rhs).norm() <= 1e-14 * (1.0 + lhs.norm()));
            }
        }
    }

    #[test]
    fn node_storage_matches_full_table() {
        let full = table(soliton(), 6.0, 100.0, 10);
        let grid = Arc::new(UniformGrid::new(-6.0, 6.0, 100.0).unwrap());
        let q = evaluate(&soliton(), &grid).unwrap();
        let base = solve_base(&q).unwrap();
        let z = zeroth_coefficients(&base, &q);
        let nodes = vec![600, 3, 1199, 600, 601, 0, 1200];
        let part = build_table_with(&q, &base, &z, &SppsOptions::new(10).keep(nodes)).unwrap();
        assert_eq!(part.kept(), &[0, 3, 600, 601, 1199, 1200]);
        for &xi in part.kept() {
            assert_eq!(part.column(xi).unwrap(), full.column(xi).unwrap());
        }
        assert!(part.column(5).is_err());
        assert!(part.row_functions(0).is_err());
        assert!(build_table_with(&q, &base, &z, &SppsOptions::new(2).keep(vec![5000])).is_err());
    }

    #[test]
    fn phi_at_half_i_is_the_zeroth_row() {
        let t = table(soliton(), 8.0, 100.0, 6);
        let p = SpectralPoint::new(Complex64::new(0.0, 0.5));
        for xi in [0, 400, 1600] {
            let x = t.grid().points()[xi];
            let phi = t.evaluate_jost(&p, JostKind::Phi, xi).unwrap();
            let r = t.row(0).unwrap();
            let e = (x / 2.0).exp();
            assert!((phi[0] - e * (1.0 + r.b1[xi])).norm() <= 1e-14 * e);
            assert!((phi[1] - e * r.b2[xi]).norm() <= 1e-14 * e);
        }
    }

    #[test]
    fn conjugation_relation_is_an_anti_involution() {
        let t = table(soliton(), 8.0, 100.0, 2);
        let r = t.row(0).unwrap();
        let twice = t.tilded_row(0).unwrap().tilde_again();
        for i in 0..r.a1.len() {
            assert_eq!(twice.a1[i], -r.a1[i]);
            assert_eq!(twice.a2[i], -r.a2[i]);
            assert_eq!(twice.b1[i], -r.b1[i]);
            assert_eq!(twice.b2[i], -r.b2[i]);
        }
    }

    #[test]
    fn tilded_series_match_conjugation_of_untilded() {
        // ψ̃(ρ) = (ψ̄₂(ρ̄), −ψ̄₁(ρ̄)) and φ̃ likewise.
        let t = table(soliton(), 10.0, 300.0, 40);
        let rho = Complex64::new(0.4, -0.2);
        let p = SpectralPoint::new(rho);
        let pc = SpectralPoint::new(rho.conj());
        for xi in [1000, 3000, 4500] {
            let psit = t.evaluate_jost(&p, JostKind::PsiTilde, xi).unwrap();
            let psi = t.evaluate_jost(&pc, JostKind::Psi, xi).unwrap();
            assert!((psit[0] - psi[1].conj()).norm() < 1e-12);
            assert!((psit[1] + psi[0].conj()).norm() < 1e-12);
            let phit = t.evaluate_jost(&p, JostKind::PhiTilde, xi).unwrap();
            let phi = t.evaluate_jost(&pc, JostKind::Phi, xi).unwrap();
            assert!((phit[0] - phi[1].conj()).norm() < 1e-12);
            assert!((phit[1] + phi[0].conj()).norm() < 1e-12);
        }
        assert!(t.evaluate_jost(&p, JostKind::Psi, 0).is_err());
        assert!(t.evaluate_jost(&pc, JostKind::PsiTilde, 0).is_err());
    }

    #[test]
    fn soliton_coefficients_decay_faster_than_chirped_sech() {
        let sol = table(soliton(), 12.0, 300.0, 60);
        let sech = table(PotentialSpec::chirped_sech(1.0, 0.1), 12.0, 300.0, 60);
        let mid = sol.grid().len() / 2;
        let at0 = |t: &SppsTable, n: usize| {
            let c = t.column(mid).unwrap();
            c.a1[n].norm().max(c.a2[n].norm())
        };
        assert!(at0(&sol, 40) < at0(&sech, 40));
        assert!(at0(&sech, 60) < at0(&sech, 10));
    }

    #[test]
    fn order_out_of_range() {
        let t = table(PotentialSpec::zero(), 2.0, 10.0, 3);
        assert!(t.row(4).is_err());
        assert!(t.tilded_row(4).is_err());
        assert!(t.row_functions(3).is_ok());
    }
}
