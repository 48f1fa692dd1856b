//! Small dense complex kernels for the inverse solver: Householder QR of a
//! tall matrix given by columns, and Hermitian Cholesky. Matrices passed as
//! flat slices are row-major.

use num_complex::Complex64;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

struct Reflector {
    start: usize,
    v: Vec<C>,
    beta: f64,
}

impl Reflector {
    /// `y ← (I − β v vᴴ) y` on the trailing part of `y`.
    fn apply(&self, y: &mut [C]) {
        if self.beta == 0.0 {
            return;
        }
        let tail = &mut y[self.start..];
        let s: C = self.v.iter().zip(tail.iter()).map(|(v, y)| v.conj() * y).sum();
        let s = s * self.beta;
        for (yi, vi) in tail.iter_mut().zip(&self.v) {
            *yi -= s * vi;
        }
    }
}

/// `A = Q R` for an `m × p` matrix with `m ≥ p`, stored as `p` columns.
pub(crate) struct HouseholderQr {
    m: usize,
    p: usize,
    reflectors: Vec<Reflector>,
    /// Upper triangle, `p × p` row-major.
    r: Vec<C>,
}

impl HouseholderQr {
    pub(crate) fn new(mut cols: Vec<Vec<C>>) -> Self {
        let p = cols.len();
        let m = cols.first().map_or(0, Vec::len);
        assert!(m >= p, "Householder QR needs a tall matrix");
        let mut reflectors = Vec::with_capacity(p);
        let mut r = vec![ZERO; p * p];
        for j in 0..p {
            let x = &cols[j][j..];
            let norm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let refl = if norm == 0.0 {
                Reflector { start: j, v: vec![ZERO; m - j], beta: 0.0 }
            } else {
                let x0 = x[0];
                let ph = if x0.norm() > 0.0 { x0 / x0.norm() } else { C::new(1.0, 0.0) };
                let alpha = -ph * norm;
                let mut v = x.to_vec();
                v[0] -= alpha;
                let vv: f64 = v.iter().map(|c| c.norm_sqr()).sum();
                Reflector { start: j, v, beta: 2.0 / vv }
            };
            for col in cols.iter_mut().skip(j) {
                refl.apply(col);
            }
            for k in j..p {
                r[j * p + k] = cols[k][j];
            }
            reflectors.push(refl);
        }
        Self { m, p, reflectors, r }
    }

    pub(crate) fn r_diag(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.p).map(|j| self.r[j * self.p + j].norm())
    }

    /// `y ← Qᴴ y`.
    pub(crate) fn apply_qh(&self, y: &mut [C]) {
        for h in &self.reflectors {
            h.apply(y);
        }
    }

    /// `y ← Q y`.
    pub(crate) fn apply_q(&self, y: &mut [C]) {
        for h in self.reflectors.iter().rev() {
            h.apply(y);
        }
    }

    /// `row ← row Q` for a row vector.
    pub(crate) fn apply_q_right(&self, row: &mut [C]) {
        // row H = (H row*)* for Hermitian H
        for h in &self.reflectors {
            if h.beta == 0.0 {
                continue;
            }
            let tail = &mut row[h.start..];
            let s: C = tail.iter().zip(&h.v).map(|(a, v)| a * v).sum::<C>() * h.beta;
            for (a, v) in tail.iter_mut().zip(&h.v) {
                *a -= s * v.conj();
            }
        }
    }

    /// `G ← Qᴴ G Q` for a square `m × m` row-major matrix.
    pub(crate) fn congruence(&self, g: &mut [C]) {
        let n = self.m;
        let mut col = vec![ZERO; n];
        for h in &self.reflectors {
            if h.beta == 0.0 {
                continue;
            }
            for c in 0..n {
                for (i, slot) in col.iter_mut().enumerate() {
                    *slot = g[i * n + c];
                }
                h.apply(&mut col);
                for (i, slot) in col.iter().enumerate() {
                    g[i * n + c] = *slot;
                }
            }
            for rw in 0..n {
                let row = &mut g[rw * n..(rw + 1) * n];
                let tail = &mut row[h.start..];
                let s: C = tail.iter().zip(&h.v).map(|(a, v)| a * v).sum::<C>() * h.beta;
                for (a, v) in tail.iter_mut().zip(&h.v) {
                    *a -= s * v.conj();
                }
            }
        }
    }

    /// Solves `Rᴴ w = d`.
    pub(crate) fn solve_rh(&self, d: &[C]) -> Option<Vec<C>> {
        let p = self.p;
        let mut w = vec![ZERO; p];
        for i in 0..p {
            let mut s = d[i];
            for k in 0..i {
                s -= self.r[k * p + i].conj() * w[k];
            }
            let piv = self.r[i * p + i].conj();
            if piv.norm() == 0.0 {
                return None;
            }
            w[i] = s / piv;
        }
        Some(w)
    }

    /// Solves `R x = y[..p]`.
    pub(crate) fn solve_r(&self, y: &[C]) -> Option<Vec<C>> {
        let p = self.p;
        let mut x = vec![ZERO; p];
        for i in (0..p).rev() {
            let mut s = y[i];
            for k in i + 1..p {
                s -= self.r[i * p + k] * x[k];
            }
            let piv = self.r[i * p + i];
            if piv.norm() == 0.0 {
                return None;
            }
            x[i] = s / piv;
        }
        Some(x)
    }
}

/// In-place lower Cholesky factor of a Hermitian `n × n` matrix; only the
/// lower triangle is read. Returns `None` on a non-positive pivot.
pub(crate) fn cholesky(a: &mut [C], n: usize) -> Option<()> {
    for j in 0..n {
        let mut d = a[j * n + j].re;
        for k in 0..j {
            d -= a[j * n + k].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let ljj = d.sqrt();
        a[j * n + j] = C::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k].conj();
            }
            a[i * n + j] = s / ljj;
        }
    }
    Some(())
}

/// Solves `L Lᴴ x = b` with the factor from [`cholesky`].
pub(crate) fn cholesky_solve(l: &[C], n: usize, b: &[C]) -> Vec<C> {
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i].re;
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i].conj() * y[k];
        }
        y[i] = s / l[i * n + i].re;
    }
    y
}

/// Ratio of extreme Cholesky pivots, squared: a cheap lower bound on the
/// 2-norm condition number of the factored matrix.
pub(crate) fn cholesky_condition(l: &[C], n: usize) -> f64 {
    let d = (0..n).map(|i| l[i * n + i].re);
    let (lo, hi) = d.fold((f64::MAX, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    (hi / lo).powi(2)
}
