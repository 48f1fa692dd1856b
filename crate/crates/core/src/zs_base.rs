//! Jost solutions of the Zakharov–Shabat system at ρ = i/2 and the zeroth
//! power-series coefficients built from them.
//!
//! With `n1' + iρ n1 = q n2` and `n2' − iρ n2 = −q̄ n1` at ρ = i/2, the scaled
//! components `P = e^{x/2}ψ₁`, `f = e^{x/2}ψ₂`, `g = e^{−x/2}φ₁`,
//! `Q = e^{−x/2}φ₂` satisfy
//!
//! ```text
//! P' = P + q f,   f' = −q̄ P,   P(x_max) = 0, f(x_max) = 1
//! g' = q Q,       Q' = −Q − q̄ g, g(x_min) = 1, Q(x_min) = 0
//! ```
//!
//! which are solved as Volterra equations by Picard iteration. The
//! exponential kernels are folded into damped cumulative integrals so no
//! factor `e^{±x}` is ever formed.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid_quad::{
    cumulative_left_values, cumulative_right_values, damped_cumulative_left_values,
    damped_cumulative_right_values, max_abs, SampledComplexFunction, UniformGrid,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseSolveOptions {
    /// Stop when successive iterates differ by less than `tolerance · max(1, ‖iterate‖∞)`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for BaseSolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-13,
            max_iterations: 200,
        }
    }
}

/// Scaled Jost solutions at ρ = i/2.
#[derive(Clone, Debug)]
pub struct BaseJost {
    /// `e^{x/2} ψ₂(i/2, x)`
    pub f: SampledComplexFunction,
    pub f_prime: SampledComplexFunction,
    /// `e^{−x/2} φ₁(i/2, x)`
    pub g: SampledComplexFunction,
    pub g_prime: SampledComplexFunction,
    /// `e^{x/2} ψ₁(i/2, x)`
    pub psi1_scaled: SampledComplexFunction,
    /// `e^{−x/2} φ₂(i/2, x)`
    pub phi2_scaled: SampledComplexFunction,
    /// Picard sweeps used for the ψ and φ halves.
    pub iterations: (usize, usize),
}

impl BaseJost {
    pub fn grid(&self) -> &Arc<UniformGrid> {
        self.f.grid()
    }

    /// `W[φ(i/2,·); ψ(i/2,·)] = g f − Q P`, constant in exact arithmetic
    /// (it equals `a(i/2)`).
    pub fn wronskian(&self) -> Vec<Complex64> {
        let (f, g, p, q) = (
            self.f.values(),
            self.g.values(),
            self.psi1_scaled.values(),
            self.phi2_scaled.values(),
        );
        (0..f.len()).map(|i| g[i] * f[i] - q[i] * p[i]).collect()
    }
}

/// Zeroth coefficients `a₀ = (a₁,₀, a₂,₀)`, `b₀ = (b₁,₀, b₂,₀)` and the
/// derivative seeds used by the recurrences.
#[derive(Clone, Debug)]
pub struct ZerothCoefficients {
    pub a10: SampledComplexFunction,
    pub a20: SampledComplexFunction,
    pub b10: SampledComplexFunction,
    pub b20: SampledComplexFunction,
    pub a10_prime: SampledComplexFunction,
    pub b20_prime: SampledComplexFunction,
}

pub fn solve_base(q: &SampledComplexFunction) -> Result<BaseJost> {
    solve_base_with(q, BaseSolveOptions::default())
}

pub fn solve_base_with(q: &SampledComplexFunction, opts: BaseSolveOptions) -> Result<BaseJost> {
    let grid = Arc::clone(q.grid());
    let h = grid.step();
    let qv = q.values();
    let qc: Vec<Complex64> = qv.iter().map(|v| v.conj()).collect();
    let n = qv.len();
    let one = Complex64::new(1.0, 0.0);

    // ψ half: P = −D_R[q f], f = 1 + C_R[q̄ P]
    let mut f = vec![one; n];
    let mut p = vec![Complex64::new(0.0, 0.0); n];
    let it_psi = picard(opts, |f_cur, p_cur| {
        let qf: Vec<Complex64> = qv.iter().zip(f_cur.iter()).map(|(a, b)| a * b).collect();
        let p_new: Vec<Complex64> = damped_cumulative_right_values(&qf, h)?
            .into_iter()
            .map(|v| -v)
            .collect();
        let qp: Vec<Complex64> = qc.iter().zip(&p_new).map(|(a, b)| a * b).collect();
        let f_new: Vec<Complex64> = cumulative_right_values(&qp, h)?
            .into_iter()
            .map(|v| one + v)
            .collect();
        let d = diff(&f_new, f_cur).max(diff(&p_new, p_cur));
        let scale = max_abs(&f_new).max(max_abs(&p_new)).max(1.0);
        *f_cur = f_new;
        *p_cur = p_new;
        Ok((d, scale))
    }, &mut f, &mut p)?;

    // φ half: Q = −D_L[q̄ g], g = 1 + C_L[q Q]
    let mut g = vec![one; n];
    let mut qq = vec![Complex64::new(0.0, 0.0); n];
    let it_phi = picard(opts, |g_cur, q_cur| {
        let qg: Vec<Complex64> = qc.iter().zip(g_cur.iter()).map(|(a, b)| a * b).collect();
        let q_new: Vec<Complex64> = damped_cumulative_left_values(&qg, h)?
            .into_iter()
            .map(|v| -v)
            .collect();
        let qq_: Vec<Complex64> = qv.iter().zip(&q_new).map(|(a, b)| a * b).collect();
        let g_new: Vec<Complex64> = cumulative_left_values(&qq_, h)?
            .into_iter()
            .map(|v| one + v)
            .collect();
        let d = diff(&g_new, g_cur).max(diff(&q_new, q_cur));
        let scale = max_abs(&g_new).max(max_abs(&q_new)).max(1.0);
        *g_cur = g_new;
        *q_cur = q_new;
        Ok((d, scale))
    }, &mut g, &mut qq)?;

    let f_prime: Vec<Complex64> = (0..n).map(|i| -qc[i] * p[i]).collect();
    let g_prime: Vec<Complex64> = (0..n).map(|i| qv[i] * qq[i]).collect();
    let wrap = |v: Vec<Complex64>| SampledComplexFunction::new(Arc::clone(&grid), v);
    Ok(BaseJost {
        f: wrap(f)?,
        f_prime: wrap(f_prime)?,
        g: wrap(g)?,
        g_prime: wrap(g_prime)?,
        psi1_scaled: wrap(p)?,
        phi2_scaled: wrap(qq)?,
        iterations: (it_psi, it_phi),
    })
}

fn picard<F>(
    opts: BaseSolveOptions,
    mut sweep: F,
    u: &mut Vec<Complex64>,
    v: &mut Vec<Complex64>,
) -> Result<usize>
where
    F: FnMut(&mut Vec<Complex64>, &mut Vec<Complex64>) -> Result<(f64, f64)>,
{
    let mut last = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        let (d, scale) = sweep(u, v)?;
        if !d.is_finite() {
            break;
        }
        last = d / scale;
        if d < opts.tolerance * scale {
            return Ok(it);
        }
    }
    Err(Error::BaseSolve {
        iterations: opts.max_iterations,
        residual: last,
    })
}

fn diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Builds the zeroth coefficients algebraically from the base solution;
/// no division by `q` is involved.
pub fn zeroth_coefficients(base: &BaseJost, q: &SampledComplexFunction) -> ZerothCoefficients {
    let grid = Arc::clone(base.grid());
    let qv = q.values();
    let f = base.f.values();
    let g = base.g.values();
    let p = base.psi1_scaled.values();
    let qq = base.phi2_scaled.values();
    let one = Complex64::new(1.0, 0.0);
    let make = |v: Vec<Complex64>| {
        SampledComplexFunction::new(Arc::clone(&grid), v).expect("same grid")
    };
    let n = f.len();
    ZerothCoefficients {
        a10: base.psi1_scaled.clone(),
        a20: make(f.iter().map(|v| v - one).collect()),
        b10: make(g.iter().map(|v| v - one).collect()),
        b20: base.phi2_scaled.clone(),
        a10_prime: make((0..n).map(|i| p[i] + qv[i] * f[i]).collect()),
        b20_prime: make((0..n).map(|i| -qq[i] - qv[i].conj() * g[i]).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_quad::spline_derivative;
    use crate::potentials::{evaluate, PotentialSpec};
    use std::f64::consts::PI;

    fn setup(spec: PotentialSpec, l: f64, npu: f64) -> SampledComplexFunction {
        let grid = Arc::new(UniformGrid::new(-l, l, npu).unwrap());
        evaluate(&spec, &grid).unwrap()
    }

    #[test]
    fn zero_potential_is_trivial() {
        let q = setup(PotentialSpec::zero(), 5.0, 20.0);
        let base = solve_base(&q).unwrap();
        assert!(base.f.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        assert!(base.g.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        assert_eq!(base.psi1_scaled.max_abs(), 0.0);
        assert_eq!(base.phi2_scaled.max_abs(), 0.0);
        let z = zeroth_coefficients(&base, &q);
        for row in [&z.a10, &z.a20, &z.b10, &z.b20, &z.a10_prime, &z.b20_prime] {
            assert_eq!(row.max_abs(), 0.0);
        }
    }

    #[test]
    fn soliton_wronskian_is_constant() {
        let q = setup(PotentialSpec::soliton(0.5, PI / 2.0, 0.1, 0.1), 12.0, 1500.0);
        let base = solve_base(&q).unwrap();
        let w = base.wronskian();
        let mags: Vec<f64> = w.iter().map(|v| v.norm()).collect();
        let spread = mags.iter().cloned().fold(f64::MIN, f64::max)
            - mags.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread <= 1e-10, "{spread}");
    }

    #[test]
    fn seeds_satisfy_their_defining_identities() {
        let q = setup(PotentialSpec::chirped_gaussian(2.5, 2.0, 1.0), 8.0, 200.0);
        let base = solve_base(&q).unwrap();
        let z = zeroth_coefficients(&base, &q);
        for i in 0..q.values().len() {
            let qi = q.values()[i];
            let r = z.a10_prime.values()[i] - z.a10.values()[i] - qi * (z.a20.values()[i] + 1.0);
            assert!(r.norm() <= 1e-15 * (1.0 + z.a10_prime.values()[i].norm()));
            let r = z.b20_prime.values()[i] + z.b20.values()[i] + qi.conj() * (z.b10.values()[i] + 1.0);
            assert!(r.norm() <= 1e-15 * (1.0 + z.b20_prime.values()[i].norm()));
            let r = base.f_prime.values()[i] + qi.conj() * base.psi1_scaled.values()[i];
            assert!(r.norm() == 0.0);
        }
    }

    #[test]
    fn scaled_system_residual_is_small() {
        let q = setup(PotentialSpec::soliton(0.5, PI / 2.0, 0.1, 0.1), 12.0, 300.0);
        let base = solve_base(&q).unwrap();
        let dp = spline_derivative(&base.psi1_scaled).unwrap();
        let dq = spline_derivative(&base.phi2_scaled).unwrap();
        let mut worst: f64 = 0.0;
        for i in 2..q.values().len() - 2 {
            let qi = q.values()[i];
            let r1 = dp.values()[i] - base.psi1_scaled.values()[i] - qi * base.f.values()[i];
            let r2 = dq.values()[i] + base.phi2_scaled.values()[i] + qi.conj() * base.g.values()[i];
            worst = worst.max(r1.norm()).max(r2.norm());
        }
        // limited by the spline derivative at this density
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn chirped_sech_tails() {
        let q = setup(PotentialSpec::chirped_sech(1.0, 0.1), 12.0, 1500.0);
        let base = solve_base(&q).unwrap();
        let z = zeroth_coefficients(&base, &q);
        assert!(z.b10.values()[0].norm() <= 1e-5);
        assert!(z.a20.values()[q.values().len() - 1].norm() <= 1e-5);
    }

    #[test]
    fn non_convergence_is_reported() {
        let q = setup(PotentialSpec::chirped_gaussian(2.5, 2.0, 1.0), 8.0, 100.0);
        let opts = BaseSolveOptions {
            tolerance: 1e-13,
            max_iterations: 3,
        };
        match solve_base_with(&q, opts) {
            Err(Error::BaseSolve { iterations, residual }) => {
                assert_eq!(iterations, 3);
                assert!(residual > 1e-13);
            }
            other => panic!("{other:?}"),
        }
    }
}
