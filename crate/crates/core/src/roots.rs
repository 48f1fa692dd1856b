//! Complex polynomial roots: eigenvalues of the balanced companion matrix by
//! shifted Hessenberg QR, followed by optional Newton polishing.
//!
//! Coefficient slices are in ascending order, `p(z) = Σ c[n] zⁿ`.

use num_complex::Complex64;

use crate::error::{Error, Result};

const RADIX: f64 = 2.0;

pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// `(p(z), p'(z))`.
pub fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

pub fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// All roots of `p`. Leading zero coefficients are dropped; a constant
/// polynomial has no roots.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::RootFinding("non-finite coefficient".into()));
    }
    let top = match coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)) {
        Some(t) => t,
        None => return Err(Error::RootFinding("zero polynomial".into())),
    };
    // roots at the origin
    let low = coeffs.iter().position(|c| *c != Complex64::new(0.0, 0.0)).unwrap_or(0);
    let mut roots = vec![Complex64::new(0.0, 0.0); low];
    let p = &coeffs[low..=top];
    let d = p.len() - 1;
    if d == 0 {
        return Ok(roots);
    }
    // upper Hessenberg companion: first row −p[d−1..0]/p[d], unit subdiagonal
    let lead = p[d];
    let mut h = vec![Complex64::new(0.0, 0.0); d * d];
    for j in 0..d {
        h[j] = -p[d - 1 - j] / lead;
    }
    for i in 1..d {
        h[i * d + i - 1] = Complex64::new(1.0, 0.0);
    }
    balance(&mut h, d);
    roots.extend(hessenberg_eigenvalues(&mut h, d)?);
    Ok(roots)
}

/// Newton iteration on `p` from `z`, stopping when the step stops
/// shrinking the residual.
pub fn polish_newton(coeffs: &[Complex64], mut z: Complex64, max_steps: usize) -> Complex64 {
    let mut best = horner(coeffs, z).norm();
    for _ in 0..max_steps {
        let (p, dp) = horner_with_derivative(coeffs, z);
        if dp == Complex64::new(0.0, 0.0) || p == Complex64::new(0.0, 0.0) {
            break;
        }
        let next = z - p / dp;
        let r = horner(coeffs, next).norm();
        if !(r < best) {
            break;
        }
        best = r;
        z = next;
    }
    z
}

/// Diagonal similarity scaling by powers of two so that row and column
/// norms are comparable.
fn balance(a: &mut [Complex64], n: usize) {
    let sqrdx = RADIX * RADIX;
    let l1 = |c: &Complex64| c.re.abs() + c.im.abs();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += l1(&a[j * n + i]);
                    r += l1(&a[i * n + j]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / RADIX;
            let mut f = 1.0;
            let s = c + r;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[i * n + j] *= g;
                }
                for j in 0..n {
                    a[j * n + i] *= f;
                }
            }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix (row-major, destroyed) by
/// single-shift QR with Wilkinson shifts and Givens rotations.
fn hessenberg_eigenvalues(h: &mut [Complex64], n: usize) -> Result<Vec<Complex64>> {
    let at = |i: usize, j: usize| i * n + j;
    let mut eig = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut its = 0usize;
    let mut total = 0usize;
    let max_total = 60 * n.max(10);
    let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(n);
    loop {
        if hi == 0 {
            eig.push(h[at(0, 0)]);
            break;
        }
        // deflation search within the active window
        let mut l = hi;
        while l > 0 {
            let sub = h[at(l, l - 1)].norm();
            let diag = h[at(l, l)].norm() + h[at(l - 1, l - 1)].norm();
            if sub <= f64::EPSILON * diag || sub < f64::MIN_POSITIVE {
                h[at(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig.push(h[at(hi, hi)]);
            hi -= 1;
            its = 0;
            continue;
        }
        total += 1;
        its += 1;
        if total > max_total {
            return Err(Error::RootFinding(format!(
                "QR iteration did not converge ({} of {n} eigenvalues found)",
                eig.len()
            )));
        }
        let mu = if its % 10 == 0 {
            // exceptional shift
            h[at(hi, hi)] + h[at(hi, hi - 1)].norm() * 0.75
        } else {
            wilkinson_shift(
                h[at(hi - 1, hi - 1)],
                h[at(hi - 1, hi)],
                h[at(hi, hi - 1)],
                h[at(hi, hi)],
            )
        };
        for k in l..=hi {
            h[at(k, k)] -= mu;
        }
        rot.clear();
        for k in l..hi {
            let (c, s) = givens(h[at(k, k)], h[at(k + 1, k)]);
            for j in k..=hi {
                let x = h[at(k, j)];
                let y = h[at(k + 1, j)];
                h[at(k, j)] = x * c + s * y;
                h[at(k + 1, j)] = -s.conj() * x + y * c;
            }
            rot.push((c, s));
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = l + idx;
            for i in l..=(k + 1).min(hi) {
                let x = h[at(i, k)];
                let y = h[at(i, k + 1)];
                h[at(i, k)] = x * c + y * s.conj();
                h[at(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in l..=hi {
            h[at(k, k)] += mu;
        }
    }
    Ok(eig)
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m = (a + d) * 0.5;
    let (m1, m2) = (m + disc, m - disc);
    if (m1 - d).norm() < (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// `(c, s)` with real `c` such that `[[c, s], [−s̄, c]] · [a, b]ᵀ = [r, 0]ᵀ`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let nrm = na.hypot(nb);
    let sign = a / na;
    (na / nrm, sign * b.conj() / nrm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
        roots.iter().fold(vec![Complex64::new(1.0, 0.0)], |p, r| {
            poly_mul(&p, &[-r, Complex64::new(1.0, 0.0)])
        })
    }

    fn matched(found: &[Complex64], want: &[Complex64], tol: f64) {
        assert_eq!(found.len(), want.len());
        for w in want {
            let d = found.iter().map(|f| (f - w).norm()).fold(f64::MAX, f64::min);
            assert!(d < tol, "root {w} missed by {d}");
        }
    }

    #[test]
    fn simple_roots() {
        let want = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-2.0, 0.5),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.3, 0.3),
        ];
        matched(&polynomial_roots(&from_roots(&want)).unwrap(), &want, 1e-12);
    }

    #[test]
    fn roots_of_unity() {
        let n = 64;
        let mut p = vec![Complex64::new(0.0, 0.0); n + 1];
        p[0] = Complex64::new(-1.0, 0.0);
        p[n] = Complex64::new(1.0, 0.0);
        let want: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        matched(&polynomial_roots(&p).unwrap(), &want, 1e-12);
    }

    #[test]
    fn zero_roots_and_degenerate_input() {
        let p = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-4.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let r = polynomial_roots(&p).unwrap();
        matched(&r, &[Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(4.0, 0.0)], 1e-14);
        assert!(polynomial_roots(&[Complex64::new(3.0, 0.0)]).unwrap().is_empty());
        assert!(polynomial_roots(&[Complex64::new(0.0, 0.0)]).is_err());
        assert!(polynomial_roots(&[Complex64::new(f64::NAN, 0.0), Complex64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn random_high_degree_polynomials_have_small_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &deg in &[40usize, 150, 322] {
            // decaying coefficients, like truncated power series
            let p: Vec<Complex64> = (0..=deg)
                .map(|n| {
                    let s = 0.97f64.powi(n as i32);
                    Complex64::new(rng.gen_range(-1.0..1.0) * s, rng.gen_range(-1.0..1.0) * s)
                })
                .collect();
            let roots = polynomial_roots(&p).unwrap();
            assert_eq!(roots.len(), deg);
            for z in roots.iter().filter(|z| z.norm() < 0.99) {
                let z = polish_newton(&p, *z, 5);
                let scale: f64 = p.iter().enumerate().map(|(n, c)| c.norm() * z.norm().powi(n as i32)).sum();
                assert!(horner(&p, z).norm() <= 1e-12 * scale, "deg {deg}: {z}");
            }
            // Vieta: sum of roots = −p[d−1]/p[d]
            let sum: Complex64 = roots.iter().sum();
            let want = -p[deg - 1] / p[deg];
            assert!((sum - want).norm() <= 1e-7 * want.norm().max(1.0) * deg as f64);
        }
    }

    #[test]
    fn newton_polish_improves() {
        let p = from_roots(&[Complex64::new(0.5, 0.25), Complex64::new(-0.1, 0.0)]);
        let z = polish_newton(&p, Complex64::new(0.49, 0.26), 20);
        assert!((z - Complex64::new(0.5, 0.25)).norm() < 1e-14);
    }
}
