//! Closed-form references: complex Gamma, the scattering data of the chirped
//! sech potential, and the single soliton.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

type C = Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn pole_at(w: C) -> bool {
    w.im == 0.0 && w.re <= 0.0 && w.re == w.re.round()
}

/// `ln Γ(w)` (one branch; only its exponential is meaningful).
pub fn ln_gamma(w: C) -> Result<C> {
    if pole_at(w) {
        return Err(Error::Pole(format!("Gamma has a pole at {w}")));
    }
    if w.re < 0.5 {
        // Γ(w) Γ(1 − w) = π / sin(πw)
        let s = (w * PI).sin();
        return Ok(C::new(PI.ln(), 0.0) - s.ln() - ln_gamma(1.0 - w)?);
    }
    let w = w - 1.0;
    let mut x = C::new(LANCZOS[0], 0.0);
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        x += p / (w + i as f64);
    }
    let t = w + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (w + 0.5) * t.ln() - t + x.ln())
}

pub fn gamma(w: C) -> Result<C> {
    ln_gamma(w).map(C::exp)
}

/// `1/Γ(w)`, entire: zero at the poles of Γ.
pub fn recip_gamma(w: C) -> C {
    match ln_gamma(w) {
        Ok(l) => (-l).exp(),
        Err(_) => C::new(0.0, 0.0),
    }
}

/// Parameters of `q(x) = −iA sech(x) exp(−iγA ln cosh x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Example1Params {
    pub a: f64,
    pub gamma: f64,
}

impl Example1Params {
    pub fn new(a: f64, gamma: f64) -> Result<Self> {
        if !(a > 0.0) || !gamma.is_finite() {
            return Err(Error::Spec(format!("need A > 0 and finite γ, got A = {a}, γ = {gamma}")));
        }
        Ok(Self { a, gamma })
    }

    /// `T = √(γ²/4 − 1)`, principal branch.
    pub fn t(&self) -> C {
        C::new(self.gamma * self.gamma / 4.0 - 1.0, 0.0).sqrt()
    }

    pub fn omega(&self, rho: C) -> C {
        -C::i() * rho - C::new(0.0, self.a * self.gamma / 2.0) + 0.5
    }

    pub fn omega_plus(&self) -> C {
        -C::i() * self.a * (self.t() + self.gamma / 2.0)
    }

    pub fn omega_minus(&self) -> C {
        C::i() * self.a * (self.t() - self.gamma / 2.0)
    }

    /// `M = ⌊1/2 + A|T|⌋` when `T` is imaginary, otherwise none.
    pub fn eigenvalue_count(&self) -> usize {
        if self.gamma.abs() >= 2.0 {
            return 0;
        }
        (0.5 + self.a * self.t().norm()).floor() as usize
    }

    /// `ρₘ = AT − i(m − 1/2)` for `m = 1..=M`.
    pub fn eigenvalues(&self) -> Vec<C> {
        (1..=self.eigenvalue_count())
            .map(|m| self.a * self.t() - C::new(0.0, m as f64 - 0.5))
            .collect()
    }
}

/// Closed-form `(a(ρ), b(ρ))`; `b` is meaningful on the real line and at
/// the eigenvalues, where it equals the norming constant.
pub fn analytic_ab_example1(p: &Example1Params, rho: C) -> Result<(C, C)> {
    let w = p.omega(rho);
    let (wp, wm) = (p.omega_plus(), p.omega_minus());
    let num_a = ln_gamma(w)? + ln_gamma(w - wm - wp)?;
    let a = num_a.exp() * recip_gamma(w - wp) * recip_gamma(w - wm);
    let pre = C::i() / p.a * (C::new(0.0, -p.gamma * p.a) * 2f64.ln()).exp();
    let num_b = ln_gamma(w)? + ln_gamma(1.0 - w + wm + wp)?;
    let b = pre * num_b.exp() * recip_gamma(wp) * recip_gamma(wm);
    Ok((a, b))
}

/// `u(x, t) = 2β sech(2βx + 8αβt − δ) exp(−2iαx − 4i(α² − β²)t − iθ)`.
pub fn soliton_solution(alpha: f64, beta: f64, delta: f64, theta: f64, x: f64, t: f64) -> C {
    let arg = 2.0 * beta * x + 8.0 * alpha * beta * t - delta;
    let phase = -2.0 * alpha * x - 4.0 * (alpha * alpha - beta * beta) * t - theta;
    let sech = if arg.abs() > 700.0 { 0.0 } else { 1.0 / arg.cosh() };
    C::from_polar(2.0 * beta * sech, phase)
}
