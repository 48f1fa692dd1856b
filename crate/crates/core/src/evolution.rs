//! Time evolution of scattering data under the focusing NLSE:
//! `b(ρ) → b(ρ) e^{4iρ²t}`, `c_m → c_m e^{4iρ_m²t}`, with `a` and the
//! eigenvalues unchanged.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::scattering::ScatteringData;

fn phase(rho: Complex64, dt: f64) -> Complex64 {
    (Complex64::new(0.0, 4.0 * dt) * rho * rho).exp()
}

/// Advances the data by `dt` from its current time stamp.
pub fn evolve_by(sd: &ScatteringData, dt: f64) -> ScatteringData {
    let mut out = sd.clone();
    if dt == 0.0 {
        return out;
    }
    out.b
        .par_iter_mut()
        .zip(sd.rho.par_iter())
        .for_each(|(b, &r)| *b *= phase(Complex64::new(r, 0.0), dt));
    for (c, &rho) in out.norming_constants.iter_mut().zip(&sd.eigenvalues) {
        *c *= phase(rho, dt);
    }
    out.meta.t = sd.meta.t + dt;
    out
}

/// Data at absolute time `t`, composing from the stored time stamp.
pub fn evolve(sd: &ScatteringData, t: f64) -> ScatteringData {
    let mut out = evolve_by(sd, t - sd.meta.t);
    out.meta.t = t;
    out
}
