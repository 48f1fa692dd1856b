use num_complex::Complex64;

/// Run parameters carried alongside a scattering-data set.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringMeta {
    /// Number of SPPS terms used for the direct transform.
    pub n: usize,
    /// Number of real spectral samples.
    pub k: usize,
    pub domain: (f64, f64),
    pub nodes_per_unit: f64,
    /// Absolute time the data corresponds to.
    pub t: f64,
}

/// Samples of `a`, `b` on a real ρ-grid plus the discrete spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringData {
    pub rho: Vec<f64>,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    /// Eigenvalues in the upper half plane, sorted by decreasing imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub norming_constants: Vec<Complex64>,
    pub meta: ScatteringMeta,
}

impl ScatteringData {
    /// `max | |a|² + |b|² − 1 |` over the real samples.
    pub fn unitarity_defect(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}
