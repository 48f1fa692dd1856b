//! Benchmark initial conditions, sampled-file potentials and truncation
//! domain selection.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_quad::{integrate_values, CubicSpline, SampledComplexFunction, UniformGrid};
use crate::io::read_potential_csv;

/// Symmetric half-widths tried by [`select_domain`], smallest first.
pub const DOMAIN_LADDER: [f64; 5] = [12.0, 25.0, 50.0, 100.0, 200.0];

pub const DEFAULT_TAIL_THRESHOLD: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    /// `-iA sech(x) exp(-iγA ln cosh x)`
    ChirpedSech,
    /// `2β sech(2βx - δ) exp(-i(2αx + θ))`
    Soliton,
    /// `A e^{iμx} e^{-x²/σ}`
    ChirpedGaussian,
    /// `A e^{iμx} / (x + i)^4`
    RationalTail,
    /// `q ≡ 0`
    Zero,
    /// Three-column CSV samples, spline-interpolated and zero outside the file range.
    FromFile,
}

impl PotentialKind {
    pub fn required_params(self) -> &'static [&'static str] {
        match self {
            Self::ChirpedSech => &["A", "gamma"],
            Self::Soliton => &["alpha", "beta", "delta", "theta"],
            Self::ChirpedGaussian => &["A", "sigma", "mu"],
            Self::RationalTail => &["A", "mu"],
            Self::Zero | Self::FromFile => &[],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::ChirpedSech => "chirped-sech",
            Self::Soliton => "soliton",
            Self::ChirpedGaussian => "chirped-gaussian",
            Self::RationalTail => "rational-tail",
            Self::Zero => "zero",
            Self::FromFile => "from-file",
        }
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PotentialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Ok(match norm.as_str() {
            "chirped-sech" | "sech" => Self::ChirpedSech,
            "soliton" => Self::Soliton,
            "chirped-gaussian" | "gaussian" => Self::ChirpedGaussian,
            "rational-tail" | "rational" => Self::RationalTail,
            "zero" => Self::Zero,
            "from-file" | "file" => Self::FromFile,
            _ => return Err(Error::Spec(format!("unknown potential kind '{s}'"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub params: BTreeMap<String, f64>,
    pub file_path: Option<PathBuf>,
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind) -> Self {
        Self {
            kind,
            params: BTreeMap::new(),
            file_path: None,
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn chirped_sech(a: f64, gamma: f64) -> Self {
        Self::new(PotentialKind::ChirpedSech)
            .with("A", a)
            .with("gamma", gamma)
    }

    pub fn soliton(alpha: f64, beta: f64, delta: f64, theta: f64) -> Self {
        Self::new(PotentialKind::Soliton)
            .with("alpha", alpha)
            .with("beta", beta)
            .with("delta", delta)
            .with("theta", theta)
    }

    pub fn chirped_gaussian(a: f64, sigma: f64, mu: f64) -> Self {
        Self::new(PotentialKind::ChirpedGaussian)
            .with("A", a)
            .with("sigma", sigma)
            .with("mu", mu)
    }

    pub fn rational_tail(a: f64, mu: f64) -> Self {
        Self::new(PotentialKind::RationalTail)
            .with("A", a)
            .with("mu", mu)
    }

    pub fn zero() -> Self {
        Self::new(PotentialKind::Zero)
    }

    pub fn from_file(path: impl Into<PathBuf>) -> Self {
        Self {
            file_path: Some(path.into()),
            ..Self::new(PotentialKind::FromFile)
        }
    }

    pub fn param(&self, name: &str) -> Result<f64> {
        let v = *self.params.get(name).ok_or_else(|| {
            Error::Spec(format!("{} potential needs parameter '{name}'", self.kind))
        })?;
        if !v.is_finite() {
            return Err(Error::Spec(format!("parameter '{name}' is not finite")));
        }
        Ok(v)
    }

    /// Checks presence and admissible ranges of the parameters.
    pub fn validate(&self) -> Result<()> {
        for p in self.kind.required_params() {
            self.param(p)?;
        }
        let positive = |name: &str| -> Result<()> {
            if self.param(name)? > 0.0 {
                Ok(())
            } else {
                Err(Error::Spec(format!("{} requires {name} > 0", self.kind)))
            }
        };
        match self.kind {
            PotentialKind::ChirpedSech => positive("A"),
            PotentialKind::Soliton => positive("beta"),
            PotentialKind::ChirpedGaussian => positive("A").and(positive("sigma")),
            PotentialKind::FromFile if self.file_path.is_none() => {
                Err(Error::Spec("from-file potential needs a file path".into()))
            }
            _ => Ok(()),
        }
    }

    /// Compiles the spec into a pointwise evaluator (reading the file once).
    pub fn evaluator(&self) -> Result<Potential> {
        self.validate()?;
        let p = |n: &str| self.param(n).unwrap_or(0.0);
        Ok(match self.kind {
            PotentialKind::ChirpedSech => Potential::ChirpedSech {
                a: p("A"),
                gamma: p("gamma"),
            },
            PotentialKind::Soliton => Potential::Soliton {
                alpha: p("alpha"),
                beta: p("beta"),
                delta: p("delta"),
                theta: p("theta"),
            },
            PotentialKind::ChirpedGaussian => Potential::ChirpedGaussian {
                a: p("A"),
                sigma: p("sigma"),
                mu: p("mu"),
            },
            PotentialKind::RationalTail => Potential::RationalTail {
                a: p("A"),
                mu: p("mu"),
            },
            PotentialKind::Zero => Potential::Zero,
            PotentialKind::FromFile => {
                let path = self.file_path.as_ref().expect("validated");
                let samples = read_potential_csv(path)?;
                if samples.x.len() < 4 {
                    return Err(Error::Ingestion {
                        line: 0,
                        message: format!("need at least 4 samples, file has {}", samples.x.len()),
                    });
                }
                Potential::Sampled(Arc::new(CubicSpline::new(samples.x, samples.q)?))
            }
        })
    }
}

/// A potential ready for pointwise evaluation.
#[derive(Clone, Debug)]
pub enum Potential {
    ChirpedSech { a: f64, gamma: f64 },
    Soliton { alpha: f64, beta: f64, delta: f64, theta: f64 },
    ChirpedGaussian { a: f64, sigma: f64, mu: f64 },
    RationalTail { a: f64, mu: f64 },
    Zero,
    Sampled(Arc<CubicSpline>),
}

impl Potential {
    pub fn value(&self, x: f64) -> Complex64 {
        let i = Complex64::i();
        match *self {
            Self::ChirpedSech { a, gamma } => {
                let lc = ln_cosh(x);
                -i * a * sech(x) * Complex64::from_polar(1.0, -gamma * a * lc)
            }
            Self::Soliton {
                alpha,
                beta,
                delta,
                theta,
            } => {
                Complex64::from_polar(2.0 * beta * sech(2.0 * beta * x - delta), -(2.0 * alpha * x + theta))
            }
            Self::ChirpedGaussian { a, sigma, mu } => {
                Complex64::from_polar(a * (-x * x / sigma).exp(), mu * x)
            }
            Self::RationalTail { a, mu } => {
                Complex64::from_polar(a, mu * x) / (Complex64::new(x, 1.0)).powi(4)
            }
            Self::Zero => Complex64::new(0.0, 0.0),
            Self::Sampled(ref spline) => {
                let (lo, hi) = spline.range();
                if x < lo || x > hi {
                    Complex64::new(0.0, 0.0)
                } else {
                    spline.eval(x)
                }
            }
        }
    }
}

fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

fn ln_cosh(x: f64) -> f64 {
    let ax = x.abs();
    ax + (-2.0 * ax).exp().ln_1p() - std::f64::consts::LN_2
}

/// Samples the potential on `grid`.
pub fn evaluate(spec: &PotentialSpec, grid: &Arc<UniformGrid>) -> Result<SampledComplexFunction> {
    let pot = spec.evaluator()?;
    Ok(SampledComplexFunction::from_fn(Arc::clone(grid), |x| {
        pot.value(x)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncatedDomain {
    pub x_min: f64,
    pub x_max: f64,
    pub tail_threshold: f64,
}

impl TruncatedDomain {
    /// A user-chosen interval; no tail check is made.
    pub fn user(x_min: f64, x_max: f64) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidGrid(format!(
                "domain [{x_min}, {x_max}] is not a finite increasing interval"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            tail_threshold: f64::INFINITY,
        })
    }
}

/// Smallest ladder interval whose endpoint magnitudes are within `tail_threshold`.
pub fn select_domain(spec: &PotentialSpec, tail_threshold: f64) -> Result<TruncatedDomain> {
    if !(tail_threshold > 0.0) {
        return Err(Error::Spec(format!(
            "tail threshold must be positive, got {tail_threshold}"
        )));
    }
    let pot = spec.evaluator()?;
    let mut diagnostics = Vec::new();
    for &l in &DOMAIN_LADDER {
        let tail = pot.value(-l).norm().max(pot.value(l).norm());
        if tail <= tail_threshold {
            return Ok(TruncatedDomain {
                x_min: -l,
                x_max: l,
                tail_threshold,
            });
        }
        diagnostics.push(format!("±{l}: {tail:.3e}"));
    }
    Err(Error::DomainSelection {
        threshold: tail_threshold,
        diagnostics: diagnostics.join(", "),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassQReport {
    /// `∫ (1+|x|^k)|q| dx` over the grid.
    pub l1_weighted: f64,
    /// `(∫ ((1+|x|^k)|q|)² dx)^{1/2}` over the grid.
    pub l2_weighted: f64,
    /// The weighted magnitude at an endpoint exceeds 1e-3 of its maximum,
    /// so the truncated norms are probably not converged.
    pub non_decaying: bool,
}

/// Advisory weighted-norm check for the decay class of `q`.
pub fn check_class_q(q: &SampledComplexFunction, k: u32) -> ClassQReport {
    let grid = q.grid();
    let weighted: Vec<f64> = grid
        .points()
        .iter()
        .zip(q.values())
        .map(|(&x, v)| (1.0 + x.abs().powi(k as i32)) * v.norm())
        .collect();
    let h = grid.step();
    let as_c = |f: &dyn Fn(f64) -> f64| -> Vec<Complex64> {
        weighted.iter().map(|&w| Complex64::new(f(w), 0.0)).collect()
    };
    let l1 = integrate_values(&as_c(&|w| w), h).map_or(f64::NAN, |v| v.re);
    let l2 = integrate_values(&as_c(&|w| w * w), h).map_or(f64::NAN, |v| v.re.max(0.0).sqrt());
    let peak = weighted.iter().copied().fold(0.0, f64::max);
    let ends = weighted[0].max(weighted[weighted.len() - 1]);
    ClassQReport {
        l1_weighted: l1,
        l2_weighted: l2,
        non_decaying: peak > 0.0 && ends > 1e-3 * peak,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn at0(spec: &PotentialSpec) -> Complex64 {
        spec.evaluator().unwrap().value(0.0)
    }

    #[test]
    fn closed_forms_at_origin() {
        let q = at0(&PotentialSpec::chirped_sech(1.0, 0.1));
        assert!((q - Complex64::new(0.0, -1.0)).norm() < 1e-15);

        let q = at0(&PotentialSpec::soliton(0.5, PI / 2.0, 0.1, 0.1));
        let want = Complex64::from_polar(PI / (0.1f64).cosh(), -0.1);
        assert!((q - want).norm() < 1e-14);

        let q = at0(&PotentialSpec::chirped_gaussian(2.5, 2.0, 1.0));
        assert!((q - Complex64::new(2.5, 0.0)).norm() < 1e-15);

        let q = at0(&PotentialSpec::rational_tail(PI / 2.0, 1.0));
        assert!((q - Complex64::new(PI / 2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn chirped_sech_stays_finite_far_out() {
        let pot = PotentialSpec::chirped_sech(1.0, 0.1).evaluator().unwrap();
        let v = pot.value(800.0);
        assert!(v.re.is_finite() && v.im.is_finite());
        let x = 3.0f64;
        let direct = -Complex64::i()
            * (1.0 / x.cosh())
            * Complex64::from_polar(1.0, -0.1 * x.cosh().ln());
        assert!((pot.value(x) - direct).norm() < 1e-15);
    }

    #[test]
    fn parameter_validation() {
        assert!(PotentialSpec::chirped_sech(0.0, 0.1).validate().is_err());
        assert!(PotentialSpec::soliton(0.5, -1.0, 0.0, 0.0).validate().is_err());
        assert!(PotentialSpec::chirped_gaussian(1.0, 0.0, 1.0).validate().is_err());
        assert!(PotentialSpec::new(PotentialKind::Soliton).validate().is_err());
        assert!(PotentialSpec::new(PotentialKind::FromFile).validate().is_err());
        assert!(PotentialSpec::zero().validate().is_ok());
        assert!(PotentialSpec::chirped_sech(1.0, f64::NAN).validate().is_err());
    }

    #[test]
    fn kind_names_parse() {
        for k in [
            PotentialKind::ChirpedSech,
            PotentialKind::Soliton,
            PotentialKind::ChirpedGaussian,
            PotentialKind::RationalTail,
            PotentialKind::Zero,
            PotentialKind::FromFile,
        ] {
            assert_eq!(k.name().parse::<PotentialKind>().unwrap(), k);
        }
        assert_eq!("chirped_sech".parse::<PotentialKind>().unwrap(), PotentialKind::ChirpedSech);
        assert!("square".parse::<PotentialKind>().is_err());
    }

    #[test]
    fn domain_ladder() {
        // sech(12) ≈ 1.2e-5 just misses 1e-5
        let d = select_domain(&PotentialSpec::chirped_sech(1.0, 0.1), 1e-5).unwrap();
        assert_eq!((d.x_min, d.x_max), (-25.0, 25.0));
        let d = select_domain(&PotentialSpec::chirped_sech(1.0, 0.1), 2e-5).unwrap();
        assert_eq!((d.x_min, d.x_max), (-12.0, 12.0));
        let d = select_domain(&PotentialSpec::zero(), 1e-7).unwrap();
        assert_eq!((d.x_min, d.x_max), (-12.0, 12.0));
        // |A/(x+i)^4| at 100 is 1.57e-8, so the quartic tail settles at ±100
        // for 1e-7 and needs ±200 for 1e-8.
        let tail = PotentialSpec::rational_tail(PI / 2.0, 1.0);
        assert_eq!(select_domain(&tail, 1e-7).unwrap().x_max, 100.0);
        assert_eq!(select_domain(&tail, 1e-8).unwrap().x_max, 200.0);
        match select_domain(&tail, 1e-12) {
            Err(Error::DomainSelection { diagnostics, .. }) => assert!(diagnostics.contains("±200")),
            other => panic!("{other:?}"),
        }
        assert!(select_domain(&tail, 0.0).is_err());
    }

    #[test]
    fn class_q_reports() {
        let g = Arc::new(UniformGrid::new(-12.0, 12.0, 100.0).unwrap());
        let z = SampledComplexFunction::zeros(Arc::clone(&g));
        let r = check_class_q(&z, 1);
        assert_eq!((r.l1_weighted, r.l2_weighted, r.non_decaying), (0.0, 0.0, false));

        let sech_on = |l: f64| {
            let g = Arc::new(UniformGrid::new(-l, l, 200.0).unwrap());
            check_class_q(&SampledComplexFunction::from_fn(g, |x| Complex64::new(sech(x), 0.0)), 1)
        };
        let (a, b) = (sech_on(12.0), sech_on(24.0));
        assert!(!a.non_decaying);
        assert!((a.l1_weighted - b.l1_weighted).abs() < 1e-3 * b.l1_weighted);
        assert!((a.l2_weighted - b.l2_weighted).abs() < 1e-3 * b.l2_weighted);

        let one_on = |l: f64| {
            let g = Arc::new(UniformGrid::new(-l, l, 20.0).unwrap());
            check_class_q(&SampledComplexFunction::from_fn(g, |_| Complex64::new(1.0, 0.0)), 0)
        };
        let (a, b) = (one_on(10.0), one_on(20.0));
        assert!(a.non_decaying && b.non_decaying);
        assert!((a.l1_weighted - 40.0).abs() < 1e-10);
        assert!((b.l1_weighted - 80.0).abs() < 1e-10);
    }
}
