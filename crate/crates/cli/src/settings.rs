//! Merges command-line flags with an optional TOML configuration.

use std::path::PathBuf;

use nlse_istm::inverse::DEFAULT_X_STEP;
use nlse_istm::io::{parse_config_toml, read_potential_csv, ConfigFile};
use nlse_istm::potentials::{select_domain, PotentialKind, PotentialSpec, TruncatedDomain, DEFAULT_TAIL_THRESHOLD};
use nlse_istm::{Error, Result};

use crate::args::RunArgs;

pub const DEFAULT_N_DIRECT: usize = 160;
pub const DEFAULT_N_INVERSE: usize = 50;
pub const DEFAULT_K: usize = 5000;
pub const DEFAULT_NODES_PER_UNIT: f64 = 1500.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub potential: Option<PotentialSpec>,
    pub n_direct: usize,
    pub n_inverse: usize,
    pub k: usize,
    pub domain: Option<(f64, f64)>,
    pub nodes_per_unit: f64,
    pub x_step: f64,
    pub times: Vec<f64>,
    pub out: PathBuf,
    pub log_level: String,
}

impl Settings {
    pub fn resolve(run: &RunArgs) -> Result<Self> {
        let file = match &run.config {
            Some(path) => parse_config_toml(&std::fs::read_to_string(path)?)?,
            None => ConfigFile::default(),
        };
        Self::merge(run, &file)
    }

    pub fn merge(run: &RunArgs, file: &ConfigFile) -> Result<Self> {
        let s = Self {
            potential: potential(run, file)?,
            n_direct: run.n_direct.or(file.n_direct).unwrap_or(DEFAULT_N_DIRECT),
            n_inverse: run.n_inverse.or(file.n_inverse).unwrap_or(DEFAULT_N_INVERSE),
            k: run.k.or(file.k).unwrap_or(DEFAULT_K),
            domain: run.domain.or(file.domain).map(|[lo, hi]| (lo, hi)),
            nodes_per_unit: run.nodes_per_unit.or(file.nodes_per_unit).unwrap_or(DEFAULT_NODES_PER_UNIT),
            x_step: run.x_step.or(file.x_step).unwrap_or(DEFAULT_X_STEP),
            times: run.times.clone().or_else(|| file.times.clone()).unwrap_or_else(|| vec![0.0]),
            out: run.out.clone().or_else(|| file.out.clone()).unwrap_or_else(|| PathBuf::from(".")),
            log_level: run.log_level.clone().or_else(|| file.log_level.clone()).unwrap_or_else(|| "info".into()),
        };
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Configuration(m));
        if self.n_direct == 0 || self.n_inverse == 0 || self.k == 0 {
            return bad(format!(
                "N-direct, N-inverse and K must be positive (got {}, {}, {})",
                self.n_direct, self.n_inverse, self.k
            ));
        }
        if !(self.nodes_per_unit > 0.0 && self.nodes_per_unit.is_finite()) {
            return bad(format!("nodes per unit must be positive, got {}", self.nodes_per_unit));
        }
        if !(self.x_step > 0.0 && self.x_step.is_finite()) {
            return bad(format!("x step must be positive, got {}", self.x_step));
        }
        if self.times.is_empty() || self.times.iter().any(|t| !t.is_finite()) {
            return bad("times must be a nonempty list of finite values".into());
        }
        if let Some((lo, hi)) = self.domain {
            TruncatedDomain::user(lo, hi)?;
        }
        Ok(())
    }

    pub fn require_potential(&self) -> Result<&PotentialSpec> {
        self.potential
            .as_ref()
            .ok_or_else(|| Error::Configuration("no potential given (use --potential or a config file)".into()))
    }

    /// The explicit domain if given, the sample range for a from-file
    /// potential, otherwise the smallest ladder interval whose tails are
    /// below the default threshold.
    pub fn direct_domain(&self, spec: &PotentialSpec) -> Result<TruncatedDomain> {
        if let Some((lo, hi)) = self.domain {
            return TruncatedDomain::user(lo, hi);
        }
        if spec.kind == PotentialKind::FromFile {
            let path = spec.file_path.as_ref().ok_or_else(|| Error::Spec("from-file potential without --file".into()))?;
            let samples = read_potential_csv(path)?;
            let (lo, hi) = match (samples.x.first(), samples.x.last()) {
                (Some(&lo), Some(&hi)) => (lo, hi),
                _ => return Err(Error::Ingestion { line: 0, message: "file has no samples".into() }),
            };
            return TruncatedDomain::user(lo, hi);
        }
        select_domain(spec, DEFAULT_TAIL_THRESHOLD)
    }
}

fn potential(run: &RunArgs, file: &ConfigFile) -> Result<Option<PotentialSpec>> {
    let section = file.potential.as_ref();
    let kind: PotentialKind = match (&run.potential, section) {
        (Some(k), _) => k.parse()?,
        (None, Some(sec)) => sec.kind.parse()?,
        (None, None) => return Ok(None),
    };
    let mut spec = PotentialSpec::new(kind);
    if let Some(sec) = section {
        let base = sec.to_spec()?;
        if base.kind == kind {
            spec = base;
        }
    }
    let flags = [
        ("A", run.a),
        ("gamma", run.gamma),
        ("alpha", run.alpha),
        ("beta", run.beta),
        ("delta", run.delta),
        ("theta", run.theta),
        ("sigma", run.sigma),
        ("mu", run.mu),
    ];
    for (name, value) in flags {
        if let Some(v) = value {
            spec = spec.with(name, v);
        }
    }
    if let Some(path) = &run.file {
        spec.file_path = Some(path.clone());
    }
    spec.validate()?;
    Ok(Some(spec))
}
