//! File formats: sampled potentials (CSV), solutions (CSV), scattering data
//! (JSON) and run configuration (TOML).
//!
//! Floats are written in shortest round-trip form, so write-then-parse is
//! bit-exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{PotentialKind, PotentialSpec};
use crate::scattering::{ScatteringData, ScatteringMeta};

/// Unitarity defect above which a loaded scattering file is flagged.
pub const UNITARITY_FLAG_TOLERANCE: f64 = 1e-6;

pub const SOLUTION_HEADER: [&str; 4] = ["x", "re_q", "im_q", "abs_q"];

// ---------------------------------------------------------------------------
// potential samples

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSamples {
    pub x: Vec<f64>,
    pub q: Vec<Complex64>,
}

/// Parses `x, Re q, Im q` rows. Blank lines and `#` comments are skipped;
/// one non-numeric header row is allowed before the data. `x` must be
/// strictly increasing.
pub fn parse_potential_csv(text: &str) -> Result<PotentialSamples> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut x = Vec::new();
    let mut q = Vec::new();
    let mut seen_header = false;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Ingestion {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let err = |message: String| Error::Ingestion { line, message };
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 3 {
            return Err(err(format!("expected 3 columns, found {}", record.len())));
        }
        let parsed: Vec<std::result::Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
        if parsed.iter().all(|p| p.is_err()) && x.is_empty() && !seen_header {
            seen_header = true;
            continue;
        }
        let mut vals = [0.0; 3];
        for (i, p) in parsed.into_iter().enumerate() {
            let v = p.map_err(|_| err(format!("column {} is not a number: '{}'", i + 1, &record[i])))?;
            if !v.is_finite() {
                return Err(err(format!("column {} is not finite", i + 1)));
            }
            vals[i] = v;
        }
        if let Some(&prev) = x.last() {
            if !(vals[0] > prev) {
                return Err(err(format!("x = {} does not exceed previous {prev}", vals[0])));
            }
        }
        x.push(vals[0]);
        q.push(Complex64::new(vals[1], vals[2]));
    }
    if x.is_empty() {
        return Err(Error::Ingestion {
            line: 0,
            message: "no samples".into(),
        });
    }
    Ok(PotentialSamples { x, q })
}

pub fn read_potential_csv(path: &Path) -> Result<PotentialSamples> {
    let text = std::fs::read_to_string(path)?;
    parse_potential_csv(&text)
}

pub fn potential_csv_string(x: &[f64], q: &[Complex64]) -> String {
    let mut s = String::from("x,re_q,im_q\n");
    for (xi, qi) in x.iter().zip(q) {
        let _ = writeln!(s, "{:?},{:?},{:?}", xi, qi.re, qi.im);
    }
    s
}

// ---------------------------------------------------------------------------
// solutions

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    pub q: Vec<Complex64>,
}

pub fn solution_csv_string(x: &[f64], q: &[Complex64]) -> String {
    let mut s = SOLUTION_HEADER.join(",");
    s.push('\n');
    for (xi, qi) in x.iter().zip(q) {
        let _ = writeln!(s, "{:?},{:?},{:?},{:?}", xi, qi.re, qi.im, qi.norm());
    }
    s
}

pub fn write_solution_csv(path: &Path, x: &[f64], q: &[Complex64]) -> Result<()> {
    std::fs::write(path, solution_csv_string(x, q))?;
    Ok(())
}

/// Parses a solution file; `abs_q` is read but not trusted.
pub fn parse_solution_csv(text: &str) -> Result<Solution> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| parse_err_csv(&e))?.clone();
    if header.iter().ne(SOLUTION_HEADER.iter().copied()) {
        return Err(Error::Parse {
            location: "line 1".into(),
            message: format!("expected header {}", SOLUTION_HEADER.join(",")),
        });
    }
    let mut x = Vec::new();
    let mut q = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err_csv(&e))?;
        let line = record.position().map_or(0, |p| p.line());
        let mut vals = [0.0; 4];
        for (i, field) in record.iter().enumerate() {
            vals[i] = field.parse().map_err(|_| Error::Parse {
                location: format!("line {line}, field {}", SOLUTION_HEADER[i]),
                message: format!("'{field}' is not a number"),
            })?;
        }
        x.push(vals[0]);
        q.push(Complex64::new(vals[1], vals[2]));
    }
    Ok(Solution { x, q })
}

fn parse_err_csv(e: &csv::Error) -> Error {
    Error::Parse {
        location: e
            .position()
            .map_or_else(|| "unknown".to_string(), |p| format!("line {}", p.line())),
        message: e.to_string(),
    }
}

// ---------------------------------------------------------------------------
// scattering data

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScatteringFile {
    rho: Vec<f64>,
    a: Vec<[f64; 2]>,
    b: Vec<[f64; 2]>,
    eigenvalues: Vec<[f64; 2]>,
    norming_constants: Vec<[f64; 2]>,
    meta: MetaFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    validation: Option<ValidationReport>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetaFile {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    domain: [f64; 2],
    nodes_per_unit: f64,
    t: f64,
}

/// Identity check attached to a scattering-data file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub max_unitarity_defect: f64,
    pub tolerance: f64,
    pub flagged: bool,
}

impl ValidationReport {
    pub fn of(data: &ScatteringData) -> Self {
        let d = data.unitarity_defect();
        Self {
            max_unitarity_defect: d,
            tolerance: UNITARITY_FLAG_TOLERANCE,
            flagged: !(d <= UNITARITY_FLAG_TOLERANCE),
        }
    }
}

fn pair(c: &Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn unpair(p: &[f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn scattering_json_string(data: &ScatteringData) -> Result<String> {
    let file = ScatteringFile {
        rho: data.rho.clone(),
        a: data.a.iter().map(pair).collect(),
        b: data.b.iter().map(pair).collect(),
        eigenvalues: data.eigenvalues.iter().map(pair).collect(),
        norming_constants: data.norming_constants.iter().map(pair).collect(),
        meta: MetaFile {
            n: data.meta.n,
            k: data.meta.k,
            domain: [data.meta.domain.0, data.meta.domain.1],
            nodes_per_unit: data.meta.nodes_per_unit,
            t: data.meta.t,
        },
        validation: Some(ValidationReport::of(data)),
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Parse {
        location: "serialization".into(),
        message: e.to_string(),
    })
}

/// Parses a scattering-data file. The returned validation report is
/// recomputed from the samples; any stored report is ignored.
pub fn parse_scattering_json(text: &str) -> Result<(ScatteringData, ValidationReport)> {
    let file: ScatteringFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let field = |name: &str, message: String| Error::Parse {
        location: format!("field {name}"),
        message,
    };
    let k = file.rho.len();
    if file.a.len() != k || file.b.len() != k {
        return Err(field(
            "a/b",
            format!("{} rho samples but {} a and {} b values", k, file.a.len(), file.b.len()),
        ));
    }
    if file.eigenvalues.len() != file.norming_constants.len() {
        return Err(field(
            "norming_constants",
            format!(
                "{} eigenvalues but {} norming constants",
                file.eigenvalues.len(),
                file.norming_constants.len()
            ),
        ));
    }
    if file.rho.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(field("rho", "samples must be strictly increasing".into()));
    }
    if let Some(e) = file.eigenvalues.iter().find(|e| !(e[1] > 0.0)) {
        return Err(field(
            "eigenvalues",
            format!("eigenvalue {}{:+}i is not in the upper half plane", e[0], e[1]),
        ));
    }
    let data = ScatteringData {
        rho: file.rho,
        a: file.a.iter().map(unpair).collect(),
        b: file.b.iter().map(unpair).collect(),
        eigenvalues: file.eigenvalues.iter().map(unpair).collect(),
        norming_constants: file.norming_constants.iter().map(unpair).collect(),
        meta: ScatteringMeta {
            n: file.meta.n,
            k: file.meta.k,
            domain: (file.meta.domain[0], file.meta.domain[1]),
            nodes_per_unit: file.meta.nodes_per_unit,
            t: file.meta.t,
        },
    };
    let report = ValidationReport::of(&data);
    Ok((data, report))
}

pub fn write_scattering_json(path: &Path, data: &ScatteringData) -> Result<()> {
    std::fs::write(path, scattering_json_string(data)?)?;
    Ok(())
}

pub fn read_scattering_json(path: &Path) -> Result<(ScatteringData, ValidationReport)> {
    parse_scattering_json(&std::fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// configuration

/// Contents of a TOML run configuration; every field is optional so that
/// command-line flags can fill or override them.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub potential: Option<PotentialSection>,
    pub n_direct: Option<usize>,
    pub n_inverse: Option<usize>,
    #[serde(rename = "K", alias = "k")]
    pub k: Option<usize>,
    pub domain: Option<[f64; 2]>,
    pub nodes_per_unit: Option<f64>,
    pub x_step: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub log_level: Option<String>,
}

/// `[potential]` table: `kind`, optional `file`, and numeric parameters
/// named as in [`PotentialKind::required_params`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSection {
    pub kind: String,
    pub file: Option<PathBuf>,
    #[serde(flatten)]
    pub params: BTreeMap<String, f64>,
}

impl PotentialSection {
    pub fn to_spec(&self) -> Result<PotentialSpec> {
        let kind: PotentialKind = self.kind.parse()?;
        let mut spec = PotentialSpec::new(kind);
        spec.params = self.params.clone();
        spec.file_path = self.file.clone();
        Ok(spec)
    }
}

pub fn parse_config_toml(text: &str) -> Result<ConfigFile> {
    toml::from_str(text).map_err(|e| Error::Configuration(match e.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            format!("line {line}: {}", e.message())
        }
        None => e.message().to_string(),
    }))
}
