use thiserror::Error;

/// Errors produced anywhere in the direct/evolve/inverse pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid potential specification: {0}")]
    Spec(String),

    #[error("ingestion failed at line {line}: {message}")]
    Ingestion { line: u64, message: String },

    #[error("no domain in the ladder satisfies tail threshold {threshold:e}; endpoint magnitudes: {diagnostics}")]
    DomainSelection { threshold: f64, diagnostics: String },

    #[error("base Jost solve did not converge after {iterations} iterations (last update {residual:e})")]
    BaseSolve { iterations: usize, residual: f64 },

    #[error("base solution nearly vanishes (|{which}| = {magnitude:e} at x = {x})")]
    SingularBase {
        which: &'static str,
        magnitude: f64,
        x: f64,
    },

    #[error("coefficient recurrence became unstable at order {order}; last stable order {last_stable}")]
    Instability { order: usize, last_stable: usize },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("spectral point outside the admissible region: {0}")]
    SpectralDomain(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("degenerate eigenvector at z = {z}: both quotient denominators below floor")]
    DegenerateEigenvector { z: String },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("least-squares system is ill-conditioned at x = {x} (condition estimate {condition:e})")]
    IllConditioned { x: f64, condition: f64 },

    #[error("potential recovery is singular at {} point(s), first at x = {first_x}", count)]
    RecoverySingularity { first_x: f64, count: usize },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake-case name of the variant, used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::InvalidGrid(_) => "invalid_grid",
            Self::Spec(_) => "invalid_spec",
            Self::Ingestion { .. } => "ingestion",
            Self::DomainSelection { .. } => "domain_selection",
            Self::BaseSolve { .. } => "base_solve",
            Self::SingularBase { .. } => "singular_base",
            Self::Instability { .. } => "instability",
            Self::OutOfRange(_) => "out_of_range",
            Self::SpectralDomain(_) => "spectral_domain",
            Self::Pole(_) => "pole",
            Self::RootFinding(_) => "root_finding",
            Self::DegenerateEigenvector { .. } => "degenerate_eigenvector",
            Self::Configuration(_) => "configuration",
            Self::IllConditioned { .. } => "ill_conditioned",
            Self::RecoverySingularity { .. } => "recovery_singularity",
            Self::Parse { .. } => "parse",
            Self::Io(_) => "io",
        }
    }
}
