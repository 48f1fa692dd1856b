use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "istm", version, about = "Direct and inverse scattering for the focusing NLSE")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scattering data of a potential at t = 0.
    Direct(RunArgs),
    /// Evolves a scattering-data file to the requested times.
    Evolve {
        /// Scattering-data file to evolve.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Recovers the potential from a scattering-data file.
    Invert {
        /// Scattering-data file to invert.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Direct transform, evolution and inversion for every requested time.
    Solve(RunArgs),
    /// Runs one of the reference examples and reports each check.
    Validate {
        /// Example number, 1 to 4.
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        example: u8,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// chirped-sech, soliton, chirped-gaussian, rational-tail, zero or from-file.
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Samples `x, Re q, Im q` for the from-file potential.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long = "N-direct")]
    pub n_direct: Option<usize>,
    #[arg(long = "N-inverse")]
    pub n_inverse: Option<usize>,
    /// Number of real spectral samples.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Truncation interval as lo:hi.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_domain)]
    pub domain: Option<[f64; 2]>,
    #[arg(long)]
    pub nodes_per_unit: Option<f64>,
    /// Spacing of the recovery grid.
    #[arg(long)]
    pub x_step: Option<f64>,
    /// Comma-separated times.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub times: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML run configuration; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// error, warn, info, debug or trace.
    #[arg(long)]
    pub log_level: Option<String>,
}

fn parse_domain(s: &str) -> Result<[f64; 2], String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if !(lo < hi) {
        return Err(format!("need lo < hi, got {lo}:{hi}"));
    }
    Ok([lo, hi])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_parsing() {
        assert_eq!(parse_domain("-12:12"), Ok([-12.0, 12.0]));
        assert_eq!(parse_domain(" -1.5 : 2 "), Ok([-1.5, 2.0]));
        assert!(parse_domain("12").is_err());
        assert!(parse_domain("3:1").is_err());
        assert!(parse_domain("a:1").is_err());
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "istm", "solve", "--potential", "soliton", "--alpha", "0.5", "--beta", "1.5707963", "--times", "0,1,2",
            "--domain", "-12:12", "--N-inverse", "20", "--K", "400",
        ])
        .unwrap();
        let Command::Solve(run) = cli.command else { panic!("wrong command") };
        assert_eq!(run.times, Some(vec![0.0, 1.0, 2.0]));
        assert_eq!(run.domain, Some([-12.0, 12.0]));
        assert_eq!(run.n_inverse, Some(20));
        assert_eq!(run.k, Some(400));
        assert!(Cli::try_parse_from(["istm", "validate", "5"]).is_err());
    }
}
