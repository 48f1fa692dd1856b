use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use nlse_istm::direct::{run_direct, DirectConfig, RhoGrid};
use nlse_istm::evolution::evolve;
use nlse_istm::inverse::{run_inverse, InverseConfig, InverseSolveResult};
use nlse_istm::io::{read_scattering_json, write_scattering_json, write_solution_csv};
use nlse_istm::scattering::ScatteringData;
use nlse_istm::validation::{validate_example, ValidationSettings};
use nlse_istm::{Error, Result};

use crate::settings::Settings;

/// `scattering_t{t}.json`, `solution_t{t}.csv`.
pub fn scattering_path(out: &Path, t: f64) -> PathBuf {
    out.join(format!("scattering_t{t}.json"))
}

pub fn solution_path(out: &Path, t: f64) -> PathBuf {
    out.join(format!("solution_t{t}.csv"))
}

fn ensure_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    Ok(())
}

fn print_spectrum(sd: &ScatteringData) {
    println!("eigenvalues: {}", sd.eigenvalues.len());
    for (m, (rho, c)) in sd.eigenvalues.iter().zip(&sd.norming_constants).enumerate() {
        println!(
            "  rho_{} = {:+.15e} {:+.15e}i   c_{} = {:+.15e} {:+.15e}i",
            m + 1,
            rho.re,
            rho.im,
            m + 1,
            c.re,
            c.im
        );
    }
}

fn direct_stage(s: &Settings) -> Result<ScatteringData> {
    let spec = s.require_potential()?;
    let mut cfg = DirectConfig::new(s.n_direct, s.direct_domain(spec)?);
    cfg.nodes_per_unit = s.nodes_per_unit;
    cfg.rho_grid = RhoGrid::log_symmetric(s.k);
    info!(
        "direct: {} on [{}, {}], N = {}, K = {}, {} nodes/unit",
        spec.kind.name(),
        cfg.domain.x_min,
        cfg.domain.x_max,
        cfg.order,
        s.k,
        cfg.nodes_per_unit
    );
    let start = Instant::now();
    let r = run_direct(spec, &cfg)?;
    info!("direct: done in {:.2} s", start.elapsed().as_secs_f64());
    print_spectrum(&r.data);
    println!("max ||a|^2+|b|^2-1| = {:.3e}", r.data.unitarity_defect());
    Ok(r.data)
}

fn inverse_stage(sd: &ScatteringData, s: &Settings) -> Result<InverseSolveResult> {
    let domain = s.domain.unwrap_or(sd.meta.domain);
    let mut cfg = InverseConfig::on_domain(s.n_inverse, domain, s.x_step)?;
    cfg.k = Some(s.k.min(sd.rho.len()));
    cfg.residual_report = true;
    info!("invert: t = {}, N = {}, {} points", sd.meta.t, cfg.n, cfg.x_grid.len());
    let start = Instant::now();
    let res = run_inverse(sd, &cfg)?;
    info!("invert: done in {:.2} s", start.elapsed().as_secs_f64());
    let mut r = res.ls_residuals.clone();
    r.sort_by(f64::total_cmp);
    let median = r.get(r.len() / 2).copied().unwrap_or(f64::NAN);
    let max = r.last().copied().unwrap_or(f64::NAN);
    println!(
        "t = {}: residual median {:.3e} max {:.3e}, epsilon {:.4e}, ridge at {} point(s), max |q| {:.6}",
        sd.meta.t,
        median,
        max,
        res.wronskian_epsilon,
        res.regularized_points,
        res.q_recovered.max_abs()
    );
    Ok(res)
}

fn write_solution(out: &Path, t: f64, res: &InverseSolveResult) -> Result<()> {
    let path = solution_path(out, t);
    write_solution_csv(&path, res.q_recovered.grid().points(), res.q_recovered.values())?;
    info!("wrote {}", path.display());
    Ok(())
}

fn write_scattering(out: &Path, sd: &ScatteringData) -> Result<()> {
    let path = scattering_path(out, sd.meta.t);
    write_scattering_json(&path, sd)?;
    info!("wrote {}", path.display());
    Ok(())
}

fn load(input: &Path) -> Result<ScatteringData> {
    let (sd, report) = read_scattering_json(input)?;
    if report.flagged {
        warn!(
            "{}: max ||a|^2+|b|^2-1| = {:.3e} exceeds {:.1e}",
            input.display(),
            report.max_unitarity_defect,
            report.tolerance
        );
    }
    Ok(sd)
}

pub fn direct(s: &Settings) -> Result<()> {
    ensure_dir(&s.out)?;
    let sd = direct_stage(s)?;
    write_scattering(&s.out, &sd)
}

pub fn evolve_file(input: &Path, s: &Settings) -> Result<()> {
    ensure_dir(&s.out)?;
    let sd = load(input)?;
    for &t in &s.times {
        write_scattering(&s.out, &evolve(&sd, t))?;
    }
    Ok(())
}

pub fn invert_file(input: &Path, s: &Settings) -> Result<()> {
    ensure_dir(&s.out)?;
    let sd = load(input)?;
    let res = inverse_stage(&sd, s)?;
    write_solution(&s.out, sd.meta.t, &res)
}

pub fn solve(s: &Settings) -> Result<()> {
    ensure_dir(&s.out)?;
    let sd = direct_stage(s)?;
    for &t in &s.times {
        let evolved = evolve(&sd, t);
        write_scattering(&s.out, &evolved)?;
        let res = inverse_stage(&evolved, s)?;
        write_solution(&s.out, t, &res)?;
    }
    Ok(())
}

pub fn validate(example: u8, s: &Settings) -> Result<()> {
    ensure_dir(&s.out)?;
    let settings = ValidationSettings { nodes_per_unit: s.nodes_per_unit, k: s.k, x_step: s.x_step };
    let report = validate_example(example, &settings)?;
    println!("example {example}");
    for c in &report.checks {
        let tag = match (c.criterion, c.passed) {
            (None, _) => "info",
            (Some(_), true) => "PASS",
            (Some(_), false) => "FAIL",
        };
        let crit = c.criterion.map_or_else(|| "-".to_string(), |n| n.to_string());
        let reference = c.reference.map_or_else(String::new, |r| format!(", reference {r:.2e}"));
        println!(
            "  [{tag:<4}] criterion {crit:>2}  {}: {:.3e} (bound {:.1e}{reference})",
            c.label, c.measured, c.bound
        );
    }
    println!(
        "example {example}: {} in {:.1} s",
        if report.passed() { "all checks passed" } else { "some checks failed" },
        report.elapsed_secs
    );
    let path = s.out.join(format!("validation_ex{example}.json"));
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Parse { location: "validation report".into(), message: e.to_string() })?;
    std::fs::write(&path, json)?;
    info!("wrote {}", path.display());
    Ok(())
}
