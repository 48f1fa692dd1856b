//! End-to-end runs of the four reference examples with their published
//! settings, compared against closed forms and the reported values.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::direct::{run_direct, DirectConfig, DirectResult, RhoGrid};
use crate::evolution::evolve;
use crate::inverse::{run_inverse, InverseConfig, InverseSolveResult, DEFAULT_X_STEP};
use crate::oracles::{analytic_ab_example1, soliton_solution, Example1Params};
use crate::potentials::{PotentialSpec, TruncatedDomain};
use crate::{Error, Result};

type C = Complex64;

/// Published reference values.
pub mod reference {
    pub const EX1_RHO1: (f64, f64) = (0.0, 0.498749217771909);
    pub const EX1_C1: (f64, f64) = (-0.0192926642392854, -0.999813879232805);
    pub const EX1_A_ERROR: f64 = 1.06e-13;
    pub const EX1_B_ERROR: f64 = 3.3e-15;
    pub const EX1_RHO_ERROR: f64 = 2.7e-16;
    pub const EX1_C_ERROR: f64 = 1.7e-15;
    pub const EX1_RECOVERY: f64 = 2.1e-4;
    pub const EX2_RHO_ERROR: f64 = 4.6e-14;
    pub const EX2_C1: (f64, f64) = (-1.09964966682947, -0.110332988730178);
    pub const EX2_RECOVERY: [f64; 3] = [2.09e-6, 2.13e-6, 2.13e-6];
    pub const EX3_RHO: [(f64, f64); 2] = [(-0.5, 1.97126262533634), (-0.5, 0.792849539875588)];
    pub const EX3_C: [f64; 2] = [-1.0, 1.0];
    pub const EX3_RECOVERY: f64 = 1.3e-3;
    pub const EX4_RHO1: (f64, f64) = (-2.205978998465, 0.485112496978116);
    pub const EX4_C1: f64 = -1.00000000000001;
    pub const EX4_RECOVERY: f64 = 1.9e-2;
    pub const EX4_EPSILON: [f64; 3] = [0.11, 0.08, 0.03];
}

/// Settings of one reference example.
#[derive(Clone, Debug)]
pub struct ExampleSetup {
    pub id: u8,
    pub potential: PotentialSpec,
    pub domain: (f64, f64),
    pub n_direct: usize,
    pub n_inverse: usize,
    pub times: Vec<f64>,
}

pub fn example_setup(id: u8) -> Result<ExampleSetup> {
    let (potential, l, n_direct, times) = match id {
        1 => (PotentialSpec::chirped_sech(1.0, 0.1), 12.0, 160, vec![0.0]),
        2 => (PotentialSpec::soliton(0.5, PI / 2.0, 0.1, 0.1), 12.0, 60, vec![0.0, 1.0, 2.0]),
        3 => (PotentialSpec::chirped_gaussian(2.5, 2.0, 1.0), 12.0, 160, vec![0.0]),
        4 => (PotentialSpec::rational_tail(PI / 2.0, 1.0), 200.0, 250, vec![0.0, 1.2, 2.5]),
        _ => return Err(Error::Configuration(format!("unknown example {id}; expected 1-4"))),
    };
    Ok(ExampleSetup {
        id,
        potential,
        domain: (-l, l),
        n_direct,
        n_inverse: 50,
        times,
    })
}

#[derive(Clone, Debug)]
pub struct ValidationSettings {
    pub nodes_per_unit: f64,
    pub k: usize,
    pub x_step: f64,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        Self { nodes_per_unit: 1500.0, k: 5000, x_step: DEFAULT_X_STEP }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    /// Acceptance criterion this check belongs to; `None` for informative
    /// lines.
    pub criterion: Option<u8>,
    pub label: String,
    pub measured: f64,
    pub bound: f64,
    /// Value reported for the same quantity in the reference run.
    pub reference: Option<f64>,
    pub passed: bool,
}

impl Check {
    fn new(criterion: Option<u8>, label: impl Into<String>, measured: f64, bound: f64, reference: Option<f64>) -> Self {
        Self {
            criterion,
            label: label.into(),
            measured,
            bound,
            reference,
            passed: measured.is_finite() && measured <= bound,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub example: u8,
    pub checks: Vec<Check>,
    pub elapsed_secs: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.criterion.is_some()).all(|c| c.passed)
    }
}

fn c(p: (f64, f64)) -> C {
    C::new(p.0, p.1)
}

fn direct(setup: &ExampleSetup, s: &ValidationSettings) -> Result<DirectResult> {
    let mut cfg = DirectConfig::new(setup.n_direct, TruncatedDomain::user(setup.domain.0, setup.domain.1)?);
    cfg.nodes_per_unit = s.nodes_per_unit;
    cfg.rho_grid = RhoGrid::log_symmetric(s.k);
    run_direct(&setup.potential, &cfg)
}

fn inverse(setup: &ExampleSetup, r: &DirectResult, t: f64, s: &ValidationSettings) -> Result<InverseSolveResult> {
    let cfg = InverseConfig::on_domain(setup.n_inverse, setup.domain, s.x_step)?;
    run_inverse(&evolve(&r.data, t), &cfg)
}

fn max_error(res: &InverseSolveResult, exact: impl Fn(f64) -> C) -> f64 {
    res.q_recovered
        .grid()
        .points()
        .iter()
        .zip(res.q_recovered.values())
        .map(|(&x, q)| (q - exact(x)).norm())
        .fold(0.0, f64::max)
}

fn nearest(found: &[C], target: C) -> f64 {
    found.iter().map(|r| (r - target).norm()).fold(f64::INFINITY, f64::min)
}

/// Runs example `id` end to end and collects the checks.
pub fn validate_example(id: u8, s: &ValidationSettings) -> Result<ValidationReport> {
    use reference::*;
    let start = Instant::now();
    let setup = example_setup(id)?;
    let r = direct(&setup, s)?;
    let ev = &r.data.eigenvalues;
    let nc = &r.data.norming_constants;
    let mut checks = Vec::new();
    let count = |checks: &mut Vec<Check>, want: usize| {
        checks.push(Check::new(None, "eigenvalue count mismatch", (ev.len() as f64 - want as f64).abs(), 0.0, None));
    };
    let q0 = setup.potential.evaluator()?;
    match id {
        1 => {
            let p = Example1Params::new(1.0, 0.1)?;
            let (mut ea, mut eb) = (0.0f64, 0.0f64);
            for ((&rho, a), b) in r.data.rho.iter().zip(&r.data.a).zip(&r.data.b) {
                let (aa, bb) = analytic_ab_example1(&p, C::new(rho, 0.0))?;
                ea = ea.max((a - aa).norm());
                eb = eb.max((b - bb).norm());
            }
            checks.push(Check::new(Some(1), "max |a - analytic|", ea, 1e-8, Some(EX1_A_ERROR)));
            checks.push(Check::new(Some(1), "max |b - analytic|", eb, 1e-8, Some(EX1_B_ERROR)));
            count(&mut checks, 1);
            checks.push(Check::new(Some(2), "|rho1 - reference|", nearest(ev, c(EX1_RHO1)), 1e-10, Some(EX1_RHO_ERROR)));
            let ce = nc.first().map_or(f64::INFINITY, |v| (v - c(EX1_C1)).norm());
            checks.push(Check::new(Some(2), "|c1 - reference|", ce, 1e-8, Some(EX1_C_ERROR)));
            checks.push(Check::new(Some(5), "max ||a|^2+|b|^2-1|", r.data.unitarity_defect(), 1e-8, None));
            let inv = inverse(&setup, &r, 0.0, s)?;
            checks.push(Check::new(Some(7), "recovery error t=0", max_error(&inv, |x| q0.value(x)), 5e-3, Some(EX1_RECOVERY)));
        }
        2 => {
            let target = C::new(0.5, PI / 2.0);
            count(&mut checks, 1);
            checks.push(Check::new(Some(3), "|rho1 - (0.5 + i pi/2)|", nearest(ev, target), 1e-10, Some(EX2_RHO_ERROR)));
            let ce = nc.first().map_or(f64::INFINITY, |v| (v - c(EX2_C1)).norm());
            checks.push(Check::new(None, "|c1 - reported value|", ce, 1e-10, None));
            checks.push(Check::new(Some(5), "max ||a|^2+|b|^2-1|", r.data.unitarity_defect(), 1e-8, None));
            checks.push(Check::new(Some(9), "base Wronskian spread", r.base_wronskian_spread, 1e-10, None));
            for (i, &t) in setup.times.iter().enumerate() {
                let inv = inverse(&setup, &r, t, s)?;
                let err = max_error(&inv, |x| soliton_solution(0.5, PI / 2.0, 0.1, 0.1, x, t));
                checks.push(Check::new(Some(6), format!("recovery error t={t}"), err, 1e-4, Some(EX2_RECOVERY[i])));
            }
        }
        3 => {
            count(&mut checks, 2);
            for (m, (&rho, &cm)) in EX3_RHO.iter().zip(&EX3_C).enumerate() {
                checks.push(Check::new(Some(4), format!("|rho{} - reference|", m + 1), nearest(ev, c(rho)), 1e-6, None));
                let ce = nc.get(m).map_or(f64::INFINITY, |v| (v - cm).norm());
                checks.push(Check::new(Some(4), format!("|c{} - ({cm})|", m + 1), ce, 1e-8, None));
            }
            checks.push(Check::new(Some(5), "max ||a|^2+|b|^2-1|", r.data.unitarity_defect(), 1e-8, None));
            let inv = inverse(&setup, &r, 0.0, s)?;
            checks.push(Check::new(Some(7), "recovery error t=0", max_error(&inv, |x| q0.value(x)), 1e-2, Some(EX3_RECOVERY)));
        }
        _ => {
            count(&mut checks, 1);
            checks.push(Check::new(None, "|rho1 - reported value|", nearest(ev, c(EX4_RHO1)), 1e-9, None));
            let ce = nc.first().map_or(f64::INFINITY, |v| (v - EX4_C1).norm());
            checks.push(Check::new(None, "|c1 - reported value|", ce, 1e-9, None));
            checks.push(Check::new(Some(5), "max ||a|^2+|b|^2-1|", r.data.unitarity_defect(), 1e-4, None));
            for (i, &t) in setup.times.iter().enumerate() {
                let inv = inverse(&setup, &r, t, s)?;
                if t == 0.0 {
                    let err = max_error(&inv, |x| q0.value(x));
                    checks.push(Check::new(None, "recovery error t=0", err, 5e-2, Some(EX4_RECOVERY)));
                }
                let eps = inv.wronskian_epsilon;
                let p = EX4_EPSILON[i];
                let ratio = if eps > 0.0 { (eps / p).max(p / eps) } else { f64::INFINITY };
                checks.push(Check::new(Some(8), format!("epsilon t={t} = {eps:.4}, ratio to reference"), ratio, 3.0, Some(p)));
            }
        }
    }
    Ok(ValidationReport {
        example: id,
        checks,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}
