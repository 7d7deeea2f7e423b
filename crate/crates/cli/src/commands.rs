//! The `evolve`, `rate`, `verify` and `sweep` subcommands.
//!
//! Each command turns a [`Config`] into an [`Output`]; writing it out is left
//! to [`emit`].

use std::io::Write;

use blochldp::deviations::{empirical_rate, rate_tolerance, Regime};
use blochldp::lindblad::{gks_to_yz, rate_params, GKSParams, Generator, GeneratorSpec};
use blochldp::mat2::c;
use blochldp::semigroup::{fmt17, BlochTrajectory};
use blochldp::verify::{verify_spec, VerifyReport};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Config, Format, EVOLVE_GRID, RATE_GRID};
use crate::error::CliError;

/// Rendered result of a command.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub body: String,
    /// Reported on standard error; a failed check sets the exit code to 4.
    pub failure: Option<CliError>,
    /// JSON lines for standard error that do not change the exit code.
    pub warnings: Vec<String>,
}

impl Output {
    fn ok(body: String) -> Self {
        Self {
            body,
            failure: None,
            warnings: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.failure.as_ref().map_or(0, CliError::exit_code)
    }
}

/// Writes the body to the configured file or standard output and the
/// diagnostics to standard error. Returns the exit code.
pub fn emit(cfg: &Config, out: &Output) -> Result<i32, CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, &out.body)?,
        None => std::io::stdout().write_all(out.body.as_bytes())?,
    }
    let mut stderr = std::io::stderr().lock();
    for w in &out.warnings {
        writeln!(stderr, "{w}")?;
    }
    if let Some(f) = &out.failure {
        writeln!(stderr, "{}", f.to_json())?;
    }
    Ok(out.exit_code())
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

pub fn evolve(cfg: &Config) -> Result<Output, CliError> {
    let g = cfg.build_generator()?;
    let rho0 = cfg.initial_state.resolve(&g)?;
    let grid = cfg.time_grid(EVOLVE_GRID)?;
    let s = g.superop()?;
    let traj = BlochTrajectory::compute(g.label(), &s, &rho0, &grid)?;
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            traj.write_csv(&mut buf)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
        Format::Json => {
            let states: Vec<Value> = traj
                .times
                .iter()
                .zip(&traj.states)
                .zip(&traj.spectra)
                .map(|((t, b), (hi, lo))| json!({"t": t, "u": b.u, "eig_max": hi, "eig_min": lo}))
                .collect();
            to_json(&json!({
                "generator": GeneratorSpec::from(&g),
                "states": states,
            }))
        }
    };
    Ok(Output::ok(body))
}

pub fn rate(cfg: &Config) -> Result<Output, CliError> {
    let g = cfg.build_generator()?;
    let rho0 = cfg.initial_state.resolve(&g)?;
    let grid = cfg.time_grid(RATE_GRID)?;
    let report = empirical_rate(&g, &rho0, &grid)?;
    let t_max = report.t_max();
    let tolerance = rate_tolerance(t_max);
    let passed = report.abs_error <= tolerance;

    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
        Format::Json => {
            let mut v = serde_json::to_value(&report).expect("report serializes");
            let obj = v.as_object_mut().expect("report is an object");
            obj.insert("generator".into(), json!(GeneratorSpec::from(&g)));
            obj.insert("t_max".into(), json!(t_max));
            obj.insert("tolerance".into(), json!(tolerance));
            obj.insert("passed".into(), json!(passed));
            if report.regime == Regime::Trivial {
                obj.insert(
                    "note".into(),
                    json!(
                        "absorbing state is faithful: trivial large-deviation regime, \
                         eigenvalue rates compared against 0"
                    ),
                );
            }
            to_json(&v)
        }
    };
    let mut out = Output::ok(body);
    if let Some(a) = &report.advisory {
        out.warnings.push(json!({ "advisory": a }).to_string());
    }
    if !passed {
        out.failure = Some(CliError::verification(format!(
            "empirical rate {} misses the reference by {:.3e} > {:.3e}",
            report.final_estimate, report.abs_error, tolerance
        )));
    }
    Ok(out)
}

pub fn verify(cfg: &Config) -> Result<Output, CliError> {
    let specs: Vec<&GeneratorSpec> = cfg.generator.iter().chain(&cfg.generators).collect();
    if specs.is_empty() {
        return Err(CliError::config("config has no \"generator\" or \"generators\""));
    }
    let reports: Vec<VerifyReport> = specs.into_iter().map(verify_spec).collect();
    let all_passed = reports.iter().all(|r| r.all_passed);
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&json!({ "all_passed": all_passed, "reports": reports })),
        Format::Csv => {
            let mut s = String::from("generator,check,passed,skipped,residual,tolerance\n");
            for (i, r) in reports.iter().enumerate() {
                for ch in &r.checks {
                    let num = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
                    s.push_str(&format!(
                        "{i},{},{},{},{},{}\n",
                        ch.name,
                        ch.passed,
                        ch.skipped,
                        num(ch.residual),
                        num(ch.tolerance)
                    ));
                }
            }
            s
        }
    };
    let mut out = Output::ok(body);
    if !all_passed {
        let failed: Vec<String> = reports
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.failures().into_iter().map(move |c| format!("{i}:{}", c.name)))
            .collect();
        out.failure = Some(CliError::verification(format!(
            "failed checks: {}",
            failed.join(", ")
        )));
    }
    Ok(out)
}

/// One row of the sweep table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub xi: f64,
    pub eta: f64,
    pub nu: f64,
    pub zeta_re: f64,
    pub zeta_im: f64,
    pub case: &'static str,
    pub u3_inf: f64,
    /// `η − a` when the absorbing state is pure.
    pub gap: Option<f64>,
    pub empirical_rate: Option<f64>,
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Grid points in lexicographic order of `(ξ, η, ν, ζ)`.
pub fn sweep_points(cfg: &Config) -> Result<Vec<[f64; 5]>, CliError> {
    let axes = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("config has no \"sweep\""))?;
    let mut zetas = axes.zeta.clone();
    zetas.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    zetas.dedup();
    let mut points = Vec::new();
    for &xi in &sorted(axes.xi.clone()) {
        for &eta in &sorted(axes.eta.clone()) {
            for &nu in &sorted(axes.nu.clone()) {
                for z in &zetas {
                    points.push([xi, eta, nu, z[0], z[1]]);
                }
            }
        }
    }
    Ok(points)
}

enum PointResult {
    Row(SweepRow, Option<String>),
    Skipped(String),
}

fn sweep_point(cfg: &Config, grid: &[f64], p: [f64; 5]) -> PointResult {
    let [xi, eta, nu, zr, zi] = p;
    let params = match GKSParams::new(xi, eta, nu, c(zr, zi)) {
        Ok(params) => params,
        Err(e) => {
            return PointResult::Skipped(
                json!({"skipped": {"xi": xi, "eta": eta, "nu": nu, "zeta": [zr, zi]},
                       "reason": e.to_string()})
                .to_string(),
            )
        }
    };
    let gap = gks_to_yz(&params)
        .ok()
        .and_then(|yz| rate_params(&yz).ok())
        .map(|r| r.gap);
    let g = Generator::Gks(params);
    let mut warning = None;
    let empirical = match cfg
        .initial_state
        .resolve(&g)
        .and_then(|rho| empirical_rate(&g, &rho, grid).map_err(CliError::from))
    {
        Ok(r) => Some(r.final_estimate),
        Err(e) => {
            warning = Some(
                json!({"point": {"xi": xi, "eta": eta, "nu": nu, "zeta": [zr, zi]},
                       "warning": e.message})
                .to_string(),
            );
            None
        }
    };
    PointResult::Row(
        SweepRow {
            xi,
            eta,
            nu,
            zeta_re: zr,
            zeta_im: zi,
            case: params.case().label(),
            u3_inf: params.absorbing_u3(),
            gap,
            empirical_rate: empirical,
        },
        warning,
    )
}

/// Evaluates every grid point on a pool of `jobs` workers (all available
/// cores when `None`); rows keep grid order.
pub fn sweep(cfg: &Config, jobs: Option<usize>) -> Result<Output, CliError> {
    let points = sweep_points(cfg)?;
    let grid = cfg.time_grid(RATE_GRID)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::config(format!("worker pool: {e}")))?;
    let results: Vec<PointResult> =
        pool.install(|| points.par_iter().map(|&p| sweep_point(cfg, &grid, p)).collect());

    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for r in results {
        match r {
            PointResult::Row(row, w) => {
                rows.push(row);
                warnings.extend(w);
            }
            PointResult::Skipped(w) => warnings.push(w),
        }
    }
    if rows.is_empty() {
        return Err(CliError::config(format!(
            "all {} sweep points are invalid",
            points.len()
        )));
    }
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let num = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
            let mut s = String::from("xi,eta,nu,zeta_re,zeta_im,case,u3_inf,gap,empirical_rate\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    fmt17(r.xi),
                    fmt17(r.eta),
                    fmt17(r.nu),
                    fmt17(r.zeta_re),
                    fmt17(r.zeta_im),
                    r.case,
                    fmt17(r.u3_inf),
                    num(r.gap),
                    num(r.empirical_rate)
                ));
            }
            s
        }
    };
    Ok(Output {
        body,
        failure: None,
        warnings,
    })
}
