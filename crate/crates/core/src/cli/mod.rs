//! The `bvstar` command-line tool.
//!
//! Every subcommand reads one JSON config, computes, and then writes its
//! artifacts into `--out-dir`. Exit codes: 0 success, 1 certification
//! failure, 2 configuration error, 3 vacuum formation, 4 output error.

pub mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::claw::{FluxModel, RiemannSolution, WaveKind, WaveSpeed};
use crate::error::{Error, Result};
use crate::verify::{certify, CertificationReport, SCHEMA_VERSION};

pub use config::{DecomposeConfig, Exponent, FamilyConfig, ScenarioConfig, SolutionKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VACUUM: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "bvstar", version, about = "Riemann solutions and weak* certification for 1-D conservation laws")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the Riemann problem and report its waves.
    Riemann(Invocation),
    /// Certify a candidate solution and write the report.
    Verify(Invocation),
    /// Decompose a BV function into continuous, jump and singular parts.
    Decompose(Invocation),
}

#[derive(Debug, Clone, clap::Args)]
pub struct Invocation {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Overrides the test-family seed of the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => match cli.command {
            Command::Riemann(inv) => cmd_riemann(&inv),
            Command::Verify(inv) => cmd_verify(&inv),
            Command::Decompose(inv) => cmd_decompose(&inv),
        },
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

fn fail(code: i32, e: impl std::fmt::Display) -> i32 {
    eprintln!("bvstar: {e}");
    code
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::VacuumFormation => EXIT_VACUUM,
        _ => EXIT_CONFIG,
    }
}

fn read_config(path: &Path) -> std::result::Result<String, i32> {
    std::fs::read_to_string(path).map_err(|e| fail(EXIT_CONFIG, format!("cannot read {}: {e}", path.display())))
}

fn scenario_name(name: &Option<String>, path: &Path) -> String {
    name.clone().unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default())
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn write_all(dir: &Path, files: &[(String, String)]) -> i32 {
    if let Err(e) = std::fs::create_dir_all(dir) {
        return fail(EXIT_IO, format!("cannot create {}: {e}", dir.display()));
    }
    for (name, contents) in files {
        let path = dir.join(name);
        if let Err(e) = std::fs::write(&path, contents) {
            return fail(EXIT_IO, format!("cannot write {}: {e}", path.display()));
        }
    }
    EXIT_OK
}

#[derive(Debug, Serialize)]
pub struct WaveReport {
    pub kind: WaveKind,
    pub family: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed_interval: Option<[f64; 2]>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct RiemannReport {
    pub schema_version: u32,
    pub scenario: String,
    pub flux: FluxModel,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub waves: Vec<WaveReport>,
    /// Constant states from left to right, end states included.
    pub states: Vec<Vec<f64>>,
}

impl RiemannReport {
    pub fn new(scenario: &str, sol: &RiemannSolution) -> Self {
        let waves = sol
            .waves
            .iter()
            .map(|w| {
                let (speed, speed_interval) = match w.speed {
                    WaveSpeed::Jump(s) => (Some(s), None),
                    WaveSpeed::Fan { lo, hi } => (None, Some([lo, hi])),
                };
                WaveReport {
                    kind: w.kind,
                    family: w.family,
                    speed,
                    speed_interval,
                    left: w.left.clone(),
                    right: w.right.clone(),
                }
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            scenario: scenario.to_string(),
            flux: sol.flux,
            left: sol.left.clone(),
            right: sol.right.clone(),
            waves,
            states: sol.states.clone(),
        }
    }
}

pub fn riemann_report(cfg: &ScenarioConfig, name: &str) -> Result<RiemannReport> {
    Ok(RiemannReport::new(name, &cfg.solve()?))
}

/// Certification report for a parsed config; `seed` overrides the config.
pub fn verify_report(cfg: &ScenarioConfig, name: &str, seed: Option<u64>) -> Result<CertificationReport> {
    certify(&cfg.scenario(name, seed)?, &cfg.tolerances)
}

pub fn cmd_riemann(inv: &Invocation) -> i32 {
    let text = match read_config(&inv.config) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let cfg = match ScenarioConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let report = match riemann_report(&cfg, &scenario_name(&cfg.name, &inv.config)) {
        Ok(r) => r,
        Err(e) => return fail(exit_code(&e), e),
    };
    write_all(&inv.out_dir, &[("riemann_report.json".into(), to_json(&report))])
}

/// CSV of `x, u_1..u_n` on `points` equispaced nodes of the window.
pub fn solution_csv(sol: &RiemannSolution, cfg: &ScenarioConfig, t: f64) -> String {
    let n = sol.dim();
    let mut out = String::from("x");
    for i in 1..=n {
        let _ = write!(out, ",u_{i}");
    }
    out.push('\n');
    let (a, b) = (cfg.window.a, cfg.window.b);
    let m = cfg.sample_points - 1;
    for j in 0..=m {
        let x = a + (b - a) * j as f64 / m as f64;
        let _ = write!(out, "{x}");
        for v in sol.sample(x, t) {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn cmd_verify(inv: &Invocation) -> i32 {
    let text = match read_config(&inv.config) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let cfg = match ScenarioConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let name = scenario_name(&cfg.name, &inv.config);
    let scenario = match cfg.scenario(&name, inv.seed) {
        Ok(s) => s,
        Err(e) => return fail(exit_code(&e), e),
    };
    let report = match certify(&scenario, &cfg.tolerances) {
        Ok(r) => r,
        Err(e) => return fail(exit_code(&e), e),
    };
    let mut files = vec![("verify_report.json".to_string(), to_json(&report))];
    for (i, t) in cfg.sample_times().into_iter().enumerate() {
        files.push((format!("solution_{i:02}.csv"), solution_csv(&scenario.solution, &cfg, t)));
    }
    let code = write_all(&inv.out_dir, &files);
    if code != EXIT_OK {
        return code;
    }
    if report.overall_pass {
        EXIT_OK
    } else {
        eprintln!("bvstar: certification failed: {}", report.failing().join(", "));
        EXIT_FAIL
    }
}

#[derive(Debug, Serialize)]
pub struct DecomposeReport {
    pub schema_version: u32,
    pub name: String,
    pub tv: f64,
    /// `(x, F(x+) - F(x-))` for every nonzero jump.
    pub jumps: Vec<(f64, f64)>,
    pub continuous_variation: f64,
    pub jump_variation: f64,
    pub singular_mass: f64,
}

pub fn cmd_decompose(inv: &Invocation) -> i32 {
    let text = match read_config(&inv.config) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let cfg = match DecomposeConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let (report, csv) = match decompose_report(&cfg, &scenario_name(&cfg.name, &inv.config)) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    write_all(
        &inv.out_dir,
        &[("decompose_report.json".into(), to_json(&report)), ("decompose_samples.csv".into(), csv)],
    )
}

/// The report and the `x,f,f_c,f_j,f_s` sample table.
pub fn decompose_report(cfg: &DecomposeConfig, name: &str) -> Result<(DecomposeReport, String)> {
    let f = cfg.function()?;
    let parts = f.decompose();
    let report = DecomposeReport {
        schema_version: SCHEMA_VERSION,
        name: name.to_string(),
        tv: f.total_variation(),
        jumps: f.jumps(),
        continuous_variation: parts.continuous.total_variation(),
        jump_variation: parts.jump.total_variation(),
        singular_mass: parts.singular.total_variation(),
    };
    let mut csv = String::from("x,f,f_c,f_j,f_s\n");
    let (a, b) = (cfg.window.a, cfg.window.b);
    let m = cfg.sample_points - 1;
    for j in 0..=m {
        let x = a + (b - a) * j as f64 / m as f64;
        let _ = writeln!(
            csv,
            "{x},{},{},{},{}",
            f.eval(x),
            parts.continuous.eval(x),
            parts.jump.eval(x),
            parts.singular.eval(x)
        );
    }
    Ok((report, csv))
}
