//! The `harnack-lab` command line: subcommands `cone`, `gbound`, `solve`,
//! `verify`, `harnack` and `validate`.
//!
//! Exit codes: 0 when every check passes, 1 when a verification fails, 2 on
//! configuration errors, malformed files and solver guard trips. Reports go
//! to stdout as JSON lines and, with `--out`, to `reports.jsonl`.

mod config;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::{Error, Result};
use crate::params::{
    cone_table_csv, cprime_member, g1, g2, g_bound, g_tilde, is_admissible, maximize_g, Quintuple,
};
use crate::solver::io::{read_trajectory, write_trajectory, INDEX_FILE};
use crate::solver::validation::standard_checks;
use crate::solver::{Status, Trajectory};
use crate::verifier::{
    random_queries, verify_claim_with, verify_harnack_batch, verify_matrix_with, verify_trace_with,
    MarginReport, PathQuery,
};

pub use config::{FamilySpec, HarnackSpec, InitialData, RunConfig, Tolerances};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Environment variable capping the data-parallel width.
pub const THREADS_ENV: &str = "HARNACK_LAB_THREADS";

const REPORTS_FILE: &str = "reports.jsonl";
const TRAJECTORY_DIR: &str = "trajectory";

#[derive(Debug, Parser)]
#[command(name = "harnack-lab", version, about = "Matrix Harnack estimate laboratory for u_t = Δu + u^p on flat tori")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate k(n), k0(n), k1(n), z(n) and G̃(n) as CSV.
    Cone {
        #[arg(long, default_value_t = 1)]
        n_min: u32,
        #[arg(long, default_value_t = 10)]
        n_max: u32,
        /// Also write the table to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Admissibility and exponent bounds for one quintuple, or a family search.
    Gbound(GboundArgs),
    /// Integrate a configured run and store the trajectory.
    Solve(RunArgs),
    /// Certify the matrix, trace and claim inequalities on a run.
    Verify(VerifyArgs),
    /// Certify path-integrated Harnack inequalities on a run.
    Harnack(HarnackArgs),
    /// Compare the solver against exact solutions.
    Validate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol_margin: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Reuse a stored trajectory (a run directory or its `trajectory/`).
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HarnackArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// JSON array or JSON lines of queries; random queries otherwise.
    #[arg(long)]
    pub queries: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GboundArgs {
    /// Take n, p and the quintuple from a run config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `a,b,c,d,theta`.
    #[arg(long, value_parser = parse_quintuple)]
    pub quintuple: Option<Quintuple>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Search the canonical family for the largest G instead.
    #[arg(long)]
    pub maximize: bool,
    #[arg(long, default_value_t = 256)]
    pub budget: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn parse_quintuple(s: &str) -> std::result::Result<Quintuple, String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match values.as_slice() {
        [a, b, c, d, theta] => Ok(Quintuple::new(*a, *b, *c, *d, *theta)),
        _ => Err(format!("expected five comma-separated numbers, got {}", values.len())),
    }
}

/// Apply `HARNACK_LAB_THREADS` to the global thread pool.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Cone { n_min, n_max, out: path } => cmd_cone(n_min, n_max, path.as_deref(), out),
        Command::Gbound(args) => cmd_gbound(&args, out),
        Command::Solve(args) => cmd_solve(&args, out),
        Command::Verify(args) => cmd_verify(&args, out),
        Command::Harnack(args) => cmd_harnack(&args, out),
        Command::Validate { out: path } => cmd_validate(path.as_deref(), out),
    }
}

pub fn cmd_cone(n_min: u32, n_max: u32, path: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    if n_min == 0 {
        return Err(Error::Config("n_min must be at least 1".into()));
    }
    let table = cone_table_csv(n_min, n_max)?;
    out.write_all(table.as_bytes())?;
    if let Some(path) = path {
        fs::write(path, &table)?;
    }
    Ok(EXIT_PASS)
}

pub fn cmd_gbound(args: &GboundArgs, out: &mut dyn Write) -> Result<i32> {
    let config = args.config.as_deref().map(RunConfig::load).transpose()?;
    let n = args.n.or(config.as_ref().map(|c| c.n)).unwrap_or(1);
    let seed = args.seed.or(config.as_ref().map(|c| c.seed)).unwrap_or(0);
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }

    if args.maximize {
        let (q, g) = maximize_g(n, args.budget, seed)?;
        let line = json!({
            "n": n,
            "budget": args.budget,
            "seed": seed,
            "quintuple": q,
            "g": g,
            "g_tilde": g_tilde(n)?,
        });
        writeln!(out, "{line}")?;
        return Ok(EXIT_PASS);
    }

    let q = match (args.quintuple, &config) {
        (Some(q), _) => q,
        (None, Some(c)) => c.resolved_quintuple()?,
        (None, None) => return Err(Error::Config("gbound needs --quintuple or --config".into())),
    };
    let p = args.p.or(config.as_ref().map(|c| c.p));
    let report = is_admissible(&q, n, q.default_tolerance())?;
    let bounds = (g1(q.b, q.d, q.theta), g2(&q), g_bound(&q));
    let (g1v, g2v, g) = match bounds {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        (a, b, c) => {
            let e = a.err().or(b.err()).or(c.err()).expect("one bound failed");
            return Err(Error::Config(format!("exponent bound undefined for {q}: {e}")));
        }
    };
    let p_in_range = p.map(|p| p > 1.0 && p < 1.0 + g);
    let line = json!({
        "quintuple": q,
        "n": n,
        "admissible": report.member,
        "margins": {
            "ordering": report.ordering_margin,
            "exponent": report.exponent_margin,
            "quartic": report.quartic_margin,
        },
        "cprime": cprime_member(&q, n)?,
        "g1": g1v,
        "g2": g2v,
        "g": g,
        "p_max": 1.0 + g,
        "p": p,
        "p_in_range": p_in_range,
    });
    writeln!(out, "{line}")?;
    Ok(if report.member && p_in_range != Some(false) { EXIT_PASS } else { EXIT_FAIL })
}

/// Config with command-line overrides applied.
fn load_config(args: &RunArgs) -> Result<RunConfig> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(out) = &args.out {
        config.out = Some(out.clone());
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(tol) = args.tol_margin {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Error::Config(format!("--tol-margin must be non-negative, got {tol}")));
        }
        config.tolerances.margin = tol;
    }
    Ok(config)
}

fn solve_checked(config: &RunConfig) -> Result<Trajectory> {
    let traj = config.solve()?;
    if traj.status != Status::Completed {
        return Err(Error::Guard {
            kind: match traj.status {
                Status::BlowupGuard => crate::error::GuardKind::BlowUp,
                _ => crate::error::GuardKind::NonPositive,
            },
            time: traj.last().time,
            detail: format!("run stopped before t_end = {}", config.t_end),
        });
    }
    Ok(traj)
}

fn load_trajectory(dir: &Path, config: &RunConfig) -> Result<Trajectory> {
    let dir = if dir.join(INDEX_FILE).exists() { dir.to_path_buf() } else { dir.join(TRAJECTORY_DIR) };
    let traj = read_trajectory(&dir)?;
    if traj.p != config.p {
        return Err(Error::Config(format!(
            "stored trajectory has p = {}, config has p = {}",
            traj.p, config.p
        )));
    }
    Ok(traj)
}

fn obtain_trajectory(stored: Option<&Path>, config: &RunConfig) -> Result<(Trajectory, bool)> {
    match stored {
        Some(dir) => Ok((load_trajectory(dir, config)?, false)),
        None => Ok((solve_checked(config)?, true)),
    }
}

fn emit_reports(
    reports: &mut [MarginReport],
    config: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32> {
    let resolved = config.to_value();
    let mut text = String::new();
    for report in reports.iter_mut() {
        report.config = Some(resolved.clone());
        text.push_str(&report.to_json_line()?);
        text.push('\n');
    }
    out.write_all(text.as_bytes())?;
    if let Some(dir) = &config.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(REPORTS_FILE), &text)?;
    }
    Ok(if reports.iter().all(|r| r.pass) { EXIT_PASS } else { EXIT_FAIL })
}

pub fn cmd_solve(args: &RunArgs, out: &mut dyn Write) -> Result<i32> {
    let config = load_config(args)?;
    let traj = config.solve()?;
    let stored = match &config.out {
        Some(dir) => {
            let target = dir.join(TRAJECTORY_DIR);
            write_trajectory(&traj, &target)?;
            Some(target)
        }
        None => None,
    };
    let line = json!({
        "status": traj.status,
        "snapshots": traj.snapshots.len(),
        "t_final": traj.last().time,
        "peak": traj.peak(),
        "guard_distance": traj.guard_distance(),
        "trajectory": stored,
        "config": config.to_value(),
    });
    writeln!(out, "{line}")?;
    Ok(if traj.status == Status::Completed { EXIT_PASS } else { EXIT_ERROR })
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let config = load_config(&args.run)?;
    let q = config.resolved_quintuple()?;
    config.check_theorem(&q)?;
    let (traj, fresh) = obtain_trajectory(args.trajectory.as_deref(), &config)?;
    if fresh {
        if let Some(dir) = &config.out {
            write_trajectory(&traj, &dir.join(TRAJECTORY_DIR))?;
        }
    }
    let options = config.verify_options();
    let mut reports = vec![
        verify_matrix_with(&traj, &q, config.n, &options)?,
        verify_trace_with(&traj, &q, config.n, &options)?,
        verify_claim_with(&traj, &q, config.n, &options)?,
    ];
    emit_reports(&mut reports, &config, out)
}

fn read_queries(path: &Path) -> Result<Vec<PathQuery>> {
    let text = fs::read_to_string(path)?;
    let bad = |e: serde_json::Error| Error::Format { path: path.to_path_buf(), detail: e.to_string() };
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(bad);
    }
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(bad))
        .collect()
}

pub fn cmd_harnack(args: &HarnackArgs, out: &mut dyn Write) -> Result<i32> {
    let config = load_config(&args.run)?;
    if config.quintuple.is_some() || config.family.is_some() {
        let q = config.resolved_quintuple()?;
        config.check_theorem(&q)?;
    }
    let spec = config.harnack.clone();
    let q = match spec.as_ref().and_then(|s| s.quintuple) {
        Some(q) => q,
        None => config.resolved_quintuple()?,
    };
    let (traj, _) = obtain_trajectory(args.trajectory.as_deref(), &config)?;
    let queries = match (&args.queries, &spec) {
        (Some(path), _) => read_queries(path)?,
        (None, Some(spec)) => random_queries(&traj, spec.count, spec.variant, config.seed)?
            .into_iter()
            .map(|query| PathQuery {
                layers: spec.layers,
                radius: spec.radius,
                midpoint: spec.midpoint,
                ..query
            })
            .collect(),
        (None, None) => {
            return Err(Error::Config("give --queries or a \"harnack\" section in the config".into()))
        }
    };
    let mut reports = verify_harnack_batch(&traj, &queries, &q, config.n, &config.verify_options())?;
    emit_reports(&mut reports, &config, out)
}

pub fn cmd_validate(path: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let checks = standard_checks()?;
    let mut text = String::new();
    for check in &checks {
        text.push_str(&serde_json::to_string(check)?);
        text.push('\n');
    }
    out.write_all(text.as_bytes())?;
    if let Some(dir) = path {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("validation.jsonl"), &text)?;
    }
    Ok(if checks.iter().all(|c| c.pass) { EXIT_PASS } else { EXIT_FAIL })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("harnack-lab").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn cone_rows() {
        let (code, out, _) = run_capture(&["cone", "--n-min", "1", "--n-max", "2"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "n,k,k0,k1,z,g_tilde");
        assert!(lines[1].starts_with("1,3.00000000000,,") && lines[1].ends_with(",3.00000000000,0.333333333333"));
        assert!(lines[2].starts_with("2,4.09807621135,3.88448"));
    }

    #[test]
    fn empty_cone_table() {
        let (code, out, _) = run_capture(&["cone", "--n-min", "5", "--n-max", "4"]);
        assert_eq!((code, out.as_str()), (0, "n,k,k0,k1,z,g_tilde\n"));
    }

    #[test]
    fn gbound_reference_quintuple() {
        let (code, out, _) = run_capture(&["gbound", "--quintuple", "4,3,1,4,4", "--p", "1.2"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["g"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(v["admissible"], true);
        let (code, _, _) = run_capture(&["gbound", "--quintuple", "4,3,1,4,4", "--p", "1.5"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn bad_arguments_exit_two() {
        assert_eq!(run_capture(&["gbound", "--quintuple", "1,2"]).0, 2);
        assert_eq!(run_capture(&["frobnicate"]).0, 2);
        assert_eq!(run_capture(&["verify", "--config", "/nonexistent.json"]).0, 2);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }
}
