//! `fracaim` command line: `solve`, `approx`, `aiming` and `selftest`.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 numerical
//! divergence, 3 I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::harness::{
    emit_solution_csv, format_value, parse_document, selftest::run_selftest, run_aiming_experiment,
    run_approximation, run_solve, ConfigDraft, RunConfig, ScenarioRegistry, SummaryRow,
};

pub const OUT_DIR_ENV: &str = "FRACAIM_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Parser)]
#[command(name = "fracaim", version, about = "Fractional-order systems, retarded approximations and mutual aiming")]
struct Cli {
    /// Print written file paths and per-run details to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a scenario's fractional system and write its trajectory.
    Solve(RunArgs),
    /// Compare a plain scenario with its retarded approximations.
    Approx(RunArgs),
    /// Run the mutual aiming procedure for a conflict scenario.
    Aiming(RunArgs),
    /// Check operator properties and analytic oracles.
    Selftest,
}

/// Flags mirror the config keys; they override values from `--config`.
#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    alpha_override: Option<String>,
    #[arg(long)]
    horizon: Option<String>,
    #[arg(long)]
    euler_step: Option<String>,
    /// Repeatable.
    #[arg(long = "h")]
    h: Vec<String>,
    /// Repeatable; one value, or one per `--h`.
    #[arg(long)]
    delta: Vec<String>,
    #[arg(long)]
    p_grid_points: Option<String>,
    #[arg(long)]
    q_grid_points: Option<String>,
    #[arg(long)]
    v_shape: Option<String>,
    #[arg(long)]
    v_amplitude: Option<String>,
    #[arg(long)]
    v_frequency: Option<String>,
    #[arg(long)]
    v_offset: Option<String>,
    #[arg(long)]
    u_tilde_shape: Option<String>,
    #[arg(long)]
    u_tilde_amplitude: Option<String>,
    #[arg(long)]
    u_tilde_frequency: Option<String>,
    #[arg(long)]
    u_tilde_offset: Option<String>,
    #[arg(long)]
    out_dir: Option<String>,
}

impl RunArgs {
    fn flag_draft(&self) -> Result<ConfigDraft> {
        let mut draft = ConfigDraft::new();
        let singles = [
            ("scenario", &self.scenario),
            ("alpha_override", &self.alpha_override),
            ("horizon", &self.horizon),
            ("euler_step", &self.euler_step),
            ("p_grid_points", &self.p_grid_points),
            ("q_grid_points", &self.q_grid_points),
            ("v_shape", &self.v_shape),
            ("v_amplitude", &self.v_amplitude),
            ("v_frequency", &self.v_frequency),
            ("v_offset", &self.v_offset),
            ("u_tilde_shape", &self.u_tilde_shape),
            ("u_tilde_amplitude", &self.u_tilde_amplitude),
            ("u_tilde_frequency", &self.u_tilde_frequency),
            ("u_tilde_offset", &self.u_tilde_offset),
            ("out_dir", &self.out_dir),
        ];
        let repeated = self.h.iter().map(|v| ("h", v)).chain(self.delta.iter().map(|v| ("delta", v)));
        for (key, value) in singles
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
            .chain(repeated)
        {
            draft
                .set(key, value)
                .map_err(|m| Error::config(key, format!("--{}: {m}", key.replace('_', "-"))))?;
        }
        Ok(draft)
    }

    /// Layers defaults, config file, environment and flags.
    fn resolve(&self, env_out_dir: Option<PathBuf>) -> Result<(RunConfig, PathBuf)> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                parse_document(&text)?
            }
            None => ConfigDraft::new(),
        };
        let draft = file.merge(self.flag_draft()?);
        let config = draft.finish(&ScenarioRegistry::builtin())?;
        let out_dir = config
            .out_dir
            .clone()
            .or(env_out_dir)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        Ok((config, out_dir))
    }
}

/// Runs the CLI with explicit streams; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    run_with_env(args, env_out_dir, out, err)
}

/// As [`run`], with the environment fallback for the output directory passed in.
pub fn run_with_env<I, T>(args: I, env_out_dir: Option<PathBuf>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };

    match dispatch(&cli, env_out_dir, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(e, Error::ConfigValue { .. } | Error::ConfigParse { .. }) {
                let _ = writeln!(err, "{}", Cli::command().render_usage());
            }
            e.exit_code()
        }
    }
}

fn print_summary(out: &mut dyn Write, scenario: &str, rows: &[SummaryRow]) -> Result<()> {
    let io = |e| Error::io("<stdout>", e);
    writeln!(out, "scenario {scenario}").map_err(io)?;
    writeln!(out, "{:>12} {:>12} {:>16}", "h", "delta", "sup_error").map_err(io)?;
    for r in rows {
        let delta = r.delta.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
        writeln!(out, "{:>12} {:>12} {:>16}", r.h, delta, format_value(r.sup_error)).map_err(io)?;
    }
    Ok(())
}

fn report_paths(err: &mut dyn Write, verbose: u8, paths: &[PathBuf]) {
    if verbose > 0 {
        for p in paths {
            let _ = writeln!(err, "wrote {}", p.display());
        }
    }
}

fn dispatch(cli: &Cli, env_out_dir: Option<PathBuf>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let registry = ScenarioRegistry::builtin();
    match &cli.command {
        Command::Solve(args) => {
            let (config, dir) = args.resolve(env_out_dir)?;
            let x = run_solve(&config, &registry)?;
            let path = dir.join(format!("{}_solution.csv", config.scenario));
            emit_solution_csv(&x, &path)?;
            report_paths(err, cli.verbose, std::slice::from_ref(&path));
            let last: Vec<String> = x.at(x.len() - 1).iter().copied().map(format_value).collect();
            writeln!(
                out,
                "scenario {}: {} nodes, x({}) = [{}]",
                config.scenario,
                x.len(),
                config.horizon,
                last.join(", ")
            )
            .map_err(|e| Error::io("<stdout>", e))?;
            Ok(0)
        }
        Command::Approx(args) => {
            let (config, dir) = args.resolve(env_out_dir)?;
            let report = run_approximation(&config, &registry)?;
            let paths = report.emit(&dir)?;
            report_paths(err, cli.verbose, &paths);
            print_summary(out, &report.scenario, &report.summary())?;
            Ok(0)
        }
        Command::Aiming(args) => {
            let (config, dir) = args.resolve(env_out_dir)?;
            let report = run_aiming_experiment(&config, &registry)?;
            let paths = report.emit(&dir)?;
            report_paths(err, cli.verbose, &paths);
            print_summary(out, &report.scenario, &report.summary())?;
            Ok(0)
        }
        Command::Selftest => {
            let checks = run_selftest();
            let io = |e| Error::io("<stdout>", e);
            let mut failed = 0;
            for c in &checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{status}  {}  ({})", c.name, c.detail).map_err(io)?;
                failed += usize::from(!c.passed);
            }
            writeln!(out, "{} of {} properties passed", checks.len() - failed, checks.len()).map_err(io)?;
            Ok(if failed == 0 { 0 } else { 1 })
        }
    }
}
