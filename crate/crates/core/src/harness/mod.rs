//! Experiment harness: scenarios, configuration, runs and CSV output.

mod config;
mod csv;
mod scenario;
pub mod selftest;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

pub use config::{parse_config, parse_document, ConfigDraft, RunConfig, DEFAULT_EULER_STEP, DEFAULT_GRID_POINTS};
pub use csv::{emit_controls_csv, emit_csv, emit_solution_csv, emit_summary_csv, format_value, CsvTable, SummaryRow};
pub use scenario::{example1, example2, Scenario, ScenarioDynamics, ScenarioRegistry, WaveShape, Waveform};

use crate::conflict_sim::{run_aiming, AimingPartition, AimingResult, AimingSetup};
use crate::error::{Error, Result};
use crate::fde_solver::{reconstruct, solve_caputo, solve_retarded, sup_error, CaputoProblem, RetardedProblem};
use crate::frac_ops::Trajectory;

fn lookup<'a>(registry: &'a ScenarioRegistry, config: &RunConfig) -> Result<&'a Scenario> {
    registry
        .get(&config.scenario)
        .ok_or_else(|| Error::config("scenario", format!("unknown scenario `{}`", config.scenario)))
}

/// Short tag for file names, e.g. `h0.01` or `h0.1_delta0.02`.
fn run_tag(h: f64, delta: Option<f64>) -> String {
    match delta {
        Some(d) => format!("h{h}_delta{d}"),
        None => format!("h{h}"),
    }
}

/// Fractional-system reference and one retarded approximation per `h`.
#[derive(Debug, Clone)]
pub struct ApproxReport {
    pub scenario: String,
    pub reference: Arc<Trajectory>,
    pub runs: Vec<ApproxRun>,
}

#[derive(Debug, Clone)]
pub struct ApproxRun {
    pub h: f64,
    pub y: Trajectory,
    pub x_tilde: Trajectory,
    pub sup_error: f64,
}

impl ApproxReport {
    pub fn summary(&self) -> Vec<SummaryRow> {
        self.runs
            .iter()
            .map(|r| SummaryRow {
                h: r.h,
                delta: None,
                sup_error: r.sup_error,
            })
            .collect()
    }

    /// Writes one comparison CSV per `h` and `summary.csv`; returns the paths.
    pub fn emit(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut paths: Vec<PathBuf> = self
            .runs
            .par_iter()
            .map(|r| {
                let path = dir.join(format!("{}_{}.csv", self.scenario, run_tag(r.h, None)));
                emit_csv(&self.reference, &r.x_tilde, &path).map(|_| path)
            })
            .collect::<Result<_>>()?;
        let summary = dir.join("summary.csv");
        emit_summary_csv(&self.summary(), &summary)?;
        paths.push(summary);
        Ok(paths)
    }
}

/// Solves a plain scenario's Caputo problem and its retarded approximation
/// for every configured `h`.
pub fn run_approximation(config: &RunConfig, registry: &ScenarioRegistry) -> Result<ApproxReport> {
    let scenario = lookup(registry, config)?;
    let problem = scenario.caputo_problem(config.alpha, config.horizon)?;
    let grid = config.grid()?;
    for &h in &config.h_values {
        grid.steps_in(h)?;
    }
    let reference = Arc::new(solve_caputo(&problem, &grid)?);
    let runs = config
        .h_values
        .par_iter()
        .map(|&h| {
            let retarded = RetardedProblem::new(problem.clone(), h)?;
            let y = solve_retarded(&retarded, &grid)?;
            let x_tilde = reconstruct(&retarded, &y)?;
            let err = sup_error(&reference, &x_tilde)?;
            Ok(ApproxRun {
                h,
                y,
                x_tilde,
                sup_error: err,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ApproxReport {
        scenario: scenario.name.clone(),
        reference,
        runs,
    })
}

fn require_scenario(config: &RunConfig, name: &str) -> Result<()> {
    if config.scenario == name {
        Ok(())
    } else {
        Err(Error::config(
            "scenario",
            format!("expected `{name}`, got `{}`", config.scenario),
        ))
    }
}

/// The plain-system comparison for the built-in `example1`.
pub fn run_example1(config: &RunConfig) -> Result<ApproxReport> {
    require_scenario(config, "example1")?;
    run_approximation(config, &ScenarioRegistry::builtin())
}

#[derive(Debug, Clone)]
pub struct AimingRun {
    pub h: f64,
    pub delta: f64,
    pub result: AimingResult,
}

#[derive(Debug, Clone)]
pub struct AimingReport {
    pub scenario: String,
    pub runs: Vec<AimingRun>,
}

impl AimingReport {
    pub fn summary(&self) -> Vec<SummaryRow> {
        self.runs
            .iter()
            .map(|r| SummaryRow {
                h: r.h,
                delta: Some(r.delta),
                sup_error: r.result.sup_error,
            })
            .collect()
    }

    /// Writes trajectory and control CSVs per run plus `summary.csv`.
    pub fn emit(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let per_run: Vec<Vec<PathBuf>> = self
            .runs
            .par_iter()
            .map(|r| {
                let tag = run_tag(r.h, Some(r.delta));
                let traj = dir.join(format!("{}_{tag}.csv", self.scenario));
                let controls = dir.join(format!("{}_{tag}_controls.csv", self.scenario));
                emit_csv(&r.result.x, &r.result.x_tilde, &traj)?;
                emit_controls_csv(&r.result, &controls)?;
                Ok(vec![traj, controls])
            })
            .collect::<Result<_>>()?;
        let mut paths: Vec<PathBuf> = per_run.into_iter().flatten().collect();
        let summary = dir.join("summary.csv");
        emit_summary_csv(&self.summary(), &summary)?;
        paths.push(summary);
        Ok(paths)
    }
}

/// Runs the mutual aiming procedure for every configured `(h, delta)` pair.
pub fn run_aiming_experiment(config: &RunConfig, registry: &ScenarioRegistry) -> Result<AimingReport> {
    let scenario = lookup(registry, config)?;
    let ScenarioDynamics::Conflict { u_bounds, v_bounds, .. } = &scenario.dynamics else {
        return Err(Error::config(
            "scenario",
            format!("scenario `{}` has no controls", scenario.name),
        ));
    };
    let dynamics = scenario.conflict_dynamics(config.p_grid_points, config.q_grid_points)?;
    let grid = config.grid()?;
    let v_wave = config
        .v_waveform
        .ok_or_else(|| Error::config("v_shape", "missing disturbance waveform"))?;
    let u_wave = config
        .u_tilde_waveform
        .ok_or_else(|| Error::config("u_tilde_shape", "missing control waveform"))?;
    let v_exo = v_wave.realize(grid, v_bounds.0, v_bounds.1)?;
    let u_tilde_exo = u_wave.realize(grid, u_bounds.0, u_bounds.1)?;
    if config.deltas.len() != config.h_values.len() {
        return Err(Error::config("delta", "one partition step per h is required"));
    }

    let pairs: Vec<(f64, f64)> = config.h_values.iter().copied().zip(config.deltas.iter().copied()).collect();
    let runs = pairs
        .par_iter()
        .map(|&(h, delta)| {
            let setup = AimingSetup {
                alpha: config.alpha,
                x0: scenario.x0.clone(),
                grid,
                h,
                partition: AimingPartition::uniform(delta, &grid)?,
            };
            let result = run_aiming(&dynamics, &setup, &v_exo, &u_tilde_exo)?;
            Ok(AimingRun { h, delta, result })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AimingReport {
        scenario: scenario.name.clone(),
        runs,
    })
}

/// The aiming experiment for the built-in `example2`.
pub fn run_example2(config: &RunConfig) -> Result<AimingReport> {
    require_scenario(config, "example2")?;
    run_aiming_experiment(config, &ScenarioRegistry::builtin())
}

/// Solves the scenario's fractional system alone. Conflict scenarios are run
/// open loop with the configured `u_tilde` and `v` waveforms as `u` and `v`.
pub fn run_solve(config: &RunConfig, registry: &ScenarioRegistry) -> Result<Trajectory> {
    let scenario = lookup(registry, config)?;
    let grid = config.grid()?;
    let problem = match &scenario.dynamics {
        ScenarioDynamics::Plain(_) => scenario.caputo_problem(config.alpha, config.horizon)?,
        ScenarioDynamics::Conflict {
            field,
            u_bounds,
            v_bounds,
            ..
        } => {
            let (field, ub, vb) = (field.clone(), *u_bounds, *v_bounds);
            let u = config.u_tilde_waveform.unwrap_or(Waveform::constant(0.0));
            let v = config.v_waveform.unwrap_or(Waveform::constant(0.0));
            CaputoProblem::new(
                move |t, x: &[f64], out: &mut [f64]| {
                    let uu = [u.value(t).clamp(ub.0, ub.1)];
                    let vv = [v.value(t).clamp(vb.0, vb.1)];
                    field(t, x, &uu, &vv, out)
                },
                scenario.x0.clone(),
                config.alpha,
                config.horizon,
            )?
        }
    };
    solve_caputo(&problem, &grid)
}
