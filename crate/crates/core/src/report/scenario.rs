//! Config-driven dispatch to the engine.

use std::path::{Path, PathBuf};

use crate::engine::{default_tunneling_steps, run_tunneling, run_unitary, run_zeno, SimulationTrace};
use crate::error::{Error, Result};
use crate::ghz::run_ghz_protocol;
use crate::linalg::QuantumState;
use crate::models::build_two_level;

use super::config::{Mode, Overrides, ScenarioConfig};
use super::csv::{ghz_csv, ncrit_csv, sweep_csv, trace_csv, write_atomic};
use super::ncrit::find_n_crit;
use super::sweep::sweep;

/// Outcome of one scenario: the summary line and the CSV body, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub mode: Mode,
    pub line: String,
    pub csv: String,
    pub output_path: Option<PathBuf>,
}

fn trace_summary(mode: Mode, trace: &SimulationTrace) -> String {
    let t = trace.times.last().copied().unwrap_or(0.0);
    let w = trace.final_survival().unwrap_or(1.0);
    format!("mode={mode} T={t} W={w}")
}

/// Runs the scenario without touching the filesystem.
pub fn run_config(cfg: &ScenarioConfig) -> Result<Summary> {
    let mode = cfg.mode;
    let model = &cfg.model;
    let t_total = || cfg.t_total.ok_or_else(|| Error::config(format!("mode {mode} requires t_total")));
    let schedule = || cfg.schedule.ok_or_else(|| Error::config(format!("mode {mode} requires a schedule")));
    let psi3 = || QuantumState::basis(3, 0);

    let (line, csv) = match mode {
        Mode::TwoLevelZeno => {
            let (trace, _) = run_zeno(&build_two_level(model.v), &QuantumState::basis(2, 0)?, schedule()?)?;
            (trace_summary(mode, &trace), trace_csv(&trace))
        }
        Mode::ThreeLevelZeno => {
            let (trace, _) = run_zeno(&model.three_level(), &psi3()?, schedule()?)?;
            (trace_summary(mode, &trace), trace_csv(&trace))
        }
        Mode::NoZeno => {
            let trace = run_unitary(&model.three_level(), &psi3()?, t_total()?, cfg.samples)?;
            (trace_summary(mode, &trace), trace_csv(&trace))
        }
        Mode::Tunneling => {
            let t = t_total()?;
            let steps = cfg.steps.unwrap_or_else(|| default_tunneling_steps(model.gamma, t));
            let (trace, _) = run_tunneling(&model.tunneling()?, &psi3()?, t, steps)?;
            (trace_summary(mode, &trace), trace_csv(&trace))
        }
        Mode::Ghz => {
            let outcome = run_ghz_protocol(model.g, model.g_tilde)?;
            let line = format!(
                "mode={mode} T={} fidelity={}",
                outcome.entangling_time, outcome.diagnostics.fidelity
            );
            (line, ghz_csv(&outcome))
        }
        Mode::Sweep => {
            let result = sweep(cfg)?;
            let last = result.points.last().expect("grid is non-empty");
            let w = last.record.w_zeno.unwrap_or(f64::NAN);
            let line = format!(
                "mode={mode} T={} axis={} points={} W={w}",
                t_total()?,
                result.axis,
                result.points.len()
            );
            (line, sweep_csv(&result))
        }
        Mode::Ncrit => {
            let n_max = cfg.n_max.ok_or_else(|| Error::config("mode ncrit requires n_max"))?;
            let t = t_total()?;
            let result = find_n_crit(model, t, n_max)?;
            let n_crit = result.n_crit.map_or_else(|| "none".to_string(), |n| n.to_string());
            let w = result.n_crit.and_then(|n| result.survival_at(n)).unwrap_or(f64::NAN);
            let line = format!(
                "mode={mode} T={t} n_crit={n_crit} baseline={} W={w}",
                result.baseline
            );
            (line, ncrit_csv(&result))
        }
    };
    Ok(Summary {
        mode,
        line,
        csv,
        output_path: cfg.output_path.clone(),
    })
}

/// Runs and writes the CSV, if an output path is set. Nothing is written
/// unless the whole computation succeeded.
pub fn execute(cfg: &ScenarioConfig) -> Result<Summary> {
    let summary = run_config(cfg)?;
    if let Some(path) = &summary.output_path {
        write_atomic(path, &summary.csv)?;
    }
    Ok(summary)
}

/// Full command-line flow: load, run, write, report. Returns the exit status.
pub fn run_with(path: Option<&Path>, mode: Option<Mode>, overrides: &Overrides) -> i32 {
    match ScenarioConfig::load(path, mode, overrides).and_then(|cfg| execute(&cfg)) {
        Ok(summary) => {
            println!("{}", summary.line);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run_scenario(config_path: &Path) -> i32 {
    run_with(Some(config_path), None, &Overrides::default())
}
