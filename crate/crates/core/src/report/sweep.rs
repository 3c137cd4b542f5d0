//! One-parameter sweeps over the three-level model.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::engine::{
    default_tunneling_steps, no_zeno_survival, run_tunneling, run_unitary, run_zeno, SurvivalRecord,
    ZenoSchedule,
};
use crate::error::{Error, Result};
use crate::linalg::QuantumState;
use crate::models::ModelSpec;

use super::config::ScenarioConfig;

/// `n·dt` must reproduce `t_total` this closely on a dt axis.
const DT_GRID_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    /// Measurement count at fixed `t_total`.
    N,
    Gamma,
    Omega,
    /// Interval length at fixed `t_total`; `n = T/dt` must be an integer.
    Dt,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 4] = [SweepAxis::N, SweepAxis::Gamma, SweepAxis::Omega, SweepAxis::Dt];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::N => "n",
            SweepAxis::Gamma => "gamma",
            SweepAxis::Omega => "omega",
            SweepAxis::Dt => "dt",
        }
    }

    /// Strictly monotone, finite, and in the axis' domain.
    pub fn validate_grid(self, grid: &[f64]) -> Result<()> {
        if grid.is_empty() {
            return Err(Error::config("sweep grid is empty"));
        }
        if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
            return Err(Error::config(format!("sweep grid value {x} is not finite")));
        }
        let increasing = grid.windows(2).all(|w| w[0] < w[1]);
        let decreasing = grid.windows(2).all(|w| w[0] > w[1]);
        if !(increasing || decreasing) {
            return Err(Error::config("sweep grid must be strictly monotone"));
        }
        for &x in grid {
            let ok = match self {
                SweepAxis::N => x >= 1.0 && x.fract() == 0.0,
                SweepAxis::Gamma | SweepAxis::Omega => x >= 0.0,
                SweepAxis::Dt => x > 0.0,
            };
            if !ok {
                return Err(Error::config(format!("{x} is not a valid value for sweep axis {self}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let names: Vec<_> = SweepAxis::ALL.iter().map(|a| a.name()).collect();
            Error::config(format!("invalid sweep axis `{s}`; valid axes: {}", names.join(", ")))
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub record: SurvivalRecord,
    /// `max_t p₃` of the unmeasured run: tunneling when it ran, free evolution otherwise.
    pub peak_leak: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.axis_value).collect()
    }
}

/// Everything a single grid point needs.
#[derive(Clone, Copy, Debug)]
struct PointSetup {
    model: ModelSpec,
    schedule: ZenoSchedule,
    with_tunneling: bool,
}

fn setup(cfg: &ScenarioConfig, axis: SweepAxis, value: f64) -> Result<PointSetup> {
    let t_total = cfg.t_total.ok_or_else(|| Error::config("sweep requires t_total"))?;
    let fixed_n = || cfg.n.ok_or_else(|| Error::config(format!("sweep over {axis} requires n")));
    let mut model = cfg.model;
    let schedule = match axis {
        SweepAxis::N => ZenoSchedule::spanning(t_total, value as usize)?,
        SweepAxis::Dt => {
            let n = (t_total / value).round();
            if n < 1.0 || (n * value - t_total).abs() > DT_GRID_TOL * t_total {
                return Err(Error::config(format!(
                    "dt = {value} does not divide t_total = {t_total} into whole intervals"
                )));
            }
            ZenoSchedule::new(n as usize, value)?
        }
        SweepAxis::Gamma => {
            model.gamma = value;
            ZenoSchedule::spanning(t_total, fixed_n()?)?
        }
        SweepAxis::Omega => {
            model.omega = value;
            ZenoSchedule::spanning(t_total, fixed_n()?)?
        }
    };
    Ok(PointSetup {
        model,
        schedule,
        with_tunneling: cfg.gamma_set || axis == SweepAxis::Gamma,
    })
}

fn run_point(cfg: &ScenarioConfig, axis_value: f64, point: PointSetup) -> Result<SweepPoint> {
    let PointSetup { model, schedule, with_tunneling } = point;
    let t_total = schedule.t_total();
    let h = model.three_level();
    let psi0 = QuantumState::basis(3, 0)?;

    let (_, mut record) = run_zeno(&h, &psi0, schedule)?;
    record.w_no_zeno = Some(no_zeno_survival(&h, &psi0, t_total)?);

    let peak_leak = if with_tunneling {
        let steps = cfg.steps.unwrap_or_else(|| default_tunneling_steps(model.gamma, t_total));
        let (trace, tunnel) = run_tunneling(&model.tunneling()?, &psi0, t_total, steps)?;
        record.w_tunnel = tunnel.w_tunnel;
        trace.max_population(2)
    } else {
        run_unitary(&h, &psi0, t_total, cfg.samples)?.max_population(2)
    };
    Ok(SweepPoint { axis_value, record, peak_leak })
}

/// One engine run per grid point, in parallel; output keeps grid order.
///
/// Every point is set up before anything runs, so a bad grid value fails
/// without doing work.
pub fn sweep(cfg: &ScenarioConfig) -> Result<SweepResult> {
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("sweep requires axis and grid"))?;
    spec.axis.validate_grid(&spec.grid)?;
    let setups = spec
        .grid
        .iter()
        .map(|&x| setup(cfg, spec.axis, x))
        .collect::<Result<Vec<_>>>()?;
    let points = spec
        .grid
        .par_iter()
        .zip(setups.into_par_iter())
        .map(|(&x, point)| run_point(cfg, x, point))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { axis: spec.axis, points })
}
