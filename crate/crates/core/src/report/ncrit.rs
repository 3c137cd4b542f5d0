//! Critical measurement count.

use rayon::prelude::*;

use crate::engine::{no_zeno_survival, zeno_survival, ZenoSchedule};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, QuantumState};
use crate::models::ModelSpec;

/// Largest scan the search accepts.
pub const MAX_N_CRIT_SCAN: usize = 10_000;

/// Absorbs the rounding tie at `n = 1`, where the Zeno run and the baseline
/// are the same computation.
pub const N_CRIT_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct NCritResult {
    pub n_crit: Option<usize>,
    /// `W_comp(T)` of free evolution.
    pub baseline: f64,
    /// `W^(n)_comp(T)` for `n = 1..=n_max`.
    pub survival: Vec<f64>,
}

impl NCritResult {
    pub fn survival_at(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.survival.get(i).copied())
    }
}

/// Three-level model started in `|1⟩`.
pub fn find_n_crit(model: &ModelSpec, t_total: f64, n_max: usize) -> Result<NCritResult> {
    find_n_crit_with(&model.three_level(), &QuantumState::basis(3, 0)?, t_total, n_max)
}

/// Smallest `n` such that `W^(m) >= W_comp(T)` for every `m` in `n..=n_max`.
///
/// At `n = 1` a single measurement after free evolution is the baseline
/// itself, so "first `n` reaching the baseline" would always be 1. At small
/// `n` the Zeno survival can dip below the baseline before the Zeno limit
/// pulls it up; the crossing reported here is the last one.
pub fn find_n_crit_with(
    h: &ComplexMatrix,
    psi0: &QuantumState,
    t_total: f64,
    n_max: usize,
) -> Result<NCritResult> {
    if n_max == 0 || n_max > MAX_N_CRIT_SCAN {
        return Err(Error::invalid(format!("n_max must be in 1..={MAX_N_CRIT_SCAN}, got {n_max}")));
    }
    let baseline = no_zeno_survival(h, psi0, t_total)?;
    let survival = (1..=n_max)
        .into_par_iter()
        .map(|n| zeno_survival(h, psi0, ZenoSchedule::spanning(t_total, n)?))
        .collect::<Result<Vec<f64>>>()?;

    let reaches = |w: f64| w >= baseline - N_CRIT_SLACK;
    let n_crit = if reaches(survival[n_max - 1]) {
        let below = survival.iter().rposition(|&w| !reaches(w));
        Some(below.map_or(1, |i| i + 2))
    } else {
        None
    };
    Ok(NCritResult { n_crit, baseline, survival })
}
