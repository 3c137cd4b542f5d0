//! Evolution regimes and survival-probability formulas.
//!
//! Three ways of evolving a driven qubit are implemented:
//!
//! - [`run_unitary`]: free evolution `exp(-iHt)`, a single measurement of the
//!   monitored subspace at each sampled instant.
//! - [`run_zeno`]: `n` intervals of free evolution, each followed by an ideal
//!   projective measurement that finds the system inside the monitored
//!   subspace. The pre-measurement leak probabilities multiply into the
//!   survival probability `W = Π (1 - p_leak(t_k))`.
//! - [`run_tunneling`]: continuous monitoring modeled by a non-Hermitian
//!   Hamiltonian; the norm decays and `W(t) = ‖P ψ(t)‖²`.
//!
//! The monitored subspace depends on the dimension: `|1>` for the two-level
//! toy, `span{|1>, |2>}` for the three-level qubit.

use crate::error::{Error, Result};
use crate::linalg::{mat_exp, ComplexMatrix, HermitianPropagator, QuantumState, C64, HERMITIAN_TOL};
use crate::models::{projector_comp, projector_ground};

/// Tolerance on `‖ψ0‖ = 1` for unitary and Zeno runs.
pub const NORM_TOL: f64 = 1e-10;

/// Slack allowed on probabilities coming out of floating-point arithmetic.
pub const PROBABILITY_SLACK: f64 = 1e-12;

/// Below this surviving norm a projection is treated as certain leakage.
pub const DEGENERATE_NORM: f64 = 1e-14;

/// Minimum number of tunneling sub-steps per run.
pub const MIN_TUNNELING_STEPS: usize = 1000;

/// Measurement plan: `n` equal intervals of length `dt`, total time `n·dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZenoSchedule {
    n: usize,
    dt: f64,
}

impl ZenoSchedule {
    pub fn new(n: usize, dt: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("schedule needs at least one measurement interval"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!("interval length must be positive, got {dt}")));
        }
        Ok(Self { n, dt })
    }

    /// `n` intervals spanning `t_total`.
    pub fn spanning(t_total: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("schedule needs at least one measurement interval"));
        }
        Self::new(n, t_total / n as f64)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_total(&self) -> f64 {
        self.n as f64 * self.dt
    }
}

/// Time-ordered populations and survival probability of one run.
///
/// Row 0 is the initial state at `t = 0`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimulationTrace {
    pub times: Vec<f64>,
    /// `|a_i|²` per instant, one entry per basis state.
    pub populations: Vec<Vec<f64>>,
    /// Running survival probability.
    pub survival: Vec<f64>,
    /// Leak probability at each instant. For Zeno runs this is the
    /// pre-measurement value that entered the survival product; the state in
    /// `populations` is the post-measurement one.
    pub leak: Vec<f64>,
    pub amplitudes: Vec<QuantumState>,
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn push(&mut self, t: f64, psi: &QuantumState, survival: f64, leak: f64) {
        self.times.push(t);
        self.populations.push(psi.populations());
        self.survival.push(survival);
        self.leak.push(leak);
        self.amplitudes.push(psi.clone());
    }

    pub fn final_survival(&self) -> Option<f64> {
        self.survival.last().copied()
    }

    /// Population of basis state `level` (0-based) over time; zero if the
    /// state space is smaller.
    pub fn population_series(&self, level: usize) -> Vec<f64> {
        self.populations
            .iter()
            .map(|p| p.get(level).copied().unwrap_or(0.0))
            .collect()
    }

    pub fn max_population(&self, level: usize) -> f64 {
        self.population_series(level).into_iter().fold(0.0, f64::max)
    }

    /// `‖ψ(t)‖²` per instant.
    pub fn norm_sqr(&self) -> Vec<f64> {
        self.populations.iter().map(|p| p.iter().sum()).collect()
    }
}

/// Survival probabilities of the three regimes; `None` where a regime was not run.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SurvivalRecord {
    pub n: Option<usize>,
    /// `W^(n)_comp(T)`, product over projective measurements.
    pub w_zeno: Option<f64>,
    /// `1 - p_leak(T)` after free evolution.
    pub w_no_zeno: Option<f64>,
    /// `|a1(T)|² + |a2(T)|²` under tunneling.
    pub w_tunnel: Option<f64>,
}

/// Projector onto the monitored subspace for a state space of dimension `dim`.
pub fn monitored_projector(dim: usize) -> Result<ComplexMatrix> {
    match dim {
        2 => projector_ground(2),
        3 => projector_comp(3),
        _ => Err(Error::UnsupportedDim(dim)),
    }
}

/// `(1 - q/n²)^n` with `q = V²T²`: the survival probability of the two-level
/// toy under `n` measurements, each interval treated to second order.
///
/// The formula is only meaningful while `|V·T/n| ≪ 1`; that is left to the caller.
pub fn two_level_survival_closed_form(v: f64, t_total: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("closed form needs n >= 1"));
    }
    if !v.is_finite() || !t_total.is_finite() {
        return Err(Error::invalid("closed form needs finite V and T"));
    }
    let q = (v * t_total).powi(2);
    let nf = n as f64;
    let x = q / (nf * nf);
    if n <= 64 || x > 1.0 {
        Ok((1.0 - x).powi(n.min(i32::MAX as usize) as i32))
    } else {
        Ok((nf * (-x).ln_1p()).exp())
    }
}

/// Limit of [`two_level_survival_closed_form`] as `n -> ∞`: `e^{-q/n} -> 1`.
pub fn two_level_zeno_limit(v: f64, t_total: f64) -> f64 {
    let _ = (v, t_total);
    1.0
}

/// `Π (1 - p_k)` over leak probabilities.
pub fn survival_product(leaks: &[f64]) -> Result<f64> {
    let mut w = 1.0;
    for (k, &p) in leaks.iter().enumerate() {
        if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
            return Err(Error::invalid(format!(
                "leak probability {p} at index {k} is outside [0, 1]"
            )));
        }
        w *= 1.0 - p.clamp(0.0, 1.0);
    }
    Ok(w)
}

/// Second-order short-time amplitudes of the Y-driven three-level qubit,
/// starting from `(a1, a2, 0)`:
///
/// ```text
/// a1' = a1 (1 - Ω²dt²/2) - a2 Ω dt
/// a2' = a2 (1 - 3Ω²dt²/2) + a1 Ω dt
/// a3' = √2 a2 Ω dt + (√2/2) [a1 Ω² - a2 Ω (Γ/2 + iη)] dt²
/// ```
///
/// With `Γ = 4/dt` the first-order term of `a3'` cancels.
pub fn perturbative_step(
    a1: C64,
    a2: C64,
    omega: f64,
    eta: f64,
    gamma: f64,
    dt: f64,
) -> [C64; 3] {
    let od = omega * dt;
    let r2 = std::f64::consts::SQRT_2;
    let next1 = a1 * (1.0 - 0.5 * od * od) - a2 * od;
    let next2 = a2 * (1.0 - 1.5 * od * od) + a1 * od;
    let bracket = a1 * (omega * omega) - a2 * omega * C64::new(gamma / 2.0, eta);
    let next3 = a2 * (r2 * od) + bracket * (0.5 * r2 * dt * dt);
    [next1, next2, next3]
}

/// `‖(1 - P) ψ‖²` for a diagonal 0/1 projector.
fn leak_probability(projector: &ComplexMatrix, psi: &QuantumState) -> f64 {
    psi.amplitudes()
        .iter()
        .enumerate()
        .filter(|&(i, _)| projector.get(i, i).re == 0.0)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

fn kept_probability(projector: &ComplexMatrix, psi: &QuantumState) -> f64 {
    psi.amplitudes()
        .iter()
        .enumerate()
        .filter(|&(i, _)| projector.get(i, i).re != 0.0)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

fn check_diagonal_projector(p: &ComplexMatrix) -> Result<()> {
    let n = p.dim();
    for i in 0..n {
        for j in 0..n {
            let z = p.get(i, j);
            let ok = if i == j {
                z.im == 0.0 && (z.re == 0.0 || z.re == 1.0)
            } else {
                z.re == 0.0 && z.im == 0.0
            };
            if !ok {
                return Err(Error::invalid(
                    "measurement projector must be diagonal with 0/1 entries",
                ));
            }
        }
    }
    Ok(())
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    let dev = h.hermitian_deviation();
    if dev > HERMITIAN_TOL * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

fn check_dims(h: &ComplexMatrix, psi: &QuantumState) -> Result<()> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi.dim(),
        });
    }
    Ok(())
}

fn check_unit_norm(psi: &QuantumState) -> Result<()> {
    let n = psi.norm_sqr();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::invalid(format!("initial state must be normalized, ‖ψ‖² = {n}")));
    }
    Ok(())
}

fn check_time(t_total: f64) -> Result<()> {
    if !(t_total > 0.0 && t_total.is_finite()) {
        return Err(Error::invalid(format!("total time must be positive, got {t_total}")));
    }
    Ok(())
}

/// Free evolution sampled at `samples` equal intervals over `[0, t_total]`.
///
/// Each sample uses the exact propagator `exp(-iH t_k)` applied to `psi0`.
/// The survival column is `1 - p_leak(t)`: the probability that a single
/// measurement at `t` finds the system in the monitored subspace. It is not
/// monotone in `t`.
pub fn run_unitary(
    h: &ComplexMatrix,
    psi0: &QuantumState,
    t_total: f64,
    samples: usize,
) -> Result<SimulationTrace> {
    check_hermitian(h)?;
    check_dims(h, psi0)?;
    check_unit_norm(psi0)?;
    check_time(t_total)?;
    if samples == 0 {
        return Err(Error::invalid("run_unitary needs at least one sample interval"));
    }
    let projector = monitored_projector(h.dim())?;
    let propagator = HermitianPropagator::new(h)?;

    let mut trace = SimulationTrace::default();
    let leak0 = leak_probability(&projector, psi0);
    trace.push(0.0, psi0, 1.0 - leak0, leak0);
    for k in 1..=samples {
        // the last instant is exactly t_total so it matches a one-interval Zeno run
        let t = if k == samples {
            t_total
        } else {
            t_total * k as f64 / samples as f64
        };
        let psi = propagator.at(t).apply(psi0)?;
        let leak = leak_probability(&projector, &psi);
        trace.push(t, &psi, 1.0 - leak, leak);
    }
    Ok(trace)
}

/// `W_comp(T) = 1 - p_leak(T)` after free evolution over `t_total`.
pub fn no_zeno_survival(h: &ComplexMatrix, psi0: &QuantumState, t_total: f64) -> Result<f64> {
    let trace = run_unitary(h, psi0, t_total, 1)?;
    Ok(trace.survival[1])
}

/// Zeno evolution with the default monitored subspace for `h`'s dimension.
pub fn run_zeno(
    h: &ComplexMatrix,
    psi0: &QuantumState,
    schedule: ZenoSchedule,
) -> Result<(SimulationTrace, SurvivalRecord)> {
    let projector = monitored_projector(h.dim())?;
    run_zeno_with_projector(h, psi0, schedule, &projector)
}

/// Repeated evolve-then-measure cycles conditioned on every measurement
/// finding the system inside `projector`'s range.
///
/// Per interval: `ψ <- exp(-iH dt) ψ`, record `p_leak = ‖(1-P)ψ‖²`, then
/// `ψ <- Pψ / ‖Pψ‖`. The trace holds the post-measurement states and the
/// running product of `1 - p_leak`.
pub fn run_zeno_with_projector(
    h: &ComplexMatrix,
    psi0: &QuantumState,
    schedule: ZenoSchedule,
    projector: &ComplexMatrix,
) -> Result<(SimulationTrace, SurvivalRecord)> {
    let mut trace = SimulationTrace::default();
    let mut leaks = Vec::with_capacity(schedule.n());
    trace.push(0.0, psi0, 1.0, 0.0);
    zeno_loop(h, psi0, schedule, projector, |k, psi, w, leak| {
        leaks.push(leak);
        trace.push(k as f64 * schedule.dt(), psi, w, leak);
    })?;
    let record = SurvivalRecord {
        n: Some(schedule.n()),
        w_zeno: Some(survival_product(&leaks)?),
        ..SurvivalRecord::default()
    };
    Ok((trace, record))
}

/// `W^(n)_comp(T)` alone, without keeping a trace.
pub fn zeno_survival(h: &ComplexMatrix, psi0: &QuantumState, schedule: ZenoSchedule) -> Result<f64> {
    let projector = monitored_projector(h.dim())?;
    zeno_loop(h, psi0, schedule, &projector, |_, _, _, _| {})
}

fn zeno_loop(
    h: &ComplexMatrix,
    psi0: &QuantumState,
    schedule: ZenoSchedule,
    projector: &ComplexMatrix,
    mut on_step: impl FnMut(usize, &QuantumState, f64, f64),
) -> Result<f64> {
    check_hermitian(h)?;
    check_dims(h, psi0)?;
    check_unit_norm(psi0)?;
    if projector.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: projector.dim(),
        });
    }
    check_diagonal_projector(projector)?;
    let outside = leak_probability(projector, psi0);
    if outside > NORM_TOL {
        return Err(Error::invalid(format!(
            "initial state has weight {outside:e} outside the monitored subspace"
        )));
    }

    let step = mat_exp(h, C64::new(0.0, -schedule.dt()))?;
    let mut psi = psi0.clone();
    let mut w = 1.0;
    for k in 1..=schedule.n() {
        psi = step.apply(&psi)?;
        let leak = leak_probability(projector, &psi);
        let projected = projector.apply(&psi)?;
        let kept = projected.norm();
        if kept < DEGENERATE_NORM {
            return Err(Error::DegenerateProjection { step: k, norm: kept });
        }
        psi = projected.scale(C64::new(1.0 / kept, 0.0));
        w *= 1.0 - leak;
        on_step(k, &psi, w, leak);
    }
    Ok(w)
}

/// Sub-step count giving `δ <= 0.01/Γ`, never fewer than [`MIN_TUNNELING_STEPS`].
pub fn default_tunneling_steps(gamma: f64, t_total: f64) -> usize {
    if gamma > 0.0 && t_total > 0.0 {
        let needed = (t_total * gamma / 0.01).ceil();
        (needed as usize).max(MIN_TUNNELING_STEPS)
    } else {
        MIN_TUNNELING_STEPS
    }
}

/// Evolution under a non-Hermitian generator with `steps` equal sub-steps.
///
/// No renormalization: the norm decays as population tunnels out of the
/// monitored level, and `W(t) = ‖Pψ(t)‖²`. The generator's anti-Hermitian
/// part must be negative semidefinite (pure loss).
pub fn run_tunneling(
    h_nh: &ComplexMatrix,
    psi0: &QuantumState,
    t_total: f64,
    steps: usize,
) -> Result<(SimulationTrace, SurvivalRecord)> {
    check_dims(h_nh, psi0)?;
    check_time(t_total)?;
    if steps == 0 {
        return Err(Error::invalid("run_tunneling needs at least one step"));
    }
    let n0 = psi0.norm_sqr();
    if n0 > 1.0 + NORM_TOL {
        return Err(Error::invalid(format!("initial state norm² {n0} exceeds 1")));
    }
    let (loss_rates, _) = crate::linalg::hermitian_eigen(&h_nh.anti_hermitian_part())?;
    let gain = loss_rates.last().copied().unwrap_or(0.0);
    if gain > HERMITIAN_TOL * h_nh.max_abs().max(1.0) {
        return Err(Error::Gain(gain));
    }
    let projector = monitored_projector(h_nh.dim())?;

    let delta = t_total / steps as f64;
    let step = mat_exp(h_nh, C64::new(0.0, -delta))?;
    let mut psi = psi0.clone();
    let mut trace = SimulationTrace::default();
    trace.push(0.0, &psi, kept_probability(&projector, &psi), leak_probability(&projector, &psi));
    for k in 1..=steps {
        psi = step.apply(&psi)?;
        let t = if k == steps { t_total } else { k as f64 * delta };
        trace.push(t, &psi, kept_probability(&projector, &psi), leak_probability(&projector, &psi));
    }
    let record = SurvivalRecord {
        w_tunnel: trace.final_survival(),
        ..SurvivalRecord::default()
    };
    Ok((trace, record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_three_level, build_three_level_ideal, build_tunneling, build_two_level, Y_DRIVE_PHASE};

    const OMEGA: f64 = 0.05;
    const ETA: f64 = -0.2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ground3() -> QuantumState {
        QuantumState::basis(3, 0).unwrap()
    }

    fn y_drive() -> ComplexMatrix {
        build_three_level(OMEGA, Y_DRIVE_PHASE, ETA)
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(two_level_survival_closed_form(0.0, 7.0, 13).unwrap(), 1.0);
        assert_eq!(two_level_survival_closed_form(1.0, 1.0, 1).unwrap(), 0.0);
        assert_eq!(two_level_survival_closed_form(1.0, 1.0, 2).unwrap(), 0.5625);
        assert!(matches!(two_level_survival_closed_form(1.0, 1.0, 0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn closed_form_approaches_limit() {
        assert_eq!(two_level_zeno_limit(3.0, 2.0), 1.0);
        let w = two_level_survival_closed_form(1.0, 1.0, 1_000_000).unwrap();
        // e^{-q/n} = 1 - 1e-6 + 5e-13 - ...
        let expected = (-1e-6f64).exp();
        assert!((w - expected).abs() < 1e-15, "{w}");
        assert!(((1.0 - w) - 1e-6).abs() < 1e-12);
    }

    #[test]
    fn closed_form_increasing_in_n() {
        let mut prev = two_level_survival_closed_form(1.0, 1.0, 2).unwrap();
        for n in 3..=10_000 {
            let w = two_level_survival_closed_form(1.0, 1.0, n).unwrap();
            assert!(w > prev, "n = {n}");
            prev = w;
        }
    }

    #[test]
    fn closed_form_branches_agree() {
        // powi branch vs log branch around the switch-over
        for n in [60usize, 64, 65, 70] {
            let x = 0.3 / (n * n) as f64;
            let direct = (1.0 - x).powi(n as i32);
            let w = two_level_survival_closed_form(0.3f64.sqrt(), 1.0, n).unwrap();
            assert!((w - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn survival_product_examples() {
        assert_eq!(survival_product(&[0.0; 5]).unwrap(), 1.0);
        assert_eq!(survival_product(&[0.5, 0.5]).unwrap(), 0.25);
        assert_eq!(survival_product(&[0.1, 1.0, 0.2]).unwrap(), 0.0);
        assert_eq!(survival_product(&[]).unwrap(), 1.0);
        assert!(survival_product(&[0.1, 1.5]).is_err());
        assert!(survival_product(&[-0.01]).is_err());
        assert!(survival_product(&[-1e-13, 1.0 + 1e-13]).is_ok());
    }

    #[test]
    fn schedule_validation() {
        assert!(ZenoSchedule::new(0, 0.1).is_err());
        assert!(ZenoSchedule::new(5, 0.0).is_err());
        assert!(ZenoSchedule::new(5, f64::NAN).is_err());
        let s = ZenoSchedule::new(50, 0.1).unwrap();
        assert!((s.t_total() - 5.0).abs() < 1e-15);
        assert_eq!(ZenoSchedule::spanning(5.0, 25).unwrap().dt(), 0.2);
    }

    #[test]
    fn unitary_ideal_is_rabi() {
        let trace = run_unitary(&build_three_level_ideal(OMEGA, ETA), &ground3(), 40.0, 200).unwrap();
        for (t, p) in trace.times.iter().zip(&trace.populations) {
            assert!((p[0] - (OMEGA * t).cos().powi(2)).abs() < 1e-10);
            assert!((p[1] - (OMEGA * t).sin().powi(2)).abs() < 1e-10);
            assert!(p[2] < 1e-10);
        }
    }

    #[test]
    fn unitary_two_level_rabi() {
        let v = 0.3;
        let trace = run_unitary(&build_two_level(v), &QuantumState::basis(2, 0).unwrap(), 7.0, 10).unwrap();
        let p2 = trace.populations.last().unwrap()[1];
        assert!((p2 - (v * 7.0).sin().powi(2)).abs() < 1e-10);
    }

    #[test]
    fn unitary_without_drive_is_constant() {
        let h = build_three_level(0.0, Y_DRIVE_PHASE, ETA);
        let psi0 = QuantumState::from_real(&[0.6, 0.8, 0.0]).unwrap();
        let trace = run_unitary(&h, &psi0, 10.0, 20).unwrap();
        for p in &trace.populations {
            assert!((p[0] - 0.36).abs() < 1e-14 && (p[1] - 0.64).abs() < 1e-14);
        }
    }

    #[test]
    fn unitary_preserves_norm() {
        let trace = run_unitary(&y_drive(), &ground3(), 100.0, 500).unwrap();
        for n in trace.norm_sqr() {
            assert!((n - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn unitary_rejects_bad_input() {
        let h_nh = build_tunneling(OMEGA, ETA, 1.0).unwrap();
        assert!(matches!(run_unitary(&h_nh, &ground3(), 1.0, 10), Err(Error::NotHermitian(_))));
        let unnormalized = QuantumState::from_real(&[1.0, 1.0, 0.0]).unwrap();
        assert!(run_unitary(&y_drive(), &unnormalized, 1.0, 10).is_err());
        assert!(run_unitary(&y_drive(), &ground3(), 1.0, 0).is_err());
        assert!(run_unitary(&y_drive(), &QuantumState::basis(2, 0).unwrap(), 1.0, 1).is_err());
    }

    #[test]
    fn zeno_ideal_matches_unitary() {
        let h = build_three_level_ideal(OMEGA, ETA);
        let schedule = ZenoSchedule::new(50, 0.1).unwrap();
        let (trace, record) = run_zeno(&h, &ground3(), schedule).unwrap();
        assert_eq!(record.w_zeno, Some(1.0));
        let free = run_unitary(&h, &ground3(), 5.0, 50).unwrap();
        for (a, b) in trace.populations.iter().zip(&free.populations) {
            for i in 0..3 {
                assert!((a[i] - b[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zeno_single_interval_equals_free_evolution() {
        let schedule = ZenoSchedule::new(1, 5.0).unwrap();
        let (_, record) = run_zeno(&y_drive(), &ground3(), schedule).unwrap();
        let baseline = no_zeno_survival(&y_drive(), &ground3(), 5.0).unwrap();
        assert_eq!(record.w_zeno.unwrap(), baseline);
    }

    #[test]
    fn zeno_trace_invariants() {
        let (trace, record) = run_zeno(&y_drive(), &ground3(), ZenoSchedule::new(50, 0.1).unwrap()).unwrap();
        assert_eq!(trace.len(), 51);
        assert!(trace.times.windows(2).all(|w| w[1] > w[0]));
        assert!(trace.survival.windows(2).all(|w| w[1] <= w[0]));
        assert!(trace.populations.iter().all(|p| p[2] == 0.0));
        assert_eq!(trace.final_survival(), record.w_zeno);
        let product = survival_product(&trace.leak[1..]).unwrap();
        assert_eq!(product, record.w_zeno.unwrap());
    }

    #[test]
    fn zeno_lower_bound_in_second_order_regime() {
        // Ω·dt = 0.01
        let dt = 0.2;
        for n in [10usize, 100, 1000] {
            let (_, r) = run_zeno(&y_drive(), &ground3(), ZenoSchedule::new(n, dt).unwrap()).unwrap();
            let bound = (1.0 - 2.0 * (OMEGA * dt).powi(2)).powi(n as i32);
            assert!(r.w_zeno.unwrap() >= bound, "n = {n}");
        }
    }

    #[test]
    fn zeno_two_level_matches_cos_power() {
        let (v, dt, n) = (0.1, 0.1, 100);
        let h = build_two_level(v);
        let (_, r) = run_zeno(&h, &QuantumState::basis(2, 0).unwrap(), ZenoSchedule::new(n, dt).unwrap()).unwrap();
        let exact = (v * dt).cos().powi(2 * n as i32);
        assert!((r.w_zeno.unwrap() - exact).abs() < 1e-13);
        let closed = two_level_survival_closed_form(v, n as f64 * dt, n).unwrap();
        assert!((r.w_zeno.unwrap() - closed).abs() <= n as f64 * (v * dt).powi(4));
    }

    #[test]
    fn zeno_degenerate_projection() {
        // V·dt = π/2 moves |1> entirely into |2>
        let v = 1.0;
        let dt = std::f64::consts::FRAC_PI_2;
        let err = run_zeno(&build_two_level(v), &QuantumState::basis(2, 0).unwrap(), ZenoSchedule::new(3, dt).unwrap());
        assert!(matches!(err, Err(Error::DegenerateProjection { step: 1, .. })), "{err:?}");
    }

    #[test]
    fn zeno_rejects_leaked_initial_state() {
        let err = run_zeno(&y_drive(), &QuantumState::basis(3, 2).unwrap(), ZenoSchedule::new(3, 0.1).unwrap());
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn perturbative_examples() {
        let (dt, w) = (0.01, OMEGA);
        let r2 = std::f64::consts::SQRT_2;
        let [_, _, a3] = perturbative_step(c(1.0, 0.0), c(0.0, 0.0), w, ETA, 0.0, dt);
        assert!((a3 - c(0.5 * r2 * w * w * dt * dt, 0.0)).norm() < 1e-18);

        let [a1, _, a3] = perturbative_step(c(0.0, 0.0), c(1.0, 0.0), w, ETA, 0.0, dt);
        assert!((a1 - c(-w * dt, 0.0)).norm() < 1e-18);
        let expected = c(r2 * w * dt, 0.0) - c(0.0, 0.5 * r2 * w * dt * dt * ETA);
        assert!((a3 - expected).norm() < 1e-18);
    }

    #[test]
    fn perturbative_cancellation_at_four_over_dt() {
        let dt = 0.003;
        let r2 = std::f64::consts::SQRT_2;
        for (a1, a2) in [(c(1.0, 0.0), c(0.0, 0.0)), (c(0.0, 0.0), c(1.0, 0.0)), (c(0.6, 0.0), c(0.0, 0.8))] {
            let [_, _, a3] = perturbative_step(a1, a2, OMEGA, ETA, 4.0 / dt, dt);
            let residue = (a1 * OMEGA * OMEGA - a2 * c(0.0, OMEGA * ETA)) * (0.5 * r2 * dt * dt);
            assert!((a3 - residue).norm() < 1e-18);
        }
    }

    /// Where the cancellation really lives: the propagator truncated at second
    /// order, `1 - iH dt - H² dt²/2`, gives |a3| ∝ dt² from (0,1,0).
    #[test]
    fn truncated_propagator_cancellation_slope() {
        let dts: Vec<f64> = (0..7).map(|k| 1e-3 * 10f64.powf(k as f64 / 6.0)).collect();
        let amps: Vec<f64> = dts
            .iter()
            .map(|&dt| {
                let h = build_tunneling(OMEGA, ETA, 4.0 / dt).unwrap();
                let id = ComplexMatrix::identity(3);
                let first = h.scale(c(0.0, -dt));
                let second = (&h * &h).scale(c(-0.5 * dt * dt, 0.0));
                let u = &(&id + &first) + &second;
                u.apply(&QuantumState::basis(3, 1).unwrap()).unwrap().amplitude(2).norm()
            })
            .collect();
        let slope = fit_slope(&dts, &amps);
        assert!((slope - 2.0).abs() < 1e-3, "{slope}");
    }

    fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
        let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
        let n = lx.len() as f64;
        let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
        let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
        sxy / sxx
    }

    #[test]
    fn tunneling_without_loss_matches_unitary() {
        let h = build_tunneling(OMEGA, ETA, 0.0).unwrap();
        let (trace, record) = run_tunneling(&h, &ground3(), 5.0, 1000).unwrap();
        let free = run_unitary(&y_drive(), &ground3(), 5.0, 1000).unwrap();
        for (a, b) in trace.populations.iter().zip(&free.populations) {
            for i in 0..3 {
                assert!((a[i] - b[i]).abs() < 1e-10);
            }
        }
        assert!((record.w_tunnel.unwrap() - free.final_survival().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn tunneling_norm_decays() {
        let h = build_tunneling(OMEGA, ETA, 40.0).unwrap();
        let (trace, _) = run_tunneling(&h, &ground3(), 5.0, default_tunneling_steps(40.0, 5.0)).unwrap();
        let norms = trace.norm_sqr();
        assert!(norms.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert!(trace.survival.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert!(*norms.last().unwrap() < 1.0);
    }

    #[test]
    fn tunneling_rejects_gain() {
        let mut h = build_tunneling(OMEGA, ETA, 0.0).unwrap();
        h = &h + &ComplexMatrix::diag(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.5)]);
        assert!(matches!(run_tunneling(&h, &ground3(), 1.0, 10), Err(Error::Gain(_))));
    }

    #[test]
    fn default_steps_rule() {
        assert_eq!(default_tunneling_steps(0.0, 5.0), 1000);
        assert_eq!(default_tunneling_steps(40.0, 5.0), 20_000);
        assert_eq!(default_tunneling_steps(1.0, 1.0), 1000);
    }
}
