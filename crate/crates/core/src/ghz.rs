//! Single-step GHZ preparation on three ideal, fully connected qubits:
//! `X_{π/2} · U_int(t_GHZ) · Y_{π/2} |000>`.
//!
//! Rotations are instantaneous `exp(-i(θ/2)σ)` on every qubit with the
//! couplings off; the entangling step runs the pairwise XY + ZZ coupling for
//! `t_GHZ = π / (2|g - g̃|)` with the drives off.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{kron_all, mat_exp, ComplexMatrix, QuantumState, C64, HERMITIAN_TOL};
use crate::models::{ghz_coupling, Pauli};

const N_QUBITS: usize = 3;
const GHZ_DIM: usize = 1 << N_QUBITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
        }
    }
}

/// Single-qubit `exp(-i(θ/2)σ_axis)`.
pub fn single_qubit_rotation(axis: Axis, theta: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let id = ComplexMatrix::identity(2);
    let sigma = axis.pauli().matrix();
    &id.scale(C64::new(c, 0.0)) + &sigma.scale(C64::new(0.0, -s))
}

/// Simultaneous rotation of all three qubits, `R^{(3)} R^{(2)} R^{(1)}`.
pub fn rotation_pulse(axis: Axis, theta: f64) -> ComplexMatrix {
    let r = single_qubit_rotation(axis, theta);
    kron_all(&[&r, &r, &r])
}

/// `π / (2|g - g̃|)`.
pub fn entangling_time(g: f64, g_tilde: f64) -> Result<f64> {
    if !g.is_finite() || !g_tilde.is_finite() {
        return Err(Error::invalid("couplings must be finite"));
    }
    if g == g_tilde {
        return Err(Error::DivergentTime(g));
    }
    Ok(PI / (2.0 * (g - g_tilde).abs()))
}

#[derive(Clone, Debug)]
pub enum PulseStep {
    /// Ideal instantaneous unitary.
    Instant { label: &'static str, unitary: ComplexMatrix },
    /// `exp(-i G τ)` for a Hermitian generator `G` and duration `τ > 0`.
    Evolve {
        label: &'static str,
        generator: ComplexMatrix,
        duration: f64,
    },
}

impl PulseStep {
    pub fn label(&self) -> &'static str {
        match self {
            PulseStep::Instant { label, .. } | PulseStep::Evolve { label, .. } => label,
        }
    }

    pub fn duration(&self) -> f64 {
        match self {
            PulseStep::Instant { .. } => 0.0,
            PulseStep::Evolve { duration, .. } => *duration,
        }
    }

    pub fn unitary(&self) -> Result<ComplexMatrix> {
        match self {
            PulseStep::Instant { unitary, .. } => Ok(unitary.clone()),
            PulseStep::Evolve { generator, duration, .. } => {
                mat_exp(generator, C64::new(0.0, -duration))
            }
        }
    }
}

/// Ordered list of pulse steps acting on the 8-dimensional register.
#[derive(Clone, Debug, Default)]
pub struct PulseSequence {
    steps: Vec<PulseStep>,
}

impl PulseSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn instant(mut self, label: &'static str, unitary: ComplexMatrix) -> Result<Self> {
        if unitary.dim() != GHZ_DIM {
            return Err(Error::DimensionMismatch {
                expected: GHZ_DIM,
                found: unitary.dim(),
            });
        }
        self.steps.push(PulseStep::Instant { label, unitary });
        Ok(self)
    }

    pub fn evolve(mut self, label: &'static str, generator: ComplexMatrix, duration: f64) -> Result<Self> {
        if generator.dim() != GHZ_DIM {
            return Err(Error::DimensionMismatch {
                expected: GHZ_DIM,
                found: generator.dim(),
            });
        }
        let dev = generator.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::invalid(format!("step duration must be positive, got {duration}")));
        }
        self.steps.push(PulseStep::Evolve {
            label,
            generator,
            duration,
        });
        Ok(self)
    }

    pub fn steps(&self) -> &[PulseStep] {
        &self.steps
    }

    pub fn duration(&self) -> f64 {
        self.steps.iter().map(PulseStep::duration).sum()
    }

    /// Applies every step in order; returns the state after each one.
    pub fn run(&self, psi0: &QuantumState) -> Result<Vec<QuantumState>> {
        let mut states = Vec::with_capacity(self.steps.len());
        let mut psi = psi0.clone();
        for step in &self.steps {
            psi = step.unitary()?.apply(&psi)?;
            states.push(psi.clone());
        }
        Ok(states)
    }
}

/// `Y_{π/2}`, then `U_int(t_GHZ)`, then `X_{π/2}`.
pub fn ghz_sequence(g: f64, g_tilde: f64) -> Result<PulseSequence> {
    let t = entangling_time(g, g_tilde)?;
    PulseSequence::new()
        .instant("Y_pi/2", rotation_pulse(Axis::Y, FRAC_PI_2))?
        .evolve("U_int", ghz_coupling(g, g_tilde), t)?
        .instant("X_pi/2", rotation_pulse(Axis::X, FRAC_PI_2))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhzDiagnostics {
    /// `max_φ |<(|000> + e^{iφ}|111>)/√2 | ψ>|² = (|a_000| + |a_111|)² / 2`.
    pub fidelity: f64,
    /// `max_k | |a_k|² - 1/8 |`.
    pub uniformity_deviation: f64,
    /// Argument of the largest-modulus amplitude (lowest index on ties), rad.
    pub global_phase: f64,
}

pub fn ghz_fidelity(psi: &QuantumState) -> Result<GhzDiagnostics> {
    if psi.dim() != GHZ_DIM {
        return Err(Error::DimensionMismatch {
            expected: GHZ_DIM,
            found: psi.dim(),
        });
    }
    let amps = psi.amplitudes();
    let fidelity = (amps[0].norm() + amps[GHZ_DIM - 1].norm()).powi(2) / 2.0;
    let uniform = 1.0 / GHZ_DIM as f64;
    let uniformity_deviation = amps
        .iter()
        .map(|a| (a.norm_sqr() - uniform).abs())
        .fold(0.0, f64::max);
    let mut dominant = amps[0];
    for &a in &amps[1..] {
        if a.norm() > dominant.norm() {
            dominant = a;
        }
    }
    Ok(GhzDiagnostics {
        fidelity,
        uniformity_deviation,
        global_phase: dominant.arg(),
    })
}

#[derive(Clone, Debug)]
pub struct GhzOutcome {
    pub state: QuantumState,
    pub diagnostics: GhzDiagnostics,
    /// State after the initial `Y_{π/2}`, the uniform superposition.
    pub uniform_stage: QuantumState,
    /// Entangling time `t_GHZ`, ns.
    pub entangling_time: f64,
    /// Total protocol duration (rotations are instantaneous), ns.
    pub duration: f64,
}

pub fn run_ghz_protocol(g: f64, g_tilde: f64) -> Result<GhzOutcome> {
    let sequence = ghz_sequence(g, g_tilde)?;
    let mut states = sequence.run(&QuantumState::basis(GHZ_DIM, 0)?)?;
    let state = states.pop().expect("three steps");
    Ok(GhzOutcome {
        diagnostics: ghz_fidelity(&state)?,
        uniform_stage: states.swap_remove(0),
        state,
        entangling_time: entangling_time(g, g_tilde)?,
        duration: sequence.duration(),
    })
}
