//! Hamiltonians and projectors.
//!
//! Basis conventions: level `|k>` (1-based in physics notation) is index
//! `k - 1`. For three qubits the tensor order is qubit 1 ⊗ qubit 2 ⊗ qubit 3,
//! `|0>` is the ground state and `σ_z|0> = +|0>`.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use crate::error::{Error, Result};
use crate::linalg::{kron_all, ComplexMatrix, C64, ONE, ZERO};

/// Anharmonicity used when a scenario does not set one, rad/ns.
pub const DEFAULT_ETA: f64 = -0.2;

/// Drive phase that makes the drive rotate about the Bloch-sphere Y axis.
pub const Y_DRIVE_PHASE: f64 = -FRAC_PI_2;

/// Physical parameters from which every Hamiltonian is built.
///
/// All frequencies and rates are angular, in rad/ns (ħ = 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSpec {
    /// Rabi frequency Ω.
    pub omega: f64,
    /// Drive phase φ, rad.
    pub phi: f64,
    /// Anharmonicity η = E3 - 2 E2 (negative for phase and transmon qubits).
    pub eta: f64,
    /// Tunneling rate Γ of the third level, 1/ns.
    pub gamma: f64,
    /// Two-level coupling V.
    pub v: f64,
    /// Transverse (XY) qubit-qubit coupling.
    pub g: f64,
    /// Longitudinal (ZZ) qubit-qubit coupling.
    pub g_tilde: f64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            omega: 0.0,
            phi: Y_DRIVE_PHASE,
            eta: DEFAULT_ETA,
            gamma: 0.0,
            v: 0.0,
            g: 0.0,
            g_tilde: 0.0,
        }
    }
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega", self.omega),
            ("phi", self.phi),
            ("eta", self.eta),
            ("gamma", self.gamma),
            ("v", self.v),
            ("g", self.g),
            ("g_tilde", self.g_tilde),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, x)| !x.is_finite()) {
            return Err(Error::invalid(format!("{name} must be finite")));
        }
        if self.omega < 0.0 {
            return Err(Error::invalid(format!("omega must be >= 0, got {}", self.omega)));
        }
        if self.gamma < 0.0 {
            return Err(Error::invalid(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Three-level drive Hamiltonian at this model's phase.
    pub fn three_level(&self) -> ComplexMatrix {
        build_three_level(self.omega, self.phi, self.eta)
    }

    pub fn three_level_ideal(&self) -> ComplexMatrix {
        build_three_level_ideal(self.omega, self.eta)
    }

    pub fn tunneling(&self) -> Result<ComplexMatrix> {
        build_tunneling(self.omega, self.eta, self.gamma)
    }

    pub fn two_level(&self) -> ComplexMatrix {
        build_two_level(self.v)
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `[[0, V], [V, 0]]`.
pub fn build_two_level(v: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| if i != j { c(v, 0.0) } else { ZERO })
}

/// Resonantly driven three-level qubit in the rotating frame:
///
/// ```text
/// [[0,         Ω e^{iφ},     0         ],
///  [Ω e^{-iφ}, 0,            √2 Ω e^{iφ}],
///  [0,         √2 Ω e^{-iφ}, η         ]]
/// ```
pub fn build_three_level(omega: f64, phi: f64, eta: f64) -> ComplexMatrix {
    let up = C64::from_polar(omega, phi);
    let down = up.conj();
    ComplexMatrix::from_rows(vec![
        vec![ZERO, up, ZERO],
        vec![down, ZERO, up * SQRT_2],
        vec![ZERO, down * SQRT_2, c(eta, 0.0)],
    ])
    .expect("3x3 literal")
}

/// Y-drive Hamiltonian with the |2>↔|3> coupling removed; never leaks.
pub fn build_three_level_ideal(omega: f64, eta: f64) -> ComplexMatrix {
    ComplexMatrix::from_rows(vec![
        vec![ZERO, c(0.0, -omega), ZERO],
        vec![c(0.0, omega), ZERO, ZERO],
        vec![ZERO, ZERO, c(eta, 0.0)],
    ])
    .expect("3x3 literal")
}

/// Y-drive Hamiltonian with a tunneling third level, `η -> η - iΓ/2`.
pub fn build_tunneling(omega: f64, eta: f64, gamma: f64) -> Result<ComplexMatrix> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::invalid(format!(
            "tunneling rate must be finite and >= 0, got {gamma}"
        )));
    }
    let h = build_three_level(omega, Y_DRIVE_PHASE, eta);
    Ok(ComplexMatrix::from_fn(3, |i, j| {
        if i == 2 && j == 2 {
            c(eta, -gamma / 2.0)
        } else {
            h.get(i, j)
        }
    }))
}

/// `P_comp = 1 - |3><3|`, the projector onto the computational subspace.
pub fn projector_comp(dim: usize) -> Result<ComplexMatrix> {
    if dim != 3 {
        return Err(Error::UnsupportedDim(dim));
    }
    Ok(ComplexMatrix::diag(&[ONE, ONE, ZERO]))
}

/// `P_3 = |3><3|`.
pub fn projector_leak(dim: usize) -> Result<ComplexMatrix> {
    if dim != 3 {
        return Err(Error::UnsupportedDim(dim));
    }
    Ok(ComplexMatrix::diag(&[ZERO, ZERO, ONE]))
}

/// Projector onto `|1>` for the two-level toy: a negative measurement of `|2>`.
pub fn projector_ground(dim: usize) -> Result<ComplexMatrix> {
    if dim != 2 {
        return Err(Error::UnsupportedDim(dim));
    }
    Ok(ComplexMatrix::diag(&[ONE, ZERO]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        let rows = match self {
            Pauli::I => vec![vec![ONE, ZERO], vec![ZERO, ONE]],
            Pauli::X => vec![vec![ZERO, ONE], vec![ONE, ZERO]],
            Pauli::Y => vec![vec![ZERO, c(0.0, -1.0)], vec![c(0.0, 1.0), ZERO]],
            Pauli::Z => vec![vec![ONE, ZERO], vec![ZERO, -ONE]],
        };
        ComplexMatrix::from_rows(rows).expect("2x2 literal")
    }
}

/// Tensor product of single-qubit operators, one per slot, qubit 1 first.
pub fn pauli_string(ops: &[Pauli]) -> ComplexMatrix {
    let mats: Vec<ComplexMatrix> = ops.iter().map(|p| p.matrix()).collect();
    let refs: Vec<&ComplexMatrix> = mats.iter().collect();
    kron_all(&refs)
}

/// `op` acting on qubit `slot` (0-based) of an `n_qubits` register.
pub fn embed(op: &ComplexMatrix, slot: usize, n_qubits: usize) -> ComplexMatrix {
    assert!(slot < n_qubits);
    let id = ComplexMatrix::identity(op.dim());
    let factors: Vec<&ComplexMatrix> = (0..n_qubits)
        .map(|k| if k == slot { op } else { &id })
        .collect();
    kron_all(&factors)
}

/// `Ω⃗·σ⃗` for one qubit.
pub fn drive_term(omega_vec: [f64; 3]) -> ComplexMatrix {
    let parts = [Pauli::X, Pauli::Y, Pauli::Z]
        .iter()
        .zip(omega_vec)
        .map(|(p, w)| p.matrix().scale(c(w, 0.0)));
    parts.fold(ComplexMatrix::zeros(2), |acc, m| &acc + &m)
}

/// Pairwise coupling `½ Σ_{i<j} [g (σx σx + σy σy) + g̃ σz σz]` on three qubits.
pub fn ghz_coupling(g: f64, g_tilde: f64) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(8);
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        for (pauli, strength) in [(Pauli::X, g), (Pauli::Y, g), (Pauli::Z, g_tilde)] {
            let mut ops = [Pauli::I; 3];
            ops[i] = pauli;
            ops[j] = pauli;
            h = &h + &pauli_string(&ops).scale(c(0.5 * strength, 0.0));
        }
    }
    h
}

/// Fully connected three-qubit Hamiltonian in the rotating frame:
/// single-qubit drives `Σ Ω⃗_i·σ⃗_i` plus [`ghz_coupling`].
pub fn build_ghz_hamiltonian(omega_vecs: [[f64; 3]; 3], g: f64, g_tilde: f64) -> ComplexMatrix {
    let drives = omega_vecs
        .iter()
        .enumerate()
        .map(|(slot, &w)| embed(&drive_term(w), slot, 3));
    let h = drives.fold(ComplexMatrix::zeros(8), |acc, m| &acc + &m);
    &h + &ghz_coupling(g, g_tilde)
}
