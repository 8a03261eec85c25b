//! Stochastic CNOT error channel and noisy execution of gate sequences.

use rand::Rng;

use super::gates::{Gate, GateSequence};
use super::statevector::StateVector;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flip {
    Bit,
    Phase,
}

/// Placement of a single flip around a CNOT.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CnotFault {
    pub flip: Flip,
    pub on_target: bool,
    pub after: bool,
}

impl CnotFault {
    /// The eight equiprobable placements.
    pub fn all() -> impl Iterator<Item = CnotFault> {
        (0..8).map(Self::from_index)
    }

    fn from_index(v: usize) -> Self {
        Self {
            flip: if v & 1 == 0 { Flip::Bit } else { Flip::Phase },
            on_target: v & 2 != 0,
            after: v & 4 != 0,
        }
    }

    fn apply(&self, state: &mut StateVector, control: usize, target: usize) {
        let q = if self.on_target { target } else { control };
        match self.flip {
            Flip::Bit => state.x(q),
            Flip::Phase => state.z(q),
        }
    }
}

/// Ideal CNOT, preceded or followed by one flip with probability `p`.
/// Always consumes one uniform draw, plus one more when a fault occurs.
pub fn apply_cnot_noise<R: Rng>(
    state: &mut StateVector,
    control: usize,
    target: usize,
    p: f64,
    rng: &mut R,
) -> Option<CnotFault> {
    let fault = (rng.random::<f64>() < p).then(|| CnotFault::from_index(rng.random_range(0..8)));
    if let Some(f) = fault.filter(|f| !f.after) {
        f.apply(state, control, target);
    }
    state.cnot(control, target);
    if let Some(f) = fault.filter(|f| f.after) {
        f.apply(state, control, target);
    }
    fault
}

/// Runs `seq` with every CNOT passed through the error channel; single-qubit
/// gates are ideal. Returns the measurement outcomes in order.
pub fn run_noisy<R: Rng>(state: &mut StateVector, seq: &GateSequence, p: f64, rng: &mut R) -> Result<Vec<u8>> {
    if seq.n_qubits() != state.n_qubits() {
        return Err(Error::DimensionMismatch { expected: state.n_qubits(), found: seq.n_qubits() });
    }
    let mut outcomes = Vec::new();
    for gate in seq.gates() {
        match *gate {
            Gate::Cnot { control, target } if p > 0.0 => {
                apply_cnot_noise(state, control, target, p, rng);
            }
            _ => outcomes.extend(state.apply(gate, rng)),
        }
    }
    Ok(outcomes)
}
