//! Continuous-time noise model equivalent to the noisy circuit to first order in `p`.
//!
//! Every fault placement of every CNOT is pushed through the remaining gates of
//! its step or measurement layer as a Pauli frame. Rotations by angles of order
//! `dt` are treated as the identity. In a measurement layer the frame also flips
//! ancilla outcomes; the decoder's reaction to those outcomes is folded into the
//! resulting Pauli. Each distinct Pauli becomes a jump with the summed rate of
//! the placements producing it.

use std::collections::BTreeMap;

use super::compile::{correction_feedback, measurement_layer, trotter_step_circuit};
use super::gates::{Gate, GateSequence};
use super::noise::{CnotFault, Flip};
use super::trajectories::CircuitRunConfig;
use crate::engine::EvolutionProblem;
use crate::error::{Error, Result};
use crate::model::{self, JumpOperatorSet, ModelConfig};
use crate::operator::{Factor, OperatorExpr};

/// Pauli string up to phase; bit `q` of `x`/`z` marks an X/Z factor on qubit `q`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pauli {
    pub x: u64,
    pub z: u64,
}

impl Pauli {
    pub fn single(q: usize, flip: Flip) -> Self {
        match flip {
            Flip::Bit => Self { x: 1 << q, z: 0 },
            Flip::Phase => Self { x: 0, z: 1 << q },
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    fn bit(v: u64, q: usize) -> bool {
        v >> q & 1 == 1
    }

    fn clear(&mut self, q: usize) {
        self.x &= !(1 << q);
        self.z &= !(1 << q);
    }

    /// Heisenberg-picture update `P → U P U†` for a Clifford gate; rotations are skipped.
    fn conjugate(&mut self, gate: &Gate) {
        match *gate {
            Gate::Cnot { control, target } => {
                if Self::bit(self.x, control) {
                    self.x ^= 1 << target;
                }
                if Self::bit(self.z, target) {
                    self.z ^= 1 << control;
                }
            }
            Gate::H(q) => {
                let (xb, zb) = (Self::bit(self.x, q), Self::bit(self.z, q));
                self.clear(q);
                self.x |= u64::from(zb) << q;
                self.z |= u64::from(xb) << q;
            }
            Gate::S(q) | Gate::Sdg(q) => {
                if Self::bit(self.x, q) {
                    self.z ^= 1 << q;
                }
            }
            Gate::Reset(q) => self.clear(q),
            Gate::Rz(..) | Gate::Rx(..) | Gate::X(_) | Gate::Z(_) | Gate::Measure(_) => {}
        }
    }

    fn compose(&mut self, other: &Pauli) {
        self.x ^= other.x;
        self.z ^= other.z;
    }

    /// Operator on the first `n_qubits` qubits.
    pub fn to_operator(&self, n_qubits: usize) -> Result<OperatorExpr> {
        let mut op = OperatorExpr::identity(n_qubits);
        for q in 0..n_qubits {
            let f = match (Self::bit(self.x, q), Self::bit(self.z, q)) {
                (true, true) => Factor::Y,
                (true, false) => Factor::X,
                (false, true) => Factor::Z,
                (false, false) => continue,
            };
            op = &op * &OperatorExpr::embed(n_qubits, q, f)?;
        }
        Ok(op)
    }

    pub fn label(&self, n_qubits: usize) -> String {
        (0..n_qubits)
            .filter_map(|q| match (Self::bit(self.x, q), Self::bit(self.z, q)) {
                (true, true) => Some(format!("Y{q}")),
                (true, false) => Some(format!("X{q}")),
                (false, true) => Some(format!("Z{q}")),
                (false, false) => None,
            })
            .collect()
    }
}

/// Propagates a fault through `gates`, returning the final frame and the
/// outcome flip of every measurement met on the way.
fn propagate(mut frame: Pauli, gates: &[Gate]) -> (Pauli, Vec<bool>) {
    let mut flips = Vec::new();
    for g in gates {
        if let Gate::Measure(q) = *g {
            flips.push(Pauli::bit(frame.x, q));
        }
        frame.conjugate(g);
    }
    (frame, flips)
}

/// Pauli frames and outcome flips of every measurement in the sequence, one per
/// (CNOT, placement).
fn fault_frames(seq: &GateSequence) -> Vec<(Pauli, Vec<bool>)> {
    let gates = seq.gates();
    let mut out = Vec::new();
    for (k, gate) in gates.iter().enumerate() {
        let Gate::Cnot { control, target } = *gate else { continue };
        for fault in CnotFault::all() {
            let q = if fault.on_target { target } else { control };
            let start = Pauli::single(q, fault.flip);
            let split = if fault.after { k + 1 } else { k };
            let (frame, later) = propagate(start, &gates[split..]);
            let earlier = gates[..split].iter().filter(|g| matches!(g, Gate::Measure(_))).count();
            let mut flips = vec![false; earlier];
            flips.extend(later);
            out.push((frame, flips));
        }
    }
    out
}

fn frame_of_feedback(cfg: &ModelConfig, flips: &[bool]) -> Result<Pauli> {
    let syndromes: Vec<u8> = flips.iter().map(|&f| 2 * u8::from(f)).collect();
    let fix = correction_feedback(cfg, &syndromes)?;
    let mut frame = Pauli::default();
    for g in fix.gates.gates() {
        match *g {
            Gate::X(q) => frame.compose(&Pauli::single(q, Flip::Bit)),
            Gate::Z(q) => frame.compose(&Pauli::single(q, Flip::Phase)),
            _ => return Err(Error::InvalidCircuit(format!("unexpected feedback gate {g}"))),
        }
    }
    Ok(frame)
}

/// Pauli left by each fault placement of a Trotter step, ordered by CNOT and then placement.
pub(super) fn step_error_frames(cfg: &ModelConfig, dt: f64) -> Result<Vec<Pauli>> {
    Ok(fault_frames(&trotter_step_circuit(cfg, dt)?).into_iter().map(|(frame, _)| frame).collect())
}

/// Net Pauli left by each fault placement of a measurement layer after feedback,
/// ordered by CNOT and then placement.
pub(super) fn layer_error_frames(cfg: &ModelConfig) -> Result<Vec<Pauli>> {
    fault_frames(&measurement_layer(cfg)?)
        .into_iter()
        .map(|(mut frame, flips)| {
            frame.compose(&frame_of_feedback(cfg, &flips)?);
            Ok(frame)
        })
        .collect()
}

/// Net error channels of the noisy circuit as Pauli jumps on the system register.
pub fn effective_noise_jumps(cfg: &ModelConfig, run: &CircuitRunConfig) -> Result<JumpOperatorSet> {
    run.validate()?;
    let layout = cfg.layout()?;
    let nq = layout.n_qubits();
    let per_placement = run.p / 8.0;
    let mut rates: BTreeMap<Pauli, f64> = BTreeMap::new();

    let step_rate = per_placement / run.dt;
    for frame in step_error_frames(cfg, run.dt)? {
        *rates.entry(frame).or_default() += step_rate;
    }
    if run.corrections {
        let layer_rate = per_placement * run.correction_rate();
        for frame in layer_error_frames(cfg)? {
            *rates.entry(frame).or_default() += layer_rate;
        }
    }

    let mut set = JumpOperatorSet::new();
    for (pauli, rate) in rates {
        if pauli.is_identity() || rate == 0.0 {
            continue;
        }
        if pauli.x >> nq != 0 || pauli.z >> nq != 0 {
            return Err(Error::InvalidCircuit("fault frame left on the ancilla".into()));
        }
        set.push_scaled(&pauli.to_operator(nq)?, rate, pauli.label(nq));
    }
    Ok(set)
}

/// Lindblad problem the trajectory average should reproduce: `H0`, the
/// effective noise, and correction jumps at the measurement-layer rate.
pub fn lindblad_reference(cfg: &ModelConfig, run: &CircuitRunConfig) -> Result<EvolutionProblem> {
    let mut jumps = effective_noise_jumps(cfg, run)?;
    let corrected = ModelConfig { gamma_c: run.correction_rate(), ..cfg.clone() };
    jumps.extend(model::build_correction_jumps(&corrected)?);
    let samples = (0..)
        .map(|s| s as f64 * run.sample_interval)
        .take_while(|&t| t <= run.t_final + 1e-9 * run.t_final.max(1.0))
        .collect();
    Ok(EvolutionProblem::new(model::build_h0(cfg)?, jumps, model::initial_state(cfg)?, samples))
}
