//! Gate-level compilation of one Trotter step, the Gauss-law syndrome
//! measurement and the syndrome decoder.

use num_rational::Ratio;

use super::gates::{Gate, GateSequence};
use crate::error::{Error, Result};
use crate::model::{gauge_sign, ModelConfig};
use crate::operator::RegisterLayout;

/// CNOTs in the `exp(−iθ/2 ZZZ)` block.
const CNOTS_PER_PARITY_ROTATION: usize = 4;
/// CNOTs needed to read out one Gauss-law operator.
const CNOTS_PER_SYNDROME: usize = 3;

/// Index of the reusable ancilla in a register of `2N + 1` qubits.
pub fn ancilla(layout: &RegisterLayout) -> usize {
    layout.n_qubits()
}

fn register(cfg: &ModelConfig) -> Result<(RegisterLayout, GateSequence)> {
    cfg.validate()?;
    let layout = cfg.layout()?;
    Ok((layout, GateSequence::new(layout.n_qubits() + 1)))
}

/// `exp(−i θ/2 Z_a Z_b Z_c)` with the parity collected on `b`.
fn parity_rotation(seq: &mut GateSequence, a: usize, b: usize, c: usize, theta: f64) -> Result<()> {
    seq.push(Gate::Cnot { control: a, target: b })?;
    seq.push(Gate::Cnot { control: c, target: b })?;
    seq.push(Gate::Rz(b, theta))?;
    seq.push(Gate::Cnot { control: c, target: b })?;
    seq.push(Gate::Cnot { control: a, target: b })
}

/// First-order Trotter step `Π_j e^{−i dt J_a XZX/2} e^{−i dt J_a YZY/2} · Π_j e^{i dt J_f τˣ}`
/// for the gauge-invariant Hamiltonian.
pub fn trotter_step_circuit(cfg: &ModelConfig, dt: f64) -> Result<GateSequence> {
    let (layout, mut seq) = register(cfg)?;
    let theta = dt * cfg.j_a;
    for j in 0..cfg.n_sites {
        let (a, b, c) = (layout.matter(j), layout.link(j), layout.matter(j + 1));
        // H Z H = X
        for q in [a, c] {
            seq.push(Gate::H(q))?;
        }
        parity_rotation(&mut seq, a, b, c, theta)?;
        for q in [a, c] {
            seq.push(Gate::H(q))?;
        }
        // S H Z H S† = Y
        for q in [a, c] {
            seq.push(Gate::Sdg(q))?;
            seq.push(Gate::H(q))?;
        }
        parity_rotation(&mut seq, a, b, c, theta)?;
        for q in [a, c] {
            seq.push(Gate::H(q))?;
            seq.push(Gate::S(q))?;
        }
    }
    for j in 0..cfg.n_sites {
        seq.push(Gate::Rx(layout.link(j), -2.0 * dt * cfg.j_f))?;
    }
    Ok(seq)
}

/// Reads `G_j` into the ancilla: outcome 0 for `G_j = 0`, 1 for `G_j = 2`.
/// Ends with a reset so the ancilla can be reused.
pub fn syndrome_measurement_circuit(cfg: &ModelConfig, j: usize) -> Result<GateSequence> {
    let (layout, mut seq) = register(cfg)?;
    if j >= cfg.n_sites {
        return Err(Error::SiteOutOfRange { site: j, n_sites: cfg.n_sites });
    }
    let anc = ancilla(&layout);
    let (left, m, right) = (layout.link_left(j), layout.matter(j), layout.link(j));
    if gauge_sign(j) < 0.0 {
        // outcome = parity XOR 1, so that 0 still means G_j = 0
        seq.push(Gate::X(anc))?;
    }
    seq.push(Gate::H(left))?;
    seq.push(Gate::H(right))?;
    for q in [left, m, right] {
        seq.push(Gate::Cnot { control: q, target: anc })?;
    }
    seq.push(Gate::H(left))?;
    seq.push(Gate::H(right))?;
    seq.push(Gate::Measure(anc))?;
    seq.push(Gate::Reset(anc))?;
    Ok(seq)
}

/// Syndrome circuits for every site, in site order.
pub fn measurement_layer(cfg: &ModelConfig) -> Result<GateSequence> {
    let (_, mut seq) = register(cfg)?;
    for j in 0..cfg.n_sites {
        seq.extend(&syndrome_measurement_circuit(cfg, j)?)?;
    }
    Ok(seq)
}

/// Feedback gates for one syndrome together with what they leave unexplained.
#[derive(Clone, Debug, PartialEq)]
pub struct Correction {
    pub gates: GateSequence,
    /// Syndrome values not consumed by either decoding pass.
    pub residual: Vec<u8>,
}

impl Correction {
    pub fn is_complete(&self) -> bool {
        self.residual.iter().all(|&g| g == 0)
    }
}

/// Greedy decoder: adjacent `(2, 2)` pairs get a link phase flip, then isolated
/// `(0, 2, 0)` patterns get a matter bit flip.
pub fn correction_feedback(cfg: &ModelConfig, syndromes: &[u8]) -> Result<Correction> {
    let (layout, mut seq) = register(cfg)?;
    let n = cfg.n_sites;
    if syndromes.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: syndromes.len() });
    }
    if let Some(&bad) = syndromes.iter().find(|&&g| g != 0 && g != 2) {
        return Err(Error::InvalidState(format!("Gauss-law eigenvalue {bad} is not 0 or 2")));
    }
    let excited = |j: usize| syndromes[j % n] == 2;
    let mut consumed = vec![false; n];
    for j in 0..n {
        let k = (j + 1) % n;
        if !consumed[j] && !consumed[k] && excited(j) && excited(k) {
            seq.push(Gate::Z(layout.link(j)))?;
            consumed[j] = true;
            consumed[k] = true;
        }
    }
    for j in 0..n {
        if !consumed[j] && excited(j) && !excited(j + n - 1) && !excited(j + 1) {
            seq.push(Gate::X(layout.matter(j)))?;
            consumed[j] = true;
        }
    }
    let residual = (0..n).map(|j| if excited(j) && !consumed[j] { 2 } else { 0 }).collect();
    Ok(Correction { gates: seq, residual })
}

/// CNOT counts of the noisy circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CnotBudget {
    pub per_step: usize,
    pub per_measurement_layer: usize,
    /// Total CNOTs relative to the uncorrected circuit with one measurement
    /// layer every `n_between` steps.
    pub overhead_ratio: Ratio<usize>,
}

pub fn cnot_budget(n_sites: usize, n_between: usize) -> Result<CnotBudget> {
    if n_sites == 0 || n_between == 0 {
        return Err(Error::InvalidConfig("cnot budget needs at least one site and one step per layer".into()));
    }
    let per_step = 2 * CNOTS_PER_PARITY_ROTATION * n_sites;
    let per_measurement_layer = CNOTS_PER_SYNDROME * n_sites;
    let overhead_ratio = Ratio::new(n_between * per_step + per_measurement_layer, n_between * per_step);
    Ok(CnotBudget { per_step, per_measurement_layer, overhead_ratio })
}
