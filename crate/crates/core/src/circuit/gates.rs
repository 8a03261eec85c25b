//! Gate set and validated gate sequences.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Cnot { control: usize, target: usize },
    H(usize),
    S(usize),
    Sdg(usize),
    /// `exp(−iθZ/2)`.
    Rz(usize, f64),
    /// `exp(−iθX/2)`.
    Rx(usize, f64),
    X(usize),
    Z(usize),
    Measure(usize),
    Reset(usize),
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::Cnot { .. } => "CNOT",
            Gate::H(_) => "H",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::Rz(..) => "RZ",
            Gate::Rx(..) => "RX",
            Gate::X(_) => "X",
            Gate::Z(_) => "Z",
            Gate::Measure(_) => "MEASURE",
            Gate::Reset(_) => "RESET",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Cnot { control, target } => vec![control, target],
            Gate::H(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::Rz(q, _)
            | Gate::Rx(q, _)
            | Gate::X(q)
            | Gate::Z(q)
            | Gate::Measure(q)
            | Gate::Reset(q) => vec![q],
        }
    }

    pub fn is_cnot(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }
}

/// `NAME q0 [q1] [angle]`.
impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        if let Gate::Rz(_, a) | Gate::Rx(_, a) = self {
            write!(f, " {a:?}")?;
        }
        Ok(())
    }
}

/// Ordered gates on a register of `n_qubits`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GateSequence {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl GateSequence {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        for q in gate.qubits() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits: self.n_qubits });
            }
        }
        if let Gate::Cnot { control, target } = gate {
            if control == target {
                return Err(Error::InvalidCircuit(format!("CNOT with control = target = {control}")));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &GateSequence) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: other.n_qubits });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cnot()).count()
    }

    /// Every qubit index is in range and a measured qubit is reset before it is used again.
    pub fn validate(&self) -> Result<()> {
        let mut measured = vec![false; self.n_qubits];
        for (k, gate) in self.gates.iter().enumerate() {
            let qubits = gate.qubits();
            if let Some(&q) = qubits.iter().find(|&&q| q >= self.n_qubits) {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits: self.n_qubits });
            }
            match *gate {
                Gate::Reset(q) => measured[q] = false,
                Gate::Measure(q) if measured[q] => {
                    return Err(Error::InvalidCircuit(format!("gate {k}: qubit {q} measured twice without reset")));
                }
                Gate::Measure(q) => measured[q] = true,
                _ => {
                    if let Some(&q) = qubits.iter().find(|&&q| measured[q]) {
                        return Err(Error::InvalidCircuit(format!(
                            "gate {k} ({gate}) reuses qubit {q} after measurement without reset"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// One gate per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}
