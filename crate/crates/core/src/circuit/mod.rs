//! Gate-level simulation of the Trotterized model with noisy CNOTs, ancilla
//! syndrome measurement and feedback correction.

mod compile;
mod effective;
mod gates;
mod noise;
mod statevector;
mod trajectories;

pub use compile::{
    ancilla, cnot_budget, correction_feedback, measurement_layer, syndrome_measurement_circuit, trotter_step_circuit,
    CnotBudget, Correction,
};
pub use effective::{effective_noise_jumps, lindblad_reference, Pauli};
pub use gates::{Gate, GateSequence};
pub use noise::{apply_cnot_noise, run_noisy, CnotFault, Flip};
pub use statevector::StateVector;
pub use trajectories::{error_probability, run_trajectories, CircuitRunConfig, NORM_TOL};

#[cfg(test)]
mod tests;
