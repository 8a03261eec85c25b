//! Dense statevector simulator. Qubit 0 is the most significant bit of the basis index.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use rand::Rng;

use super::gates::{Gate, GateSequence};
use crate::error::{Error, Result};
use crate::operator::{I, ONE, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Self { n_qubits, amps }
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << n_qubits, found: amps.len() });
        }
        Ok(Self { n_qubits, amps })
    }

    /// `|ψ⟩ ⊗ |0…0⟩` with `extra` trailing qubits.
    pub fn with_ancillas(psi: &[C64], extra: usize) -> Result<Self> {
        if !psi.len().is_power_of_two() {
            return Err(Error::InvalidState(format!("length {} is not a power of two", psi.len())));
        }
        let n = psi.len().trailing_zeros() as usize + extra;
        let mut amps = vec![ZERO; 1 << n];
        for (i, &a) in psi.iter().enumerate() {
            amps[i << extra] = a;
        }
        Ok(Self { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Amplitudes of the leading qubits with the trailing `extra` qubits in `|0⟩`.
    pub fn leading_register(&self, extra: usize) -> Vec<C64> {
        self.amps.iter().step_by(1 << extra).copied().collect()
    }

    #[inline]
    fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    /// Applies `[[a, b], [c, d]]` to qubit `q`.
    fn apply_1q(&mut self, q: usize, m: [[C64; 2]; 2]) {
        let bit = self.mask(q);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn phase_on_one(&mut self, q: usize, phase: C64) {
        let bit = self.mask(q);
        self.amps.iter_mut().enumerate().filter(|(i, _)| i & bit != 0).for_each(|(_, a)| *a *= phase);
    }

    pub fn x(&mut self, q: usize) {
        let bit = self.mask(q);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
    }

    pub fn z(&mut self, q: usize) {
        self.phase_on_one(q, -ONE);
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        let (c, t) = (self.mask(control), self.mask(target));
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    /// Probability of reading 1 on qubit `q`.
    pub fn probability_one(&self, q: usize) -> f64 {
        let bit = self.mask(q);
        self.amps.iter().enumerate().filter(|(i, _)| i & bit != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Projective measurement in the computational basis.
    pub fn measure<R: Rng>(&mut self, q: usize, rng: &mut R) -> u8 {
        let p1 = self.probability_one(q);
        let outcome = u8::from(rng.random::<f64>() < p1);
        let keep = if outcome == 1 { p1 } else { 1.0 - p1 };
        let scale = 1.0 / keep.sqrt();
        let bit = self.mask(q);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & bit != 0) == (outcome == 1) {
                *a *= scale;
            } else {
                *a = ZERO;
            }
        }
        outcome
    }

    /// Measures `q` and flips it back to `|0⟩` if needed.
    pub fn reset<R: Rng>(&mut self, q: usize, rng: &mut R) {
        if self.measure(q, rng) == 1 {
            self.x(q);
        }
    }

    /// Applies a single gate; returns the outcome of a measurement.
    pub fn apply<R: Rng>(&mut self, gate: &Gate, rng: &mut R) -> Option<u8> {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        match *gate {
            Gate::Cnot { control, target } => self.cnot(control, target),
            Gate::H(q) => self.apply_1q(q, [[h, h], [h, -h]]),
            Gate::S(q) => self.phase_on_one(q, I),
            Gate::Sdg(q) => self.phase_on_one(q, -I),
            Gate::Rz(q, theta) => {
                let e = C64::from_polar(1.0, -theta / 2.0);
                self.apply_1q(q, [[e, ZERO], [ZERO, e.conj()]]);
            }
            Gate::Rx(q, theta) => {
                let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                let (c, s) = (C64::new(c, 0.0), C64::new(0.0, -s));
                self.apply_1q(q, [[c, s], [s, c]]);
            }
            Gate::X(q) => self.x(q),
            Gate::Z(q) => self.z(q),
            Gate::Measure(q) => return Some(self.measure(q, rng)),
            Gate::Reset(q) => self.reset(q, rng),
        }
        None
    }

    /// Runs a whole sequence without noise, returning measurement outcomes in order.
    pub fn run<R: Rng>(&mut self, seq: &GateSequence, rng: &mut R) -> Result<Vec<u8>> {
        if seq.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: seq.n_qubits() });
        }
        Ok(seq.gates().iter().filter_map(|g| self.apply(g, rng)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{Factor, OperatorExpr};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps: Vec<C64> = (0..1 << n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(n, amps).unwrap()
    }

    #[test]
    fn single_qubit_gates_match_embedded_matrices() {
        // oracle: sparse Kronecker embedding of the same 2×2 matrices
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for q in 0..3 {
            for (gate, factor) in [(Gate::X(q), Factor::X), (Gate::Z(q), Factor::Z)] {
                let mut psi = random_state(3, 7);
                let expected = OperatorExpr::embed(3, q, factor).unwrap().apply(psi.amplitudes());
                psi.apply(&gate, &mut rng);
                for (a, b) in psi.amplitudes().iter().zip(&expected) {
                    assert!((a - b).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn rotation_conventions() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let theta = 0.7;
        let mut psi = StateVector::zero(1);
        psi.apply(&Gate::Rx(0, theta), &mut rng);
        assert!((psi.amplitudes()[0] - C64::new((theta / 2.0).cos(), 0.0)).norm() < 1e-15);
        assert!((psi.amplitudes()[1] - C64::new(0.0, -(theta / 2.0).sin())).norm() < 1e-15);

        let mut psi = StateVector::from_amplitudes(1, vec![ONE, ONE].into_iter().map(|a| a * FRAC_1_SQRT_2).collect()).unwrap();
        psi.apply(&Gate::Rz(0, theta), &mut rng);
        let ratio = psi.amplitudes()[1] / psi.amplitudes()[0];
        assert!((ratio - C64::from_polar(1.0, theta)).norm() < 1e-14);
    }

    #[test]
    fn cnot_truth_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for input in 0..4usize {
            let mut amps = vec![ZERO; 4];
            amps[input] = ONE;
            let mut psi = StateVector::from_amplitudes(2, amps).unwrap();
            psi.apply(&Gate::Cnot { control: 0, target: 1 }, &mut rng);
            let expected = if input & 2 != 0 { input ^ 1 } else { input };
            assert_eq!(psi.amplitudes()[expected], ONE);
        }
    }

    #[test]
    fn s_h_conjugation_maps_z_to_y() {
        // S H Z H S† = Y
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let psi0 = random_state(1, 3);
        let mut psi = psi0.clone();
        for g in [Gate::Sdg(0), Gate::H(0), Gate::Z(0), Gate::H(0), Gate::S(0)] {
            psi.apply(&g, &mut rng);
        }
        let expected = OperatorExpr::embed(1, 0, Factor::Y).unwrap().apply(psi0.amplitudes());
        for (a, b) in psi.amplitudes().iter().zip(&expected) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn measurement_collapses_and_reset_clears() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut psi = random_state(2, 5);
        let first = psi.measure(1, &mut rng);
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(psi.measure(1, &mut rng), first);
        psi.reset(1, &mut rng);
        assert!(psi.probability_one(1) < 1e-15);
    }

    #[test]
    fn ancilla_embedding_round_trip() {
        let psi = random_state(2, 1);
        let ext = StateVector::with_ancillas(psi.amplitudes(), 1).unwrap();
        assert_eq!(ext.n_qubits(), 3);
        assert_eq!(ext.leading_register(1), psi.amplitudes());
    }
}
