//! Lindblad master-equation engine: right-hand side, time evolution,
//! vectorized superoperator and steady states.

mod compensated;
mod generator;
mod integrator;
mod liouvillian;
mod steady;

pub use generator::{lindblad_rhs, Frame, LindbladGenerator};
pub use integrator::{Dopri5, StepStats, Tolerances};
pub use liouvillian::{build_liouvillian, Liouvillian, DENSE_MAX_DIM, MAX_SUPEROPERATOR_NNZ};
pub use steady::{residual, steady_state, steady_state_with, SteadyMethod, SteadyState, SteadyStateOptions};

use crate::error::{Error, Result};
use crate::model::JumpOperatorSet;
use crate::operator::{ComplexMatrix, DensityMatrix, OperatorExpr, ZERO};

/// Drift allowed in `Tr ρ` and in `max|ρ − ρ†|` at every output sample.
pub const DRIFT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum WorkingBasis {
    Computational,
    /// Pick per-qubit Hadamard rotations that make the operators sparser.
    #[default]
    Auto,
    Hadamard(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub tolerances: Tolerances,
    pub max_steps: u64,
    pub basis: WorkingBasis,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { tolerances: Tolerances::default(), max_steps: 50_000_000, basis: WorkingBasis::Auto }
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionProblem {
    pub hamiltonian: OperatorExpr,
    pub jumps: JumpOperatorSet,
    pub rho0: DensityMatrix,
    pub t0: f64,
    /// Output times, strictly increasing and not before `t0`.
    pub samples: Vec<f64>,
    pub options: IntegratorOptions,
}

impl EvolutionProblem {
    pub fn new(hamiltonian: OperatorExpr, jumps: JumpOperatorSet, rho0: DensityMatrix, samples: Vec<f64>) -> Self {
        Self { hamiltonian, jumps, rho0, t0: 0.0, samples, options: IntegratorOptions::default() }
    }

    /// Uniform samples `0, dt, 2dt, …` up to and including `t_final`.
    pub fn uniform_samples(t_final: f64, dt: f64) -> Vec<f64> {
        let n = (t_final / dt).round() as usize;
        (0..=n).map(|k| k as f64 * dt).collect()
    }

    pub fn validate(&self) -> Result<()> {
        generator::check_dims(&self.hamiltonian, &self.jumps)?;
        if self.rho0.dim() != self.hamiltonian.dim() {
            return Err(Error::DimensionMismatch { expected: self.hamiltonian.dim(), found: self.rho0.dim() });
        }
        if self.samples.is_empty() {
            return Err(Error::InvalidConfig("no output samples".into()));
        }
        if !self.samples.iter().all(|t| t.is_finite()) || self.samples[0] < self.t0 {
            return Err(Error::InvalidConfig("sample times must be finite and not precede t0".into()));
        }
        if self.samples.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("sample times must be strictly increasing".into()));
        }
        let t = self.options.tolerances;
        if !(t.rtol > 0.0 && t.atol > 0.0) {
            return Err(Error::InvalidConfig("integrator tolerances must be positive".into()));
        }
        Ok(())
    }

    fn generator(&self) -> Result<LindbladGenerator> {
        match &self.options.basis {
            WorkingBasis::Computational => LindbladGenerator::new(&self.hamiltonian, &self.jumps),
            WorkingBasis::Auto => LindbladGenerator::auto_frame(&self.hamiltonian, &self.jumps),
            WorkingBasis::Hadamard(qs) => {
                let frame = Frame::hadamard(self.hamiltonian.n_qubits(), qs.clone())?;
                LindbladGenerator::with_frame(&self.hamiltonian, &self.jumps, frame)
            }
        }
    }
}

/// Sampled states of an evolution.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub stats: StepStats,
}

/// Integrates and keeps every sampled state.
pub fn evolve(problem: &EvolutionProblem) -> Result<Evolution> {
    let mut times = Vec::with_capacity(problem.samples.len());
    let mut states = Vec::with_capacity(problem.samples.len());
    let stats = evolve_with(problem, |t, rho| {
        times.push(t);
        states.push(rho.clone());
        Ok(())
    })?;
    Ok(Evolution { times, states, stats })
}

/// Integrates and hands each sampled state to `observe` in sample order.
///
/// The trace and Hermiticity of the state are checked at every sample and the
/// run aborts if either drifts by more than [`DRIFT_TOL`]; the state is never
/// renormalized.
pub fn evolve_with<F>(problem: &EvolutionProblem, mut observe: F) -> Result<StepStats>
where
    F: FnMut(f64, &DensityMatrix) -> Result<()>,
{
    problem.validate()?;
    let gen = problem.generator()?;
    let d = gen.dim();
    let trace0 = problem.rho0.trace();
    let mut scratch = vec![ZERO; d * d];
    let rhs = |y: &[crate::C64], dy: &mut [crate::C64]| gen.apply(y, dy, &mut scratch);
    let y0 = gen.to_frame(problem.rho0.as_matrix().as_slice());
    let mut ode = Dopri5::new(rhs, problem.t0, y0, problem.options.tolerances, problem.options.max_steps);
    for &t in &problem.samples {
        ode.advance_to(t)?;
        let m = ComplexMatrix::from_vec(d, gen.from_frame(ode.state()))?;
        let drift = (m.trace() - trace0).norm();
        if drift > DRIFT_TOL {
            return Err(Error::InvariantViolation { t, what: format!("trace drift {drift:.3e}") });
        }
        let herm = m.hermiticity_defect();
        if herm > DRIFT_TOL {
            return Err(Error::InvariantViolation { t, what: format!("hermiticity drift {herm:.3e}") });
        }
        observe(t, &DensityMatrix::new_unchecked(m))?;
    }
    Ok(ode.stats())
}
