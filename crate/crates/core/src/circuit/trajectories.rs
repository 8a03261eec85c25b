//! Monte Carlo average over noisy circuit trajectories.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::compile::{ancilla, correction_feedback, measurement_layer, trotter_step_circuit};
use super::gates::GateSequence;
use super::noise::run_noisy;
use super::statevector::StateVector;
use crate::error::{Error, Result};
use crate::model::{self, ModelConfig};
use crate::observables::{ObservableKind, Observables, TrajectoryRecord};
use crate::C64;

/// Norm drift tolerated along a trajectory.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircuitRunConfig {
    pub dt: f64,
    /// Error probability per CNOT.
    pub p: f64,
    /// Trotter steps between measurement layers.
    pub n_between: usize,
    pub corrections: bool,
    pub t_final: f64,
    /// Time between recorded samples; a multiple of `dt`.
    pub sample_interval: f64,
    pub n_traj: usize,
    pub seed: u64,
    pub observables: Vec<ObservableKind>,
}

impl Default for CircuitRunConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            p: 0.0,
            n_between: 4,
            corrections: true,
            t_final: 50.0,
            sample_interval: 1.0,
            n_traj: 400,
            seed: 0,
            observables: vec![ObservableKind::LinkLink, ObservableKind::Epsilon],
        }
    }
}

/// `p = γ·dt/8`: eight CNOTs per site and step.
pub fn error_probability(gamma: f64, dt: f64) -> f64 {
    gamma * dt / 8.0
}

fn steps_in(span: f64, dt: f64, what: &str) -> Result<usize> {
    let n = (span / dt).round();
    if (n * dt - span).abs() > 1e-9 * span.abs().max(1.0) {
        return Err(Error::InvalidConfig(format!("{what} {span} is not a multiple of dt = {dt}")));
    }
    Ok(n as usize)
}

impl CircuitRunConfig {
    /// Error probability from a per-site error rate.
    pub fn with_rate(gamma: f64) -> Self {
        let base = Self::default();
        Self { p: error_probability(gamma, base.dt), ..base }
    }

    /// Rate at which measurement layers occur.
    pub fn correction_rate(&self) -> f64 {
        if self.corrections {
            1.0 / (self.n_between as f64 * self.dt)
        } else {
            0.0
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidConfig(format!("p must lie in [0, 1], got {}", self.p)));
        }
        if self.n_between == 0 {
            return Err(Error::InvalidConfig("n_between must be at least 1".into()));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::InvalidConfig(format!("t_final must be non-negative, got {}", self.t_final)));
        }
        if !(self.sample_interval > 0.0) {
            return Err(Error::InvalidConfig("sample_interval must be positive".into()));
        }
        steps_in(self.sample_interval, self.dt, "sample_interval")?;
        steps_in(self.t_final, self.dt, "t_final")?;
        if self.n_traj < 2 {
            return Err(Error::TooFewTrajectories(self.n_traj));
        }
        if self.observables.is_empty() {
            return Err(Error::InvalidConfig("no observables requested".into()));
        }
        Ok(())
    }
}

struct Plan {
    step: GateSequence,
    layer: GateSequence,
    psi0: Vec<C64>,
    observables: Observables,
    kinds: Vec<ObservableKind>,
    n_steps: usize,
    sample_every: usize,
}

impl Plan {
    fn new(cfg: &ModelConfig, run: &CircuitRunConfig) -> Result<Self> {
        cfg.validate()?;
        run.validate()?;
        if cfg.lambda != 0.0 {
            return Err(Error::InvalidConfig("the circuit compiles only the gauge-invariant Hamiltonian; set lambda = 0".into()));
        }
        Ok(Self {
            step: trotter_step_circuit(cfg, run.dt)?,
            layer: measurement_layer(cfg)?,
            psi0: model::initial_state_vector(cfg)?,
            observables: Observables::new(cfg)?,
            kinds: run.observables.clone(),
            n_steps: steps_in(run.t_final, run.dt, "t_final")?,
            sample_every: steps_in(run.sample_interval, run.dt, "sample_interval")?.max(1),
        })
    }

    fn n_samples(&self) -> usize {
        self.n_steps / self.sample_every + 1
    }

    fn record(&self, state: &StateVector, out: &mut Vec<Vec<f64>>) -> Result<()> {
        let psi = state.leading_register(1);
        let row = self.kinds.iter().map(|&k| self.observables.evaluate_vector(k, &psi)).collect::<Result<_>>()?;
        out.push(row);
        Ok(())
    }

    /// Observable rows `[sample][observable]` of one trajectory.
    fn trajectory(&self, cfg: &ModelConfig, run: &CircuitRunConfig, index: u64) -> Result<Vec<Vec<f64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
        rng.set_stream(index);
        let mut state = StateVector::with_ancillas(&self.psi0, 1)?;
        let anc = ancilla(&cfg.layout()?);
        let mut rows = Vec::with_capacity(self.n_samples());
        self.record(&state, &mut rows)?;
        for step in 1..=self.n_steps {
            run_noisy(&mut state, &self.step, run.p, &mut rng)?;
            if run.corrections && step % run.n_between == 0 {
                if state.probability_one(anc) > NORM_TOL {
                    return Err(Error::InvalidState("ancilla not reset before syndrome measurement".into()));
                }
                let outcomes = run_noisy(&mut state, &self.layer, run.p, &mut rng)?;
                let syndromes: Vec<u8> = outcomes.iter().map(|&o| 2 * o).collect();
                let fix = correction_feedback(cfg, &syndromes)?;
                state.run(&fix.gates, &mut rng)?;
            }
            let drift = (state.norm_sqr() - 1.0).abs();
            if drift > NORM_TOL {
                return Err(Error::InvariantViolation { t: step as f64 * run.dt, what: format!("statevector norm drift {drift:.3e}") });
            }
            if step % self.sample_every == 0 {
                self.record(&state, &mut rows)?;
            }
        }
        Ok(rows)
    }
}

/// Mean and standard error over trajectories; `per_traj[t][s][k]`.
fn aggregate(per_traj: &[Vec<Vec<f64>>], n_kinds: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = per_traj.len() as f64;
    let n_samples = per_traj[0].len();
    let mut mean = vec![vec![0.0; n_samples]; n_kinds];
    let mut se = vec![vec![0.0; n_samples]; n_kinds];
    for s in 0..n_samples {
        for k in 0..n_kinds {
            // shifted by the first trajectory so identical samples give exactly zero spread
            let x0 = per_traj[0][s][k];
            let d: Vec<f64> = per_traj.iter().map(|t| t[s][k] - x0).collect();
            let dm = d.iter().sum::<f64>() / n;
            let var = d.iter().map(|v| (v - dm).powi(2)).sum::<f64>() / (n - 1.0);
            mean[k][s] = x0 + dm;
            se[k][s] = (var / n).sqrt();
        }
    }
    (mean, se)
}

/// Runs `run.n_traj` independent trajectories in parallel; the result does not
/// depend on scheduling.
pub fn run_trajectories(cfg: &ModelConfig, run: &CircuitRunConfig) -> Result<TrajectoryRecord> {
    let plan = Plan::new(cfg, run)?;
    let per_traj: Vec<Vec<Vec<f64>>> =
        (0..run.n_traj as u64).into_par_iter().map(|i| plan.trajectory(cfg, run, i)).collect::<Result<_>>()?;
    let (values, std_errors) = aggregate(&per_traj, plan.kinds.len());
    let times = (0..plan.n_samples()).map(|s| (s * plan.sample_every) as f64 * run.dt).collect();
    Ok(TrajectoryRecord {
        times,
        names: plan.kinds.iter().map(|k| k.name().to_string()).collect(),
        values,
        std_errors: Some(std_errors),
        config: Some(serde_json::json!({ "model": cfg, "circuit": run })),
        seed: Some(run.seed),
    })
}
