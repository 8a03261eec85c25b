use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::model::{self, InitialStateKind, ModelConfig};
use crate::observables::ObservableKind;

fn staggered_cfg(n: usize) -> ModelConfig {
    ModelConfig { initial_state: InitialStateKind::StaggeredProduct, ..ModelConfig::with_sites(n) }
}

fn random_vector(len: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<C64> = (0..len).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

fn overlap(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm()
}

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// System register after the noiseless circuit, ancilla in |0⟩.
fn run_step(cfg: &ModelConfig, dt: f64, psi: &[C64]) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut s = StateVector::with_ancillas(psi, 1).unwrap();
    s.run(&trotter_step_circuit(cfg, dt).unwrap(), &mut rng).unwrap();
    s.leading_register(1)
}

fn measure_all(cfg: &ModelConfig, state: &mut StateVector, rng: &mut ChaCha8Rng) -> Vec<u8> {
    state.run(&measurement_layer(cfg).unwrap(), rng).unwrap().into_iter().map(|o| 2 * o).collect()
}

#[test]
fn step_uses_eight_cnots_per_site() {
    for n in 2..=4 {
        let seq = trotter_step_circuit(&ModelConfig::with_sites(n), 0.05).unwrap();
        assert_eq!(seq.cnot_count(), 8 * n);
        seq.validate().unwrap();
    }
}

#[test]
fn zero_time_step_is_identity() {
    let cfg = ModelConfig::with_sites(3);
    let psi = random_vector(cfg.dim(), 1);
    assert!(dist(&run_step(&cfg, 0.0, &psi), &psi) < 1e-12);
}

#[test]
fn trotter_defect_is_second_order() {
    // oracle: exp(−iH0 dt) from a dense eigendecomposition
    let cfg = ModelConfig::with_sites(3);
    let h0 = model::build_h0(&cfg).unwrap().to_dense();
    let defect = |dt: f64| {
        let u = crate::dense::unitary_propagator(&h0, dt).unwrap();
        (0..4)
            .map(|seed| {
                let psi = random_vector(cfg.dim(), seed);
                dist(&run_step(&cfg, dt, &psi), &crate::dense::mat_vec(&u, &psi))
            })
            .fold(0.0, f64::max)
    };
    let (d1, d2) = (defect(0.1), defect(0.05));
    assert!(d1 < 0.05);
    let ratio = d1 / d2;
    assert!((ratio - 4.0).abs() < 0.4, "defect ratio {ratio}");
}

#[test]
fn syndrome_circuit_shape() {
    let cfg = ModelConfig::with_sites(4);
    for j in 0..4 {
        let seq = syndrome_measurement_circuit(&cfg, j).unwrap();
        assert_eq!(seq.cnot_count(), 3);
        seq.validate().unwrap();
    }
    assert!(syndrome_measurement_circuit(&cfg, 4).is_err());
}

#[test]
fn physical_states_give_trivial_syndromes_without_disturbance() {
    for cfg in [staggered_cfg(3), ModelConfig::with_sites(3), staggered_cfg(4)] {
        let psi = model::initial_state_vector(&cfg).unwrap();
        for seed in 0..3 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = StateVector::with_ancillas(&psi, 1).unwrap();
            assert!(measure_all(&cfg, &mut s, &mut rng).iter().all(|&g| g == 0));
            assert!(dist(&s.leading_register(1), &psi) < 1e-12);
        }
    }
}

#[test]
fn matter_bit_flip_is_seen_on_its_own_site() {
    let cfg = staggered_cfg(4);
    let layout = cfg.layout().unwrap();
    let psi = model::initial_state_vector(&cfg).unwrap();
    for j in 0..4 {
        let mut rng = ChaCha8Rng::seed_from_u64(j as u64);
        let mut s = StateVector::with_ancillas(&psi, 1).unwrap();
        s.x(layout.matter(j));
        let syndromes = measure_all(&cfg, &mut s, &mut rng);
        let expected: Vec<u8> = (0..4).map(|k| if k == j { 2 } else { 0 }).collect();
        assert_eq!(syndromes, expected);
    }
}

#[test]
fn syndrome_measurement_is_repeatable() {
    let cfg = ModelConfig::with_sites(3);
    let layout = cfg.layout().unwrap();
    let psi = model::initial_state_vector(&cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut s = StateVector::with_ancillas(&psi, 1).unwrap();
    s.z(layout.link(1));
    let first = measure_all(&cfg, &mut s, &mut rng);
    let after_first = s.clone();
    let second = measure_all(&cfg, &mut s, &mut rng);
    assert_eq!(first, vec![0, 2, 2]);
    assert_eq!(first, second);
    assert!(dist(s.amplitudes(), after_first.amplitudes()) < 1e-12);
}

#[test]
fn decoder_examples() {
    let cfg4 = ModelConfig::with_sites(4);
    let l4 = cfg4.layout().unwrap();
    let fix = correction_feedback(&cfg4, &[0, 2, 0, 0]).unwrap();
    assert_eq!(fix.gates.gates(), &[Gate::X(l4.matter(1))]);
    assert!(fix.is_complete());

    let fix = correction_feedback(&cfg4, &[0, 2, 2, 0]).unwrap();
    assert_eq!(fix.gates.gates(), &[Gate::Z(l4.link(1))]);

    let cfg3 = ModelConfig::with_sites(3);
    let fix = correction_feedback(&cfg3, &[2, 2, 2]).unwrap();
    assert_eq!(fix.gates.gates(), &[Gate::Z(cfg3.layout().unwrap().link(0))]);
    assert_eq!(fix.residual, vec![0, 0, 2]);
    assert!(!fix.is_complete());

    // the wrap-around link joins the last and the first site
    let fix = correction_feedback(&cfg4, &[2, 0, 0, 2]).unwrap();
    assert_eq!(fix.gates.gates(), &[Gate::Z(l4.link(3))]);

    assert!(correction_feedback(&cfg4, &[0, 0, 0]).is_err());
    assert!(correction_feedback(&cfg4, &[0, 1, 0, 0]).is_err());
}

#[test]
fn one_feedback_round_removes_any_single_error() {
    let cfg = staggered_cfg(4);
    let obs = crate::observables::Observables::new(&cfg).unwrap();
    let psi = model::initial_state_vector(&cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for q in 0..cfg.layout().unwrap().n_qubits() {
        for flips in [vec![Flip::Bit], vec![Flip::Phase], vec![Flip::Bit, Flip::Phase]] {
            let mut s = StateVector::with_ancillas(&psi, 1).unwrap();
            for f in &flips {
                match f {
                    Flip::Bit => s.x(q),
                    Flip::Phase => s.z(q),
                }
            }
            let syndromes = measure_all(&cfg, &mut s, &mut rng);
            let fix = correction_feedback(&cfg, &syndromes).unwrap();
            assert!(fix.is_complete());
            s.run(&fix.gates, &mut rng).unwrap();
            let eps = obs.evaluate_vector(ObservableKind::Epsilon, &s.leading_register(1)).unwrap();
            assert!(eps.abs() < 1e-12, "qubit {q} {flips:?}");
            assert!(measure_all(&cfg, &mut s, &mut rng).iter().all(|&g| g == 0));
        }
    }
}

#[test]
fn cnot_budget_counts() {
    let b = cnot_budget(4, 1).unwrap();
    assert_eq!((b.per_step, b.per_measurement_layer), (32, 12));
    assert_eq!(b.overhead_ratio, num_rational::Ratio::new(11, 8));
    let b = cnot_budget(3, 1).unwrap();
    assert_eq!((b.per_step, b.per_measurement_layer), (24, 9));
    assert_eq!(b.overhead_ratio, num_rational::Ratio::new(11, 8));
    for n in 1..10 {
        assert_eq!(cnot_budget(4, n).unwrap().overhead_ratio, num_rational::Ratio::new(8 * n + 3, 8 * n));
    }
    assert!(cnot_budget(4, 0).is_err());
}

#[test]
fn error_probability_from_rate() {
    assert!((error_probability(0.01, 0.05) - 6.25e-5).abs() < 1e-18);
    assert_eq!(CircuitRunConfig::with_rate(0.01).p, error_probability(0.01, 0.05));
}

fn short_run(n_traj: usize, p: f64, corrections: bool) -> CircuitRunConfig {
    CircuitRunConfig { p, corrections, t_final: 2.0, sample_interval: 0.5, n_traj, seed: 7, ..CircuitRunConfig::default() }
}

#[test]
fn noiseless_trajectories_have_zero_spread() {
    let cfg = staggered_cfg(2);
    let run = short_run(4, 0.0, false);
    let rec = run_trajectories(&cfg, &run).unwrap();
    assert_eq!(rec.times, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    assert!(rec.std_errors.as_ref().unwrap().iter().flatten().all(|&e| e == 0.0));

    let obs = crate::observables::Observables::new(&cfg).unwrap();
    let mut psi = model::initial_state_vector(&cfg).unwrap();
    let ll = rec.series("link_link").unwrap();
    for (k, step) in (0..=40).enumerate().filter(|(_, s)| s % 10 == 0).map(|(_, s)| s).enumerate() {
        let _ = step;
        let expected = obs.evaluate_vector(ObservableKind::LinkLink, &psi).unwrap();
        assert_eq!(ll[k], expected);
        for _ in 0..10 {
            psi = run_step(&cfg, run.dt, &psi);
        }
    }
}

#[test]
fn trajectory_validation() {
    let cfg = staggered_cfg(2);
    assert!(matches!(run_trajectories(&cfg, &short_run(1, 0.0, false)), Err(crate::Error::TooFewTrajectories(1))));
    assert!(run_trajectories(&cfg, &short_run(4, 1.5, false)).is_err());
    let coherent = ModelConfig { lambda: 0.1, ..cfg.clone() };
    assert!(run_trajectories(&coherent, &short_run(4, 0.0, false)).is_err());
    let ragged = CircuitRunConfig { sample_interval: 0.33, ..short_run(4, 0.0, false) };
    assert!(run_trajectories(&cfg, &ragged).is_err());
}

#[test]
fn trajectories_are_deterministic_across_thread_counts() {
    let cfg = staggered_cfg(2);
    let run = short_run(16, 0.01, true);
    let a = run_trajectories(&cfg, &run).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| run_trajectories(&cfg, &run)).unwrap();
    assert_eq!(a, b);
    let other = run_trajectories(&cfg, &CircuitRunConfig { seed: 8, ..run }).unwrap();
    assert_ne!(a.values, other.values);
}

#[test]
fn standard_error_shrinks_with_trajectory_count() {
    let cfg = staggered_cfg(2);
    let se_at_end = |n| {
        let rec = run_trajectories(&cfg, &short_run(n, 0.02, false)).unwrap();
        *rec.std_error("link_link").unwrap().last().unwrap()
    };
    let ratio = se_at_end(100) / se_at_end(400);
    assert!((1.5..2.7).contains(&ratio), "ratio {ratio}");
}

#[test]
fn step_fault_frames_match_statevector_injection() {
    // with dt = 0 every gate is Clifford, so the propagated frame is exact
    let cfg = ModelConfig::with_sites(2);
    let step = trotter_step_circuit(&cfg, 0.0).unwrap();
    let psi = random_vector(cfg.dim(), 4);
    let ideal = run_step(&cfg, 0.0, &psi);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let gates = step.gates();
    let mut frames = effective::step_error_frames(&cfg, 0.0).unwrap().into_iter();
    for (k, gate) in gates.iter().enumerate() {
        let Gate::Cnot { control, target } = *gate else { continue };
        for fault in CnotFault::all() {
            let q = if fault.on_target { target } else { control };
            let mut s = StateVector::with_ancillas(&psi, 1).unwrap();
            let split = if fault.after { k + 1 } else { k };
            for g in &gates[..split] {
                s.apply(g, &mut rng);
            }
            match fault.flip {
                Flip::Bit => s.x(q),
                Flip::Phase => s.z(q),
            }
            for g in &gates[split..] {
                s.apply(g, &mut rng);
            }
            let frame = frames.next().unwrap();
            assert!(!frame.is_identity());
            let expected = frame.to_operator(4).unwrap().apply(&ideal);
            assert!((overlap(&expected, &s.leading_register(1)) - 1.0).abs() < 1e-12, "CNOT {k} {fault:?}");
        }
    }
    assert!(frames.next().is_none());
}

#[test]
fn effective_rates_sum_to_the_circuit_error_rate() {
    let cfg = staggered_cfg(4);
    let gamma = 0.01;
    let plain = CircuitRunConfig { corrections: false, ..CircuitRunConfig::with_rate(gamma) };
    let total: f64 = effective_noise_jumps(&cfg, &plain).unwrap().iter().map(|j| j.rate).sum();
    // one fault per CNOT, eight CNOTs per site and step, every placement visible
    assert!((total - gamma * 4.0).abs() < 1e-12, "{total}");

    let corrected = CircuitRunConfig::with_rate(gamma);
    let total: f64 = effective_noise_jumps(&cfg, &corrected).unwrap().iter().map(|j| j.rate).sum();
    let layer_max = 3.0 * 4.0 * corrected.p * corrected.correction_rate();
    assert!(total > gamma * 4.0 && total <= gamma * 4.0 + layer_max + 1e-12);
}

#[test]
fn measurement_layer_faults_match_injection() {
    let cfg = staggered_cfg(3);
    let layer = measurement_layer(&cfg).unwrap();
    let psi = model::initial_state_vector(&cfg).unwrap();
    let gates = layer.gates();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut frames = effective::layer_error_frames(&cfg).unwrap().into_iter();
    for (k, gate) in gates.iter().enumerate() {
        let Gate::Cnot { control, target } = *gate else { continue };
        for fault in CnotFault::all() {
            let q = if fault.on_target { target } else { control };
            let mut s = StateVector::with_ancillas(&psi, 1).unwrap();
            let split = if fault.after { k + 1 } else { k };
            let mut outcomes = Vec::new();
            for g in &gates[..split] {
                outcomes.extend(s.apply(g, &mut rng));
            }
            match fault.flip {
                Flip::Bit => s.x(q),
                Flip::Phase => s.z(q),
            }
            for g in &gates[split..] {
                outcomes.extend(s.apply(g, &mut rng));
            }
            let syndromes: Vec<u8> = outcomes.iter().map(|o| 2 * o).collect();
            s.run(&correction_feedback(&cfg, &syndromes).unwrap().gates, &mut rng).unwrap();
            let expected = frames.next().unwrap().to_operator(6).unwrap().apply(&psi);
            assert!((overlap(&expected, &s.leading_register(1)) - 1.0).abs() < 1e-12, "CNOT {k} {fault:?}");
        }
    }
    assert!(frames.next().is_none());
}
