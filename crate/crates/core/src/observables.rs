//! Gauge violation, gauge-sector energy, correlators, running averages and
//! transition energies.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, GaugeProjectors, ModelConfig};
use crate::operator::{expectation, DensityMatrix, Factor, OperatorExpr};

/// Below this physical-sector weight the gauge-sector energy is undefined.
pub const SECTOR_WEIGHT_FLOOR: f64 = 1e-12;

/// Tolerance used to merge equal transition energies.
pub const TRANSITION_DEDUP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    /// Gauge violation `ε`.
    Epsilon,
    GaugeSectorEnergy,
    LinkLink,
    MatterMatter,
}

impl ObservableKind {
    pub const ALL: [ObservableKind; 4] = [
        ObservableKind::Epsilon,
        ObservableKind::GaugeSectorEnergy,
        ObservableKind::LinkLink,
        ObservableKind::MatterMatter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObservableKind::Epsilon => "epsilon",
            ObservableKind::GaugeSectorEnergy => "gauge_sector_energy",
            ObservableKind::LinkLink => "link_link",
            ObservableKind::MatterMatter => "matter_matter",
        }
    }
}

impl fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObservableKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown observable '{s}'")))
    }
}

/// Operators needed to evaluate every observable of one model instance.
#[derive(Clone, Debug)]
pub struct Observables {
    n_sites: usize,
    gauge: Vec<OperatorExpr>,
    gauge_sum: OperatorExpr,
    projector: OperatorExpr,
    projected_h0: OperatorExpr,
    link_link: OperatorExpr,
    matter_matter: OperatorExpr,
}

impl Observables {
    pub fn new(cfg: &ModelConfig) -> Result<Self> {
        let layout = cfg.layout()?;
        let nq = layout.n_qubits();
        let gauge = model::build_gauge_operators(cfg)?;
        let gauge_sum = gauge.iter().fold(OperatorExpr::zero(nq), |acc, g| &acc + g);
        let projector = GaugeProjectors::new(cfg)?.physical();
        let h0 = model::build_h0(cfg)?;
        let projected_h0 = &(&projector * &h0) * &projector;
        let pauli = |q, f| OperatorExpr::embed(nq, q, f);
        let mut link_link = OperatorExpr::zero(nq);
        let mut matter_matter = OperatorExpr::zero(nq);
        for j in 0..cfg.n_sites {
            let ll = &pauli(layout.link_left(j), Factor::X)? * &pauli(layout.link(j), Factor::X)?;
            link_link = &link_link + &ll;
            let mm = &pauli(layout.matter(j), Factor::Z)? * &pauli(layout.matter(j + 1), Factor::Z)?;
            matter_matter = &matter_matter + &mm;
        }
        Ok(Self {
            n_sites: cfg.n_sites,
            gauge,
            gauge_sum,
            projector,
            projected_h0,
            link_link: link_link.with_label("link_link"),
            matter_matter: matter_matter.with_label("matter_matter"),
        })
    }

    pub fn gauge_operators(&self) -> &[OperatorExpr] {
        &self.gauge
    }

    pub fn link_link_operator(&self) -> &OperatorExpr {
        &self.link_link
    }

    pub fn matter_matter_operator(&self) -> &OperatorExpr {
        &self.matter_matter
    }

    /// `Σ_j ⟨G_j⟩`
    pub fn gauge_sum(&self, rho: &DensityMatrix) -> f64 {
        real(&self.gauge_sum, rho)
    }

    /// `ε = (1/N) Σ_j ⟨G_j⟩`, for states that start in the physical sector.
    pub fn gauge_violation(&self, rho: &DensityMatrix) -> f64 {
        self.gauge_sum(rho) / self.n_sites as f64
    }

    /// `ε = (1/N) |Σ_j ⟨G_j⟩ − reference|` with `reference = Σ_j ⟨G_j(0)⟩`.
    pub fn gauge_violation_from(&self, rho: &DensityMatrix, reference: f64) -> f64 {
        (self.gauge_sum(rho) - reference).abs() / self.n_sites as f64
    }

    /// `Tr[P H0 P ρ] / Tr[P ρ]`; the gauge penalty never enters.
    pub fn gauge_sector_energy(&self, rho: &DensityMatrix) -> Result<f64> {
        let weight = real(&self.projector, rho);
        if weight < SECTOR_WEIGHT_FLOOR {
            return Err(Error::Undefined(format!("physical-sector weight {weight:.3e} is below {SECTOR_WEIGHT_FLOOR:e}")));
        }
        Ok(real(&self.projected_h0, rho) / weight)
    }

    /// `⟨Σ_j τˣ_{j−1,j} τˣ_{j,j+1}⟩`
    pub fn link_link(&self, rho: &DensityMatrix) -> f64 {
        real(&self.link_link, rho)
    }

    /// `⟨Σ_j σᶻ_j σᶻ_{j+1}⟩`
    pub fn matter_matter(&self, rho: &DensityMatrix) -> f64 {
        real(&self.matter_matter, rho)
    }

    pub fn evaluate(&self, kind: ObservableKind, rho: &DensityMatrix) -> Result<f64> {
        Ok(match kind {
            ObservableKind::Epsilon => self.gauge_violation(rho),
            ObservableKind::GaugeSectorEnergy => self.gauge_sector_energy(rho)?,
            ObservableKind::LinkLink => self.link_link(rho),
            ObservableKind::MatterMatter => self.matter_matter(rho),
        })
    }

    /// Observable values on a pure state of the system register.
    pub fn evaluate_vector(&self, kind: ObservableKind, psi: &[C64]) -> Result<f64> {
        if psi.len() != self.projector.dim() {
            return Err(Error::DimensionMismatch { expected: self.projector.dim(), found: psi.len() });
        }
        let ev = |op: &OperatorExpr| model::vector_expectation(op, psi).re;
        Ok(match kind {
            ObservableKind::Epsilon => ev(&self.gauge_sum) / self.n_sites as f64,
            ObservableKind::GaugeSectorEnergy => {
                let weight = ev(&self.projector);
                if weight < SECTOR_WEIGHT_FLOOR {
                    return Err(Error::Undefined(format!("physical-sector weight {weight:.3e}")));
                }
                ev(&self.projected_h0) / weight
            }
            ObservableKind::LinkLink => ev(&self.link_link),
            ObservableKind::MatterMatter => ev(&self.matter_matter),
        })
    }
}

fn real(op: &OperatorExpr, rho: &DensityMatrix) -> f64 {
    let v = expectation(op, rho).expect("observable and state share the register");
    debug_assert!(v.im.abs() < 1e-8, "Hermitian observable with imaginary part {}", v.im);
    v.re
}

pub fn gauge_violation(rho: &DensityMatrix, cfg: &ModelConfig) -> Result<f64> {
    Ok(Observables::new(cfg)?.gauge_violation(rho))
}

pub fn gauge_sector_energy(rho: &DensityMatrix, cfg: &ModelConfig) -> Result<f64> {
    Observables::new(cfg)?.gauge_sector_energy(rho)
}

pub fn link_link_correlator(rho: &DensityMatrix, cfg: &ModelConfig) -> Result<f64> {
    Ok(Observables::new(cfg)?.link_link(rho))
}

pub fn matter_matter_correlator(rho: &DensityMatrix, cfg: &ModelConfig) -> Result<f64> {
    Ok(Observables::new(cfg)?.matter_matter(rho))
}

/// Trailing running average with a flag marking samples whose window was truncated.
#[derive(Clone, Debug, PartialEq)]
pub struct RunningAverage {
    pub values: Vec<f64>,
    pub partial: Vec<bool>,
}

/// Causal mean of `values` over `[t − window, t]`, integrated with the
/// trapezoid rule and linear interpolation at the window start. Samples with
/// `t − window` before the first time average over the available span.
pub fn running_average(times: &[f64], values: &[f64], window: f64) -> Result<RunningAverage> {
    if times.is_empty() {
        return Err(Error::InvalidConfig("running average of an empty series".into()));
    }
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), found: values.len() });
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("time grid must be strictly increasing".into()));
    }
    if !(window > 0.0) {
        return Err(Error::InvalidConfig("window must be positive".into()));
    }
    // cumulative trapezoid integral
    let mut cum = vec![0.0; times.len()];
    for k in 1..times.len() {
        cum[k] = cum[k - 1] + 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);
    }
    let integral_to = |t: f64| -> f64 {
        // index of the last sample ≤ t
        let k = times.partition_point(|&s| s <= t).saturating_sub(1);
        if k + 1 >= times.len() {
            return cum[k];
        }
        let frac = (t - times[k]) / (times[k + 1] - times[k]);
        let v_t = values[k] + frac * (values[k + 1] - values[k]);
        cum[k] + 0.5 * (values[k] + v_t) * (t - times[k])
    };
    let t0 = times[0];
    let mut out = Vec::with_capacity(times.len());
    let mut partial = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let start = t - window;
        let truncated = start < t0 - 1e-12 * window;
        let lo = if truncated { t0 } else { start };
        let span = t - lo;
        out.push(if span <= 0.0 { values[k] } else { (cum[k] - integral_to(lo)) / span });
        partial.push(truncated);
    }
    Ok(RunningAverage { values: out, partial })
}

/// Positive differences between eigenvalues of `H0` in the physical sector,
/// sorted and merged within [`TRANSITION_DEDUP_TOL`].
pub fn h0_transition_energies(cfg: &ModelConfig) -> Result<Vec<f64>> {
    let spectrum = model::physical_spectrum(cfg)?;
    Ok(transition_energies(&spectrum))
}

pub(crate) fn transition_energies(spectrum: &[f64]) -> Vec<f64> {
    let mut diffs: Vec<f64> = Vec::new();
    for (a, &ea) in spectrum.iter().enumerate() {
        for &eb in &spectrum[a + 1..] {
            let d = (eb - ea).abs();
            if d > TRANSITION_DEDUP_TOL {
                diffs.push(d);
            }
        }
    }
    diffs.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<f64> = Vec::with_capacity(diffs.len());
    for d in diffs {
        if out.last().is_none_or(|&last| d - last > TRANSITION_DEDUP_TOL) {
            out.push(d);
        }
    }
    out
}

/// Time series of named observables, optionally with standard errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub names: Vec<String>,
    /// `values[k][i]` is observable `names[k]` at `times[i]`.
    pub values: Vec<Vec<f64>>,
    /// Same layout as `values` when present.
    pub std_errors: Option<Vec<Vec<f64>>>,
    pub config: Option<serde_json::Value>,
    pub seed: Option<u64>,
}

impl TrajectoryRecord {
    pub fn new(names: Vec<String>) -> Self {
        let n = names.len();
        Self { times: Vec::new(), names, values: vec![Vec::new(); n], std_errors: None, config: None, seed: None }
    }

    pub fn push(&mut self, t: f64, row: &[f64]) -> Result<()> {
        if row.len() != self.names.len() {
            return Err(Error::DimensionMismatch { expected: self.names.len(), found: row.len() });
        }
        if self.times.last().is_some_and(|&last| t <= last) {
            return Err(Error::InvalidConfig(format!("time {t} does not increase the grid")));
        }
        self.times.push(t);
        for (series, &v) in self.values.iter_mut().zip(row) {
            series.push(v);
        }
        Ok(())
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|k| self.values[k].as_slice())
    }

    pub fn std_error(&self, name: &str) -> Option<&[f64]> {
        let k = self.names.iter().position(|n| n == name)?;
        self.std_errors.as_ref().map(|e| e[k].as_slice())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Checks that every series matches the time grid.
    pub fn validate(&self) -> Result<()> {
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("time grid is not strictly increasing".into()));
        }
        let all = self.values.iter().chain(self.std_errors.iter().flatten());
        for s in all {
            if s.len() != self.times.len() {
                return Err(Error::DimensionMismatch { expected: self.times.len(), found: s.len() });
            }
        }
        Ok(())
    }
}

/// Physical-sector population `Tr[P ρ]`.
pub fn physical_weight(obs: &Observables, rho: &DensityMatrix) -> f64 {
    real(&obs.projector, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{InitialStateKind, SingleQubitError};
    use crate::operator::{ComplexMatrix, ZERO};
    use proptest::prelude::*;

    fn staggered(n: usize) -> (ModelConfig, DensityMatrix) {
        let cfg = ModelConfig { initial_state: InitialStateKind::StaggeredProduct, ..ModelConfig::with_sites(n) };
        let rho = model::initial_state(&cfg).unwrap();
        (cfg, rho)
    }

    #[test]
    fn violation_of_physical_and_mixed_states() {
        let (cfg, rho) = staggered(3);
        let obs = Observables::new(&cfg).unwrap();
        assert!(obs.gauge_violation(&rho).abs() < 1e-14);
        let mixed = DensityMatrix::maximally_mixed(64);
        assert!((obs.gauge_violation(&mixed) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_matter_flip_gives_half_violation() {
        // one G_j = 2 out of four sites: ε = 2/4
        let (cfg, _) = staggered(4);
        let layout = cfg.layout().unwrap();
        let psi = model::staggered_product_vector(&cfg).unwrap();
        let hit = OperatorExpr::embed(8, layout.matter(2), Factor::X).unwrap().apply(&psi);
        let rho = DensityMatrix::from_pure(&hit).unwrap();
        let eps = gauge_violation(&rho, &cfg).unwrap();
        assert!((eps - 0.5).abs() < 1e-14);
        let table = model::gauge_syndrome_table(&cfg).unwrap();
        let row = table.iter().find(|r| r.error == SingleQubitError::MatterBitFlip).unwrap();
        assert!((row.eigenvalues.iter().sum::<f64>() / 4.0 - eps).abs() < 1e-14);
    }

    #[test]
    fn violation_relative_to_reference_sector() {
        let (cfg, _) = staggered(2);
        let obs = Observables::new(&cfg).unwrap();
        let mixed = DensityMatrix::maximally_mixed(16);
        let reference = obs.gauge_sum(&mixed);
        assert!(obs.gauge_violation_from(&mixed, reference).abs() < 1e-14);
    }

    #[test]
    fn sector_energy_of_ground_state_matches_diagonalization() {
        let cfg = ModelConfig::with_sites(3);
        let ground = model::physical_ground_state(&cfg).unwrap();
        let rho = DensityMatrix::from_pure(&ground.vector).unwrap();
        // oracle: smallest eigenvalue of P H0 P restricted to eigenvalue-one states of P
        let p = GaugeProjectors::new(&cfg).unwrap().physical();
        let h0 = model::build_h0(&cfg).unwrap();
        let shifted = &(&(&p * &h0) * &p) + &(&OperatorExpr::identity(6) - &p).scale(50.0);
        let e0 = shifted.to_dense().hermitian_eigenvalues().unwrap()[0];
        let e = gauge_sector_energy(&rho, &cfg).unwrap();
        assert!((e - e0).abs() < 1e-10, "{e} vs {e0}");
    }

    #[test]
    fn sector_energy_of_product_state_is_plain_expectation() {
        let (cfg, rho) = staggered(3);
        let direct = expectation(&model::build_h0(&cfg).unwrap(), &rho).unwrap().re;
        assert!((gauge_sector_energy(&rho, &cfg).unwrap() - direct).abs() < 1e-12);
        assert!((direct - 0.54 * 3.0).abs() < 1e-12);
    }

    #[test]
    fn sector_energy_requires_physical_weight() {
        let (cfg, _) = staggered(2);
        let layout = cfg.layout().unwrap();
        let psi = model::staggered_product_vector(&cfg).unwrap();
        let hit = OperatorExpr::embed(4, layout.link(0), Factor::Z).unwrap().apply(&psi);
        let rho = DensityMatrix::from_pure(&hit).unwrap();
        assert!(matches!(gauge_sector_energy(&rho, &cfg), Err(Error::Undefined(_))));
    }

    #[test]
    fn sector_energy_ignores_the_penalty() {
        let base = ModelConfig { lambda: 0.1, gamma: 0.01, ..ModelConfig::with_sites(2) };
        let rho = DensityMatrix::maximally_mixed(16);
        let values: Vec<f64> = [0.0, 1.0, 5.0]
            .iter()
            .map(|&g| gauge_sector_energy(&rho, &ModelConfig { g, ..base.clone() }).unwrap())
            .collect();
        assert_eq!(values[0].to_bits(), values[1].to_bits());
        assert_eq!(values[0].to_bits(), values[2].to_bits());
    }

    #[test]
    fn correlators_on_reference_states() {
        let (cfg, rho) = staggered(4);
        assert!((link_link_correlator(&rho, &cfg).unwrap() - 4.0).abs() < 1e-12);
        assert!((matter_matter_correlator(&rho, &cfg).unwrap() + 4.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(256);
        assert!(link_link_correlator(&mixed, &cfg).unwrap().abs() < 1e-14);
        assert!(matter_matter_correlator(&mixed, &cfg).unwrap().abs() < 1e-14);
    }

    #[test]
    fn matter_correlator_is_gauge_invariant() {
        let (cfg, _) = staggered(3);
        let obs = Observables::new(&cfg).unwrap();
        for g in obs.gauge_operators() {
            assert_eq!(obs.matter_matter_operator().commutator(g).unwrap().max_abs(), 0.0);
            assert_eq!(obs.link_link_operator().commutator(g).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn vector_and_density_evaluations_agree() {
        let cfg = ModelConfig::with_sites(3);
        let obs = Observables::new(&cfg).unwrap();
        let ground = model::physical_ground_state(&cfg).unwrap();
        let rho = DensityMatrix::from_pure(&ground.vector).unwrap();
        for kind in ObservableKind::ALL {
            let a = obs.evaluate(kind, &rho).unwrap();
            let b = obs.evaluate_vector(kind, &ground.vector).unwrap();
            assert!((a - b).abs() < 1e-12, "{kind}");
        }
        assert!(obs.evaluate_vector(ObservableKind::LinkLink, &[ZERO; 4]).is_err());
    }

    #[test]
    fn observable_names_round_trip() {
        for kind in ObservableKind::ALL {
            assert_eq!(kind.name().parse::<ObservableKind>().unwrap(), kind);
        }
        assert!("energy".parse::<ObservableKind>().is_err());
    }

    #[test]
    fn running_average_of_constant_and_ramp() {
        let times: Vec<f64> = (0..=300).map(|k| k as f64 * 0.1).collect();
        let constant = running_average(&times, &vec![2.5; times.len()], 10.0).unwrap();
        assert!(constant.values.iter().all(|v| (v - 2.5).abs() < 1e-12));
        let ramp: Vec<f64> = times.iter().map(|t| 0.7 * t).collect();
        let avg = running_average(&times, &ramp, 10.0).unwrap();
        for (k, &t) in times.iter().enumerate() {
            if t >= 10.0 {
                assert!(!avg.partial[k]);
                assert!((avg.values[k] - 0.7 * (t - 5.0)).abs() < 1e-10, "t={t}");
            } else {
                assert!(avg.partial[k]);
            }
        }
    }

    #[test]
    fn running_average_interpolates_window_start_on_uneven_grid() {
        let times = [0.0, 1.0, 4.0, 7.5, 12.0, 13.0];
        let ramp: Vec<f64> = times.iter().map(|t| 3.0 * t - 1.0).collect();
        let avg = running_average(&times, &ramp, 10.0).unwrap();
        // full windows at t = 12 and 13: mean of 3t − 1 over [t−10, t] is 3(t − 5) − 1
        assert!((avg.values[4] - (3.0 * 7.0 - 1.0)).abs() < 1e-12);
        assert!((avg.values[5] - (3.0 * 8.0 - 1.0)).abs() < 1e-12);
        assert_eq!(avg.partial, vec![true, true, true, true, false, false]);
        assert_eq!(avg.values[0], ramp[0]);
    }

    #[test]
    fn running_average_suppresses_fast_alternation() {
        let times: Vec<f64> = (0..400).map(|k| k as f64 * 0.1).collect();
        let alt: Vec<f64> = (0..400).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let avg = running_average(&times, &alt, 10.0).unwrap();
        // oracle: direct trapezoid sum of the 101 samples in the last window
        let direct: f64 = (299..399).map(|k| 0.5 * (alt[k] + alt[k + 1]) * 0.1).sum::<f64>() / 10.0;
        assert!((avg.values[399] - direct).abs() < 1e-12);
        for (v, p) in avg.values.iter().zip(&avg.partial) {
            if !p {
                assert!(v.abs() < 0.2);
            }
        }
    }

    #[test]
    fn running_average_rejects_bad_input() {
        assert!(running_average(&[], &[], 10.0).is_err());
        assert!(running_average(&[0.0, 1.0], &[1.0], 10.0).is_err());
        assert!(running_average(&[1.0, 0.0], &[1.0, 1.0], 10.0).is_err());
    }

    #[test]
    fn transitions_without_hopping_include_twice_the_field_energy() {
        let cfg = ModelConfig { j_a: 0.0, ..ModelConfig::with_sites(2) };
        let lines = h0_transition_energies(&cfg).unwrap();
        assert!(lines.iter().any(|&e| (e - 1.08).abs() < 1e-9));
        // with J_a = 0 the physical spectrum is {−2J_f, 0, 0, 2J_f}
        assert_eq!(lines.len(), 2);
        assert!((lines[1] - 2.16).abs() < 1e-9);
    }

    #[test]
    fn transitions_match_brute_force_differences() {
        let cfg = ModelConfig::with_sites(3);
        let lines = h0_transition_energies(&cfg).unwrap();
        assert!(lines.windows(2).all(|w| w[1] - w[0] > TRANSITION_DEDUP_TOL));
        assert!(lines.iter().all(|&e| e > 0.0));
        // oracle: eigenvalues of the shifted projected Hamiltonian below the shift
        let p = GaugeProjectors::new(&cfg).unwrap().physical();
        let h0 = model::build_h0(&cfg).unwrap();
        let shifted = &(&(&p * &h0) * &p) + &(&OperatorExpr::identity(6) - &p).scale(50.0);
        let spectrum: Vec<f64> =
            shifted.to_dense().hermitian_eigenvalues().unwrap().into_iter().filter(|&e| e < 25.0).collect();
        assert_eq!(spectrum.len(), 8);
        for (a, &ea) in spectrum.iter().enumerate() {
            for &eb in &spectrum[a + 1..] {
                let d = eb - ea;
                if d > 1e-8 {
                    assert!(lines.iter().any(|&l| (l - d).abs() < 1e-8), "missing {d}");
                }
            }
        }
        for &l in &lines {
            let found = spectrum.iter().any(|&ea| spectrum.iter().any(|&eb| (eb - ea - l).abs() < 1e-8));
            assert!(found, "spurious {l}");
        }
    }

    #[test]
    fn trajectory_record_contract() {
        let mut rec = TrajectoryRecord::new(vec!["a".into(), "b".into()]);
        rec.push(0.0, &[1.0, 2.0]).unwrap();
        rec.push(0.5, &[3.0, 4.0]).unwrap();
        assert!(rec.push(0.5, &[0.0, 0.0]).is_err());
        assert!(rec.push(1.0, &[0.0]).is_err());
        assert_eq!(rec.series("b").unwrap(), &[2.0, 4.0]);
        assert!(rec.series("c").is_none());
        rec.validate().unwrap();
    }

    proptest! {
        #[test]
        fn observables_of_mixtures_are_real_and_bounded(weights in proptest::collection::vec(0.0f64..1.0, 4)) {
            let cfg = ModelConfig::with_sites(2);
            let obs = Observables::new(&cfg).unwrap();
            let total: f64 = weights.iter().sum::<f64>() + 1e-9;
            let m = ComplexMatrix::from_fn(16, |r, c| {
                if r == c { C64::new(weights[r % 4] / total / 4.0, 0.0) } else { ZERO }
            });
            let tr = m.trace();
            let rho = DensityMatrix::new(m.scale(C64::new(1.0, 0.0) / tr)).unwrap();
            let eps = obs.gauge_violation(&rho);
            prop_assert!((-1e-12..=2.0 + 1e-12).contains(&eps));
            let v = expectation(obs.link_link_operator(), &rho).unwrap();
            prop_assert!(v.im.abs() < 1e-10);
        }
    }
}
