//! Operators of the Z2 gauge model: the gauge-invariant Hamiltonian, the
//! gauge-variant perturbation, Gauss-law operators and their projectors,
//! noise and correction jump operators, and initial states.
//!
//! Sites are 0-based. The staggering sign of the Gauss-law operator on site
//! `j` is `(−1)^(j+1)`, i.e. the 1-based convention `(−1)^j` shifted by one.

use std::fmt;

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dense;
use crate::error::{Error, Result};
use crate::operator::{ComplexMatrix, DensityMatrix, Factor, OperatorExpr, RegisterLayout, ZERO};

/// Largest supported number of matter sites.
pub const MAX_SITES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Bit flips and phase flips on every qubit.
    BitflipPhaseflipAll,
    /// Spontaneous emission `σ⁻` on every qubit.
    SpontaneousAll,
    /// Bit flips on matter qubits and phase flips on link qubits only.
    GaugeVariantOnly,
    None,
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NoiseKind::BitflipPhaseflipAll => "bitflip_phaseflip_all",
            NoiseKind::SpontaneousAll => "spontaneous_all",
            NoiseKind::GaugeVariantOnly => "gauge_variant_only",
            NoiseKind::None => "none",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStateKind {
    /// Ground state of `H0` inside the physical sector.
    Ground,
    /// All links in `τˣ = +1`, matter occupations fixed by Gauss's law.
    StaggeredProduct,
}

/// Physical and noise parameters of one model instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub n_sites: usize,
    /// Matter–field coupling.
    pub j_a: f64,
    /// Electric field energy.
    pub j_f: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// Strength of the gauge-variant perturbation.
    pub lambda: f64,
    /// Gauge penalty.
    pub g: f64,
    /// Incoherent error rate.
    pub gamma: f64,
    /// Correction rate.
    pub gamma_c: f64,
    pub noise: NoiseKind,
    pub initial_state: InitialStateKind,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            n_sites: 3,
            j_a: 1.0,
            j_f: 0.54,
            c1: 0.51,
            c2: -0.49,
            c3: 0.77,
            c4: 0.21,
            lambda: 0.0,
            g: 1.0,
            gamma: 0.0,
            gamma_c: 0.0,
            noise: NoiseKind::BitflipPhaseflipAll,
            initial_state: InitialStateKind::Ground,
        }
    }
}

impl ModelConfig {
    pub fn with_sites(n_sites: usize) -> Self {
        Self { n_sites, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidConfig(format!("n_sites must be at least 2, got {}", self.n_sites)));
        }
        if self.n_sites > MAX_SITES {
            return Err(Error::ResourceLimit(format!(
                "n_sites = {} exceeds the supported maximum of {MAX_SITES}",
                self.n_sites
            )));
        }
        let named = [
            ("j_a", self.j_a),
            ("j_f", self.j_f),
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("c4", self.c4),
            ("lambda", self.lambda),
            ("g", self.g),
            ("gamma", self.gamma),
            ("gamma_c", self.gamma_c),
        ];
        for (name, v) in named {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite")));
            }
        }
        if self.gamma < 0.0 || self.gamma_c < 0.0 {
            return Err(Error::InvalidConfig("rates must be non-negative".into()));
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<RegisterLayout> {
        self.validate()?;
        RegisterLayout::new(self.n_sites)
    }

    pub fn dim(&self) -> usize {
        1 << (2 * self.n_sites)
    }
}

/// Staggering sign of the Gauss-law operator on 0-based site `j`.
#[inline]
pub fn gauge_sign(j: usize) -> f64 {
    if j % 2 == 0 {
        -1.0
    } else {
        1.0
    }
}

fn pauli(layout: &RegisterLayout, qubit: usize, f: Factor) -> OperatorExpr {
    OperatorExpr::embed(layout.n_qubits(), qubit, f).expect("qubit from layout is in range")
}

fn product(factors: &[&OperatorExpr]) -> OperatorExpr {
    let (first, rest) = factors.split_first().expect("non-empty product");
    rest.iter().fold((*first).clone(), |acc, f| &acc * f)
}

fn sum(n_qubits: usize, terms: impl IntoIterator<Item = OperatorExpr>) -> OperatorExpr {
    terms.into_iter().fold(OperatorExpr::zero(n_qubits), |acc, t| &acc + &t)
}

/// `H0 = Σ_j [J_a(σ⁺_j τᶻ_{j,j+1} σ⁻_{j+1} + h.c.) − J_f τˣ_{j,j+1}]`, periodic.
pub fn build_h0(cfg: &ModelConfig) -> Result<OperatorExpr> {
    let layout = cfg.layout()?;
    let n = cfg.n_sites;
    let terms = (0..n).map(|j| {
        let hop = product(&[
            &pauli(&layout, layout.matter(j), Factor::Plus),
            &pauli(&layout, layout.link(j), Factor::Z),
            &pauli(&layout, layout.matter(j + 1), Factor::Minus),
        ]);
        let hop = &hop + &hop.adjoint();
        let field = pauli(&layout, layout.link(j), Factor::X);
        &hop.scale(cfg.j_a) - &field.scale(cfg.j_f)
    });
    Ok(sum(layout.n_qubits(), terms).with_label("H0"))
}

/// `G_j = 1 − (−1)^(j+1) τˣ_{j−1,j} σᶻ_j τˣ_{j,j+1}` for 0-based `j`; spectrum `{0, 2}`.
pub fn build_gauge_operator(cfg: &ModelConfig, j: usize) -> Result<OperatorExpr> {
    let layout = cfg.layout()?;
    if j >= cfg.n_sites {
        return Err(Error::SiteOutOfRange { site: j, n_sites: cfg.n_sites });
    }
    Ok(gauge_operator(&layout, j))
}

fn gauge_operator(layout: &RegisterLayout, j: usize) -> OperatorExpr {
    let string = product(&[
        &pauli(layout, layout.link_left(j), Factor::X),
        &pauli(layout, layout.matter(j), Factor::Z),
        &pauli(layout, layout.link(j), Factor::X),
    ]);
    (&OperatorExpr::identity(layout.n_qubits()) - &string.scale(gauge_sign(j))).with_label(format!("G{j}"))
}

pub fn build_gauge_operators(cfg: &ModelConfig) -> Result<Vec<OperatorExpr>> {
    let layout = cfg.layout()?;
    Ok((0..cfg.n_sites).map(|j| gauge_operator(&layout, j)).collect())
}

/// Projectors `(P⁰_j, P²_j)` onto the `G_j = 0` and `G_j = 2` eigenspaces.
#[derive(Clone, Debug)]
pub struct GaugeProjectors {
    pub p0: Vec<OperatorExpr>,
    pub p2: Vec<OperatorExpr>,
}

impl GaugeProjectors {
    pub fn new(cfg: &ModelConfig) -> Result<Self> {
        let gauge = build_gauge_operators(cfg)?;
        let id = OperatorExpr::identity(2 * cfg.n_sites);
        let p2: Vec<OperatorExpr> = gauge.iter().map(|g| g.scale(0.5)).collect();
        let p0 = p2.iter().map(|p| &id - p).collect();
        Ok(Self { p0, p2 })
    }

    /// `P = Π_j P⁰_j`, the projector onto the physical sector.
    pub fn physical(&self) -> OperatorExpr {
        product(&self.p0.iter().collect::<Vec<_>>()).with_label("P")
    }
}

/// The gauge-variant perturbation
/// `H1 = Σ_j [σ⁺_j (c1 τ⁻ + c2 τ⁺) σ⁻_{j+1} + h.c.] + Σ_j σ⁺_jσ⁻_j (c3 τᶻ_{j,j+1} + c4 τᶻ_{j−1,j})`.
///
/// `τ± = (τᶻ ∓ iτʸ)/2` are ladder operators of the electric field, i.e. in the
/// `τˣ` eigenbasis.
pub fn build_h1(cfg: &ModelConfig) -> Result<OperatorExpr> {
    let layout = cfg.layout()?;
    let nq = layout.n_qubits();
    let n = cfg.n_sites;
    let mut terms = Vec::with_capacity(2 * n);
    for j in 0..n {
        let link = layout.link(j);
        let tz = pauli(&layout, link, Factor::Z);
        let ty = pauli(&layout, link, Factor::Y);
        let tau_plus = (&tz - &ty.scale(C64::new(0.0, 1.0))).scale(0.5);
        let tau_minus = (&tz + &ty.scale(C64::new(0.0, 1.0))).scale(0.5);
        let mixed = &tau_minus.scale(cfg.c1) + &tau_plus.scale(cfg.c2);
        let hop = product(&[
            &pauli(&layout, layout.matter(j), Factor::Plus),
            &mixed,
            &pauli(&layout, layout.matter(j + 1), Factor::Minus),
        ]);
        terms.push(&hop + &hop.adjoint());

        let occupation = product(&[
            &pauli(&layout, layout.matter(j), Factor::Plus),
            &pauli(&layout, layout.matter(j), Factor::Minus),
        ]);
        let fields = &tz.scale(cfg.c3) + &pauli(&layout, layout.link_left(j), Factor::Z).scale(cfg.c4);
        terms.push(&occupation * &fields);
    }
    Ok(sum(nq, terms).with_label("H1"))
}

/// `(g/N) Σ_j G_j`
pub fn build_penalty(cfg: &ModelConfig) -> Result<OperatorExpr> {
    let gauge = build_gauge_operators(cfg)?;
    Ok(sum(2 * cfg.n_sites, gauge).scale(cfg.g / cfg.n_sites as f64).with_label("penalty"))
}

/// `H0 + λ H1 + (g/N) Σ_j G_j`; each optional term is included only when its
/// coefficient is non-zero.
pub fn build_full_hamiltonian(cfg: &ModelConfig) -> Result<OperatorExpr> {
    let mut h = build_h0(cfg)?;
    if cfg.lambda != 0.0 {
        h = &h + &build_h1(cfg)?.scale(cfg.lambda);
    }
    if cfg.g != 0.0 {
        h = &h + &build_penalty(cfg)?;
    }
    Ok(h.with_label("H"))
}

/// A jump operator, already multiplied by the square root of its rate.
#[derive(Clone, Debug)]
pub struct JumpOperator {
    pub op: OperatorExpr,
    pub rate: f64,
    pub label: String,
    /// `op` before scaling, when it was built as `√rate · unscaled`.
    pub unscaled: Option<OperatorExpr>,
}

impl JumpOperator {
    /// `(B, w)` with `op = √w · B`.
    pub fn factors(&self) -> (&OperatorExpr, f64) {
        match &self.unscaled {
            Some(b) => (b, self.rate),
            None => (&self.op, 1.0),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct JumpOperatorSet {
    ops: Vec<JumpOperator>,
}

impl JumpOperatorSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, op: JumpOperator) {
        self.ops.push(op);
    }

    /// Adds `√rate · op`.
    pub fn push_scaled(&mut self, unscaled: &OperatorExpr, rate: f64, label: impl Into<String>) {
        self.ops.push(JumpOperator {
            op: unscaled.scale(rate.sqrt()),
            rate,
            label: label.into(),
            unscaled: Some(unscaled.clone()),
        });
    }

    pub fn extend(&mut self, other: JumpOperatorSet) {
        self.ops.extend(other.ops);
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &JumpOperator> {
        self.ops.iter()
    }

    pub fn operators(&self) -> impl Iterator<Item = &OperatorExpr> {
        self.ops.iter().map(|j| &j.op)
    }

    /// Checks `‖L†L‖₂ = rate` for every operator (dense eigensolve; small registers only).
    pub fn verify_rates(&self, tol: f64) -> Result<()> {
        for j in &self.ops {
            let ldl = (&j.op.adjoint() * &j.op).to_dense();
            let top = *ldl.hermitian_eigenvalues()?.last().unwrap_or(&0.0);
            if (top - j.rate).abs() > tol * j.rate.max(1.0) {
                return Err(Error::InvalidConfig(format!(
                    "jump {} has ‖L†L‖ = {top}, declared rate {}",
                    j.label, j.rate
                )));
            }
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a JumpOperatorSet {
    type Item = &'a JumpOperator;
    type IntoIter = std::slice::Iter<'a, JumpOperator>;
    fn into_iter(self) -> Self::IntoIter {
        self.ops.iter()
    }
}

/// Incoherent error channels selected by `cfg.noise` at rate `cfg.gamma`.
/// Empty when `gamma = 0`.
pub fn build_noise_jumps(cfg: &ModelConfig) -> Result<JumpOperatorSet> {
    let layout = cfg.layout()?;
    let mut set = JumpOperatorSet::new();
    if cfg.gamma == 0.0 {
        return Ok(set);
    }
    let g = cfg.gamma;
    let name = |q: usize| if q % 2 == 0 { format!("m{}", q / 2) } else { format!("l{}", q / 2) };
    match cfg.noise {
        NoiseKind::BitflipPhaseflipAll => {
            for q in 0..layout.n_qubits() {
                set.push_scaled(&pauli(&layout, q, Factor::X), g, format!("X[{}]", name(q)));
                set.push_scaled(&pauli(&layout, q, Factor::Z), g, format!("Z[{}]", name(q)));
            }
        }
        NoiseKind::SpontaneousAll => {
            for q in 0..layout.n_qubits() {
                set.push_scaled(&pauli(&layout, q, Factor::Minus), g, format!("sm[{}]", name(q)));
            }
        }
        NoiseKind::GaugeVariantOnly => {
            for j in 0..cfg.n_sites {
                set.push_scaled(&pauli(&layout, layout.matter(j), Factor::X), g, format!("X[m{j}]"));
                set.push_scaled(&pauli(&layout, layout.link(j), Factor::Z), g, format!("Z[l{j}]"));
            }
        }
        NoiseKind::None => {}
    }
    Ok(set)
}

/// Correction jumps `Cˣ_j = √γ_c σˣ_j P⁰_{j−1} P²_j P⁰_{j+1}` and
/// `Cᶻ_j = √γ_c τᶻ_{j,j+1} P²_j P²_{j+1}`; empty when `γ_c = 0`.
pub fn build_correction_jumps(cfg: &ModelConfig) -> Result<JumpOperatorSet> {
    let layout = cfg.layout()?;
    let mut set = JumpOperatorSet::new();
    if cfg.gamma_c == 0.0 {
        return Ok(set);
    }
    let n = cfg.n_sites;
    let proj = GaugeProjectors::new(cfg)?;
    for j in 0..n {
        let left = (j + n - 1) % n;
        let right = (j + 1) % n;
        let cx = product(&[
            &pauli(&layout, layout.matter(j), Factor::X),
            &proj.p0[left],
            &proj.p2[j],
            &proj.p0[right],
        ]);
        set.push_scaled(&cx, cfg.gamma_c, format!("Cx[{j}]"));
    }
    for j in 0..n {
        let right = (j + 1) % n;
        let cz = product(&[&pauli(&layout, layout.link(j), Factor::Z), &proj.p2[j], &proj.p2[right]]);
        set.push_scaled(&cz, cfg.gamma_c, format!("Cz[{j}]"));
    }
    Ok(set)
}

/// Noise and correction jumps together.
pub fn build_all_jumps(cfg: &ModelConfig) -> Result<JumpOperatorSet> {
    let mut set = build_noise_jumps(cfg)?;
    set.extend(build_correction_jumps(cfg)?);
    Ok(set)
}

/// Single-qubit errors distinguished by the gauge syndrome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SingleQubitError {
    /// `σˣ_j`
    MatterBitFlip,
    /// `σᶻ_j`
    MatterPhaseFlip,
    /// `τˣ_{j,j+1}`
    LinkBitFlip,
    /// `τᶻ_{j,j+1}`
    LinkPhaseFlip,
}

impl SingleQubitError {
    pub const ALL: [SingleQubitError; 4] = [
        SingleQubitError::MatterBitFlip,
        SingleQubitError::MatterPhaseFlip,
        SingleQubitError::LinkBitFlip,
        SingleQubitError::LinkPhaseFlip,
    ];

    pub fn is_gauge_variant(self) -> bool {
        matches!(self, SingleQubitError::MatterBitFlip | SingleQubitError::LinkPhaseFlip)
    }

    fn placement(self, layout: &RegisterLayout, j: usize) -> (usize, Factor) {
        match self {
            SingleQubitError::MatterBitFlip => (layout.matter(j), Factor::X),
            SingleQubitError::MatterPhaseFlip => (layout.matter(j), Factor::Z),
            SingleQubitError::LinkBitFlip => (layout.link(j), Factor::X),
            SingleQubitError::LinkPhaseFlip => (layout.link(j), Factor::Z),
        }
    }
}

/// One row of the syndrome table: `(⟨G_{j−1}⟩, ⟨G_j⟩, ⟨G_{j+1}⟩)` after the error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyndromeRow {
    pub error: SingleQubitError,
    pub eigenvalues: [f64; 3],
}

/// Applies each single-qubit error to site `j = 1` (link `(1, 2)`) of the
/// staggered physical state and measures the three neighbouring gauge operators.
pub fn gauge_syndrome_table(cfg: &ModelConfig) -> Result<Vec<SyndromeRow>> {
    let layout = cfg.layout()?;
    let n = cfg.n_sites;
    let gauge = build_gauge_operators(cfg)?;
    let psi = staggered_product_vector(cfg)?;
    let j = 1 % n;
    let sites = [(j + n - 1) % n, j, (j + 1) % n];
    SingleQubitError::ALL
        .iter()
        .map(|&error| {
            let (q, f) = error.placement(&layout, j);
            let hit = pauli(&layout, q, f).apply(&psi);
            let mut eigenvalues = [0.0; 3];
            for (slot, &s) in eigenvalues.iter_mut().zip(&sites) {
                *slot = vector_expectation(&gauge[s], &hit).re;
            }
            Ok(SyndromeRow { error, eigenvalues })
        })
        .collect()
}

/// `⟨ψ|A|ψ⟩`
pub fn vector_expectation(op: &OperatorExpr, psi: &[C64]) -> C64 {
    let a_psi = op.apply(psi);
    psi.iter().zip(&a_psi).map(|(a, b)| a.conj() * b).sum()
}

/// Product state with every link in `τˣ = −1` and matter site `j` in the
/// `σᶻ = (−1)^(j+1)` eigenstate, so that `G_j = 0` on every site. The field
/// energy `+J_f·N` is the top of the `J_a = 0` spectrum.
pub fn staggered_product_vector(cfg: &ModelConfig) -> Result<Vec<C64>> {
    let layout = cfg.layout()?;
    let nq = layout.n_qubits();
    let amp = (0.5f64).powf(cfg.n_sites as f64 / 2.0);
    let mut matter_bits = 0usize;
    let mut matter_mask = 0usize;
    let mut link_mask = 0usize;
    for j in 0..cfg.n_sites {
        let shift = nq - 1 - layout.matter(j);
        matter_mask |= 1 << shift;
        // σᶻ = +1 is bit 0, σᶻ = −1 is bit 1
        if gauge_sign(j) < 0.0 {
            matter_bits |= 1 << shift;
        }
        link_mask |= 1 << (nq - 1 - layout.link(j));
    }
    Ok((0..layout.dim())
        .map(|x| {
            if x & matter_mask != matter_bits {
                ZERO
            } else if (x & link_mask).count_ones() % 2 == 1 {
                C64::new(-amp, 0.0)
            } else {
                C64::new(amp, 0.0)
            }
        })
        .collect())
}

/// Orthonormal basis of the physical sector as the columns of a `d × 2^N` matrix.
pub fn physical_sector_basis(cfg: &ModelConfig) -> Result<Mat<C64>> {
    let p = GaugeProjectors::new(cfg)?.physical().to_dense();
    let (vals, vecs) = dense::eigh(&p)?;
    let cols: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > 0.5).collect();
    let expected = 1 << cfg.n_sites;
    if cols.len() != expected {
        return Err(Error::LinAlg(format!("physical sector has dimension {}, expected {expected}", cols.len())));
    }
    Ok(Mat::from_fn(p.dim(), cols.len(), |r, k| vecs[(r, cols[k])]))
}

/// Spectrum of `H0` restricted to the physical sector, ascending.
pub fn physical_spectrum(cfg: &ModelConfig) -> Result<Vec<f64>> {
    let (vals, _) = restricted_h0(cfg)?;
    Ok(vals)
}

fn restricted_h0(cfg: &ModelConfig) -> Result<(Vec<f64>, Mat<C64>)> {
    let basis = physical_sector_basis(cfg)?;
    let h0 = build_h0(cfg)?.to_dense().to_faer();
    let restricted = basis.adjoint() * &h0 * &basis;
    let (vals, vecs) = dense::eigh_faer(&restricted)?;
    Ok((vals, &basis * &vecs))
}

/// Ground state of `H0` in the physical sector.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub vector: Vec<C64>,
    /// Number of eigenvalues within `1e−9` of the lowest one.
    pub multiplicity: usize,
}

/// Degeneracy window for the ground-state tie-break.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Lowest eigenvector of `H0` inside the physical sector. A degenerate ground
/// space is resolved by projecting the staggered product state onto it.
pub fn physical_ground_state(cfg: &ModelConfig) -> Result<GroundState> {
    let (vals, vecs) = restricted_h0(cfg)?;
    let d = vecs.nrows();
    let e0 = vals[0];
    let multiplicity = vals.iter().take_while(|&&e| e - e0 < DEGENERACY_TOL).count();
    let column = |k: usize| -> Vec<C64> { (0..d).map(|r| vecs[(r, k)]).collect() };
    let mut vector = column(0);
    if multiplicity > 1 {
        log::warn!("physical ground state of H0 is {multiplicity}-fold degenerate; using the staggered-state projection");
        let reference = staggered_product_vector(cfg)?;
        let mut proj = vec![ZERO; d];
        for k in 0..multiplicity {
            let v = column(k);
            let overlap: C64 = v.iter().zip(&reference).map(|(a, b)| a.conj() * b).sum();
            for (p, a) in proj.iter_mut().zip(&v) {
                *p += a * overlap;
            }
        }
        let norm = proj.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            vector = proj.into_iter().map(|a| a / norm).collect();
        }
    }
    fix_phase(&mut vector);
    Ok(GroundState { energy: e0, vector, multiplicity })
}

/// Makes the largest-magnitude amplitude real and positive.
fn fix_phase(v: &mut [C64]) {
    let pivot = v
        .iter()
        .enumerate()
        .fold((0, 0.0), |(bi, bm), (i, a)| if a.norm() > bm + 1e-12 { (i, a.norm()) } else { (bi, bm) })
        .0;
    let phase = v[pivot].conj() / v[pivot].norm();
    v.iter_mut().for_each(|a| *a *= phase);
}

/// Pure initial state vector selected by `cfg.initial_state`.
pub fn initial_state_vector(cfg: &ModelConfig) -> Result<Vec<C64>> {
    match cfg.initial_state {
        InitialStateKind::Ground => Ok(physical_ground_state(cfg)?.vector),
        InitialStateKind::StaggeredProduct => staggered_product_vector(cfg),
    }
}

pub fn initial_state(cfg: &ModelConfig) -> Result<DensityMatrix> {
    DensityMatrix::from_pure(&initial_state_vector(cfg)?)
}

/// Dense `|ψ⟩⟨ψ|` helper for tests and diagnostics.
pub fn projector_onto(psi: &[C64]) -> ComplexMatrix {
    ComplexMatrix::outer(psi)
}
