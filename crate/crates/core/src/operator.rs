//! Qubit-register bookkeeping and the operator algebra the model is built from.
//!
//! Ordering convention: qubit 0 is the leftmost tensor factor, i.e. the most
//! significant bit of a basis-state index. On an `n`-qubit register, qubit `q`
//! is bit `n - 1 - q`. Matter site `j` lives on qubit `2j`; the link between
//! sites `j` and `j + 1 (mod N)` lives on qubit `2j + 1`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Tolerance of the Hermiticity check on operators.
pub const OPERATOR_HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance of a valid density matrix.
pub const TRACE_TOL: f64 = 1e-8;
/// Hermiticity tolerance of a valid density matrix.
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-10;
/// Most negative eigenvalue tolerated in a density matrix.
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Mapping of `N` matter sites and `N` periodic links onto `2N` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    n_matter: usize,
}

impl RegisterLayout {
    pub fn new(n_matter: usize) -> Result<Self> {
        if n_matter == 0 {
            return Err(Error::InvalidConfig("a register needs at least one matter site".into()));
        }
        if 2 * n_matter > 24 {
            return Err(Error::ResourceLimit(format!("{} qubits do not fit in memory", 2 * n_matter)));
        }
        Ok(Self { n_matter })
    }

    #[inline]
    pub fn n_matter(&self) -> usize {
        self.n_matter
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        2 * self.n_matter
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1 << self.n_qubits()
    }

    /// Qubit of matter site `j` (taken modulo `N`).
    #[inline]
    pub fn matter(&self, j: usize) -> usize {
        2 * (j % self.n_matter)
    }

    /// Qubit of the link between sites `j` and `j + 1` (taken modulo `N`).
    #[inline]
    pub fn link(&self, j: usize) -> usize {
        2 * (j % self.n_matter) + 1
    }

    /// Qubit of the link between sites `j - 1` and `j`; wraps to `2N - 1` for `j = 0`.
    #[inline]
    pub fn link_left(&self, j: usize) -> usize {
        self.link((j % self.n_matter + self.n_matter - 1) % self.n_matter)
    }
}

/// Single-qubit factors available for embedding. `Plus`/`Minus` are the
/// ladder operators `(X ± iY)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    I,
    X,
    Y,
    Z,
    Plus,
    Minus,
}

impl Factor {
    /// Row-major 2×2 matrix.
    pub fn matrix(self) -> [[C64; 2]; 2] {
        match self {
            Factor::I => [[ONE, ZERO], [ZERO, ONE]],
            Factor::X => [[ZERO, ONE], [ONE, ZERO]],
            Factor::Y => [[ZERO, -I], [I, ZERO]],
            Factor::Z => [[ONE, ZERO], [ZERO, -ONE]],
            Factor::Plus => [[ZERO, ONE], [ZERO, ZERO]],
            Factor::Minus => [[ZERO, ZERO], [ONE, ZERO]],
        }
    }
}

/// A sparse operator on a qubit register of known size.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorExpr {
    n_qubits: usize,
    matrix: SparseMatrix,
    label: Option<String>,
}

impl OperatorExpr {
    pub fn from_sparse(n_qubits: usize, matrix: SparseMatrix) -> Result<Self> {
        if matrix.dim() != 1 << n_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << n_qubits, found: matrix.dim() });
        }
        Ok(Self { n_qubits, matrix, label: None })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, matrix: SparseMatrix::identity(1 << n_qubits), label: None }
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, matrix: SparseMatrix::zeros(1 << n_qubits), label: None }
    }

    /// Embeds a single-qubit factor on `qubit` of an `n_qubits` register.
    pub fn embed(n_qubits: usize, qubit: usize, factor: Factor) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::QubitOutOfRange { qubit, n_qubits });
        }
        let dim = 1usize << n_qubits;
        let shift = n_qubits - 1 - qubit;
        let m = factor.matrix();
        let rows = (0..dim)
            .map(|r| {
                let b = (r >> shift) & 1;
                (0..2)
                    .filter(|&bc| m[b][bc] != ZERO)
                    .map(|bc| ((r & !(1 << shift)) | (bc << shift), m[b][bc]))
                    .collect()
            })
            .collect();
        Ok(Self { n_qubits, matrix: SparseMatrix::from_rows(dim, rows), label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    #[inline]
    pub fn sparse(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.matrix.get(r, c)
    }

    pub fn adjoint(&self) -> Self {
        Self { n_qubits: self.n_qubits, matrix: self.matrix.adjoint(), label: None }
    }

    pub fn scale(&self, s: impl Into<C64>) -> Self {
        Self { n_qubits: self.n_qubits, matrix: self.matrix.scale(s.into()), label: None }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { n_qubits: self.n_qubits, matrix: self.matrix.add_scaled(&other.matrix, ONE), label: None })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { n_qubits: self.n_qubits, matrix: self.matrix.matmul(&other.matrix), label: None })
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(self.try_mul(other)?.try_add(&other.try_mul(self)?.scale(-1.0))?)
    }

    /// Largest entry magnitude, the `‖·‖_max` norm.
    pub fn max_abs(&self) -> f64 {
        self.matrix.max_abs()
    }

    /// `‖A − A†‖_max`
    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.add_scaled(&self.matrix.adjoint(), -ONE).max_abs()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() < OPERATOR_HERMITIAN_TOL
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        ComplexMatrix { dim: self.dim(), data: self.matrix.to_dense() }
    }

    /// `ψ ↦ Aψ`
    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim()];
        self.matrix.apply(psi, &mut out);
        out
    }
}

impl Add for &OperatorExpr {
    type Output = OperatorExpr;
    /// Panics on mismatched registers; use [`OperatorExpr::try_add`] for a checked sum.
    fn add(self, rhs: Self) -> OperatorExpr {
        self.try_add(rhs).expect("operator sum on mismatched registers")
    }
}

impl Sub for &OperatorExpr {
    type Output = OperatorExpr;
    fn sub(self, rhs: Self) -> OperatorExpr {
        self.try_add(&rhs.scale(-1.0)).expect("operator difference on mismatched registers")
    }
}

impl Mul for &OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: Self) -> OperatorExpr {
        self.try_mul(rhs).expect("operator product on mismatched registers")
    }
}

/// Embeds `factor` on `qubit` of the register described by `layout`.
pub fn embed_pauli(layout: &RegisterLayout, qubit: usize, factor: Factor) -> Result<OperatorExpr> {
    OperatorExpr::embed(layout.n_qubits(), qubit, factor)
}

/// `Σ_k c_k · Π_i A_{k,i}`, products taken left to right.
pub fn combine(terms: &[(C64, Vec<&OperatorExpr>)]) -> Result<OperatorExpr> {
    let first = terms
        .iter()
        .flat_map(|(_, fs)| fs.first())
        .next()
        .ok_or_else(|| Error::InvalidConfig("combine needs at least one factor".into()))?;
    let n_qubits = first.n_qubits();
    let dim = first.dim();
    let mut acc = SparseMatrix::zeros(dim);
    for (coeff, factors) in terms {
        let mut prod: Option<SparseMatrix> = None;
        for f in factors {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: f.dim() });
            }
            prod = Some(match prod {
                None => f.sparse().clone(),
                Some(p) => p.matmul(f.sparse()),
            });
        }
        let prod = prod.unwrap_or_else(|| SparseMatrix::identity(dim));
        acc = acc.add_scaled(&prod, *coeff);
    }
    OperatorExpr::from_sparse(n_qubits, acc)
}

/// `Tr(A ρ)`
pub fn expectation(op: &OperatorExpr, rho: &DensityMatrix) -> Result<C64> {
    trace_product(op, rho.as_matrix())
}

/// `Tr(A M)` for an arbitrary dense `M`.
pub fn trace_product(op: &OperatorExpr, m: &ComplexMatrix) -> Result<C64> {
    if op.dim() != m.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), found: m.dim() });
    }
    Ok(trace_product_raw(op.sparse(), m.as_slice()))
}

pub(crate) fn trace_product_raw(op: &SparseMatrix, m: &[C64]) -> C64 {
    let dim = op.dim();
    let mut s = ZERO;
    for r in 0..dim {
        let (cols, vals) = op.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            s += v * m[c * dim + r];
        }
    }
    s
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// `|ψ⟩⟨ψ|`
    pub fn outer(psi: &[C64]) -> Self {
        Self::from_fn(psi.len(), |r, c| psi[r] * psi[c].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    /// `‖M − M†‖_max`
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// Column-stacked vectorization: `vec(M)[r + c·d] = M[r, c]`.
    pub fn vectorize(&self) -> Vec<C64> {
        let d = self.dim;
        let mut v = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                v[r + c * d] = self.data[r * d + c];
            }
        }
        v
    }

    pub fn unvectorize(dim: usize, v: &[C64]) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: v.len() });
        }
        Ok(Self::from_fn(dim, |r, c| v[r + c * dim]))
    }

    pub fn to_faer(&self) -> Mat<C64> {
        Mat::from_fn(self.dim, self.dim, |r, c| self[(r, c)])
    }

    pub fn from_faer(m: faer::MatRef<'_, C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |r, c| m[(r, c)])
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let h = Mat::from_fn(self.dim, self.dim, |r, c| 0.5 * (self[(r, c)] + self[(c, r)].conj()));
        h.self_adjoint_eigenvalues(faer::Side::Lower).map_err(|e| Error::LinAlg(format!("{e:?}")))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

/// A validated density matrix: unit trace and Hermitian. Positivity is
/// checked on demand by [`DensityMatrix::validate_positive`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let tr = m.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let defect = m.hermiticity_defect();
        if defect > DENSITY_HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("hermiticity defect {defect:e}")));
        }
        Ok(Self(m))
    }

    /// Wraps `m` without checks; callers guarantee the invariants up to their own tolerance.
    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    /// `|ψ⟩⟨ψ|` for a normalized state vector.
    pub fn from_pure(psi: &[C64]) -> Result<Self> {
        if !psi.len().is_power_of_two() {
            return Err(Error::InvalidState(format!("state length {} is not a power of two", psi.len())));
        }
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("state norm² {norm} differs from 1")));
        }
        Ok(Self(ComplexMatrix::outer(psi)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `Tr ρ²`
    pub fn purity(&self) -> f64 {
        // Tr(ρρ) = Σ_rc ρ_rc ρ_cr = Σ |ρ_rc|² for Hermitian ρ
        self.0.as_slice().iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.0.hermitian_eigenvalues()?[0])
    }

    pub fn validate_positive(&self) -> Result<()> {
        let lo = self.min_eigenvalue()?;
        if lo < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo:e}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn op(n: usize, q: usize, f: Factor) -> OperatorExpr {
        OperatorExpr::embed(n, q, f).unwrap()
    }

    #[test]
    fn layout_maps_every_qubit_once() {
        for n in 2..=5 {
            let layout = RegisterLayout::new(n).unwrap();
            let mut seen = vec![0; layout.n_qubits()];
            for j in 0..n {
                seen[layout.matter(j)] += 1;
                seen[layout.link(j)] += 1;
            }
            assert!(seen.iter().all(|&s| s == 1));
            assert_eq!(layout.link_left(0), 2 * n - 1);
            assert_eq!(layout.link_left(1), 1);
        }
    }

    #[test]
    fn embed_x_on_leftmost_qubit() {
        let layout = RegisterLayout::new(1).unwrap();
        let x0 = embed_pauli(&layout, 0, Factor::X).unwrap().to_dense();
        // X ⊗ I
        let expected = ComplexMatrix::from_fn(4, |r, c| if r ^ c == 2 { ONE } else { ZERO });
        assert_eq!(x0, expected);
    }

    #[test]
    fn z_squares_to_identity() {
        let layout = RegisterLayout::new(1).unwrap();
        let z1 = embed_pauli(&layout, 1, Factor::Z).unwrap();
        assert_eq!((&z1 * &z1).to_dense(), ComplexMatrix::identity(4));
    }

    #[test]
    fn raising_times_lowering_projects_on_excited_level() {
        let layout = RegisterLayout::new(1).unwrap();
        let p = embed_pauli(&layout, 0, Factor::Plus).unwrap();
        let m = embed_pauli(&layout, 0, Factor::Minus).unwrap();
        let z = embed_pauli(&layout, 0, Factor::Z).unwrap();
        let proj = &p * &m;
        // projector onto the Z = +1 level of qubit 0: (1 + Z)/2
        // an empty factor list stands for the identity
        let expected = combine(&[(C64::new(0.5, 0.0), vec![]), (C64::new(0.5, 0.0), vec![&z])]).unwrap();
        assert_eq!(proj.to_dense(), expected.to_dense());
        assert_eq!((&proj * &proj).to_dense(), proj.to_dense());
    }

    #[test]
    fn bad_qubit_rejected() {
        let layout = RegisterLayout::new(1).unwrap();
        assert!(matches!(
            embed_pauli(&layout, 2, Factor::X),
            Err(Error::QubitOutOfRange { qubit: 2, n_qubits: 2 })
        ));
    }

    #[test]
    fn combine_linearity_and_anticommutation() {
        let x = op(1, 0, Factor::X);
        let y = op(1, 0, Factor::Y);
        let z = op(1, 0, Factor::Z);
        let two_x = combine(&[(ONE, vec![&x]), (ONE, vec![&x])]).unwrap();
        assert_eq!(two_x.to_dense(), x.scale(2.0).to_dense());

        let xz = combine(&[(ONE, vec![&x, &z])]).unwrap();
        let zx = combine(&[(ONE, vec![&z, &x])]).unwrap();
        assert_eq!(xz.to_dense(), zx.scale(-1.0).to_dense());

        let plus = combine(&[(C64::new(0.5, 0.0), vec![&x]), (C64::new(0.0, 0.5), vec![&y])]).unwrap();
        assert_eq!(plus.to_dense(), op(1, 0, Factor::Plus).to_dense());
    }

    #[test]
    fn combine_rejects_mismatched_dimensions() {
        let a = op(1, 0, Factor::X);
        let b = op(2, 0, Factor::X);
        assert!(matches!(
            combine(&[(ONE, vec![&a, &b])]),
            Err(Error::DimensionMismatch { expected: 2, found: 4 })
        ));
    }

    #[test]
    fn expectation_examples() {
        let z = op(1, 0, Factor::Z);
        let x = op(1, 0, Factor::X);
        let up = DensityMatrix::from_pure(&[ONE, ZERO]).unwrap();
        assert!((expectation(&z, &up).unwrap() - ONE).norm() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(expectation(&x, &mixed).unwrap().norm() < 1e-15);
        let big = DensityMatrix::maximally_mixed(4);
        assert!(matches!(expectation(&x, &big), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = ComplexMatrix::identity(2);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let mut m = ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0));
        m[(0, 1)] = C64::new(0.0, 0.1);
        assert!(DensityMatrix::new(m).is_err());
        let neg = ComplexMatrix::from_fn(2, |r, c| match (r, c) {
            (0, 0) => C64::new(1.5, 0.0),
            (1, 1) => C64::new(-0.5, 0.0),
            _ => ZERO,
        });
        let rho = DensityMatrix::new(neg).unwrap();
        assert!(rho.validate_positive().is_err());
        assert!(DensityMatrix::maximally_mixed(4).validate_positive().is_ok());
        assert!((DensityMatrix::maximally_mixed(4).purity() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn vectorization_is_column_stacking() {
        let m = ComplexMatrix::from_fn(3, |r, c| C64::new(r as f64, c as f64));
        let v = m.vectorize();
        assert_eq!(v[1], C64::new(1.0, 0.0));
        assert_eq!(v[3], C64::new(0.0, 1.0));
        assert_eq!(ComplexMatrix::unvectorize(3, &v).unwrap(), m);
    }

    const FACTORS: [Factor; 6] = [Factor::I, Factor::X, Factor::Y, Factor::Z, Factor::Plus, Factor::Minus];
    const PAULIS: [Factor; 4] = [Factor::I, Factor::X, Factor::Y, Factor::Z];

    fn random_density(dim: usize, seed: &[f64]) -> DensityMatrix {
        // ρ = A A† / Tr(A A†) with A filled from the seed values
        let a = ComplexMatrix::from_fn(dim, |r, c| {
            let k = (r * dim + c) % seed.len();
            C64::new(seed[k], seed[(k + 1) % seed.len()] * 0.5)
        });
        let aa = a.matmul(&a.adjoint());
        let tr = aa.trace().re;
        DensityMatrix::new(aa.scale(C64::new(1.0 / tr, 0.0))).unwrap()
    }

    proptest! {
        #[test]
        fn distinct_qubits_commute(qa in 0usize..4, qb in 0usize..4, fa in 0usize..6, fb in 0usize..6) {
            prop_assume!(qa != qb);
            let a = op(4, qa, FACTORS[fa]);
            let b = op(4, qb, FACTORS[fb]);
            prop_assert!(a.commutator(&b).unwrap().max_abs() == 0.0);
        }

        #[test]
        fn nontrivial_pauli_strings_are_traceless(codes in proptest::collection::vec(0usize..4, 3)) {
            prop_assume!(codes.iter().any(|&c| c != 0));
            let factors: Vec<OperatorExpr> =
                codes.iter().enumerate().map(|(q, &c)| op(3, q, PAULIS[c])).collect();
            let refs: Vec<&OperatorExpr> = factors.iter().collect();
            let p = combine(&[(ONE, refs)]).unwrap();
            let tr: C64 = (0..8).map(|i| p.get(i, i)).sum();
            prop_assert!(tr.norm() < 1e-15);
        }

        #[test]
        fn expectation_is_linear_and_conjugates(
            seed in proptest::collection::vec(-1.0f64..1.0, 8),
            ca in -2.0f64..2.0,
            cb in -2.0f64..2.0,
        ) {
            let rho = random_density(4, &seed);
            let a = combine(&[(C64::new(1.0, 0.5), vec![&op(2, 0, Factor::Plus), &op(2, 1, Factor::Z)])]).unwrap();
            let b = op(2, 1, Factor::Minus);
            let lin = combine(&[(C64::new(ca, 0.0), vec![&a]), (C64::new(cb, 0.0), vec![&b])]).unwrap();
            let lhs = expectation(&lin, &rho).unwrap();
            let rhs = expectation(&a, &rho).unwrap() * ca + expectation(&b, &rho).unwrap() * cb;
            prop_assert!((lhs - rhs).norm() < 1e-12);
            let adj = expectation(&a.adjoint(), &rho).unwrap();
            prop_assert!((adj - expectation(&a, &rho).unwrap().conj()).norm() < 1e-12);
        }
    }
}
