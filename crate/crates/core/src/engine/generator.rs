//! Matrix-free application of the Lindblad generator to a dense density matrix.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::JumpOperatorSet;
use crate::operator::{ComplexMatrix, OperatorExpr, I, ONE, ZERO};
use crate::sparse::SparseMatrix;

/// A set of qubits on which the working basis is Hadamard-rotated.
///
/// Operators and states are conjugated by `W = ⊗_{q∈S} H_q` (real, symmetric,
/// involutory). Gauss-law strings built from `τˣ` become diagonal when the link
/// qubits are rotated, which keeps correction operators sparse.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Frame {
    n_qubits: usize,
    rotated: Vec<usize>,
}

impl Frame {
    pub fn computational(n_qubits: usize) -> Self {
        Self { n_qubits, rotated: Vec::new() }
    }

    pub fn hadamard(n_qubits: usize, mut qubits: Vec<usize>) -> Result<Self> {
        qubits.sort_unstable();
        qubits.dedup();
        if let Some(&q) = qubits.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
        }
        Ok(Self { n_qubits, rotated: qubits })
    }

    pub fn rotated(&self) -> &[usize] {
        &self.rotated
    }

    pub fn is_identity(&self) -> bool {
        self.rotated.is_empty()
    }

    /// Greedily rotates each qubit whose rotation lowers the total number of
    /// stored entries of `ops`.
    pub fn auto(n_qubits: usize, ops: &[&SparseMatrix]) -> Self {
        let mut current: Vec<SparseMatrix> = ops.iter().map(|m| (*m).clone()).collect();
        let mut rotated = Vec::new();
        for q in 0..n_qubits {
            let w = hadamard_on(n_qubits, q);
            let trial: Vec<SparseMatrix> = current.iter().map(|m| w.matmul(m).matmul(&w)).collect();
            let before: usize = current.iter().map(SparseMatrix::nnz).sum();
            let after: usize = trial.iter().map(SparseMatrix::nnz).sum();
            if after < before {
                current = trial;
                rotated.push(q);
            }
        }
        Self { n_qubits, rotated }
    }

    fn matrix(&self) -> Option<SparseMatrix> {
        self.rotated
            .iter()
            .map(|&q| hadamard_on(self.n_qubits, q))
            .reduce(|a, b| a.matmul(&b))
    }

    /// `W A W` (the map is its own inverse).
    pub fn conjugate(&self, a: &SparseMatrix) -> SparseMatrix {
        match self.matrix() {
            Some(w) => w.matmul(a).matmul(&w),
            None => a.clone(),
        }
    }

    /// `W ρ W` on a dense row-major matrix, one qubit at a time.
    pub fn conjugate_dense(&self, dim: usize, rho: &[C64]) -> Vec<C64> {
        let mut cur = rho.to_vec();
        let mut tmp = vec![ZERO; rho.len()];
        for &q in &self.rotated {
            let w = hadamard_on(self.n_qubits, q);
            tmp.iter_mut().for_each(|v| *v = ZERO);
            w.left_mul_acc(&cur, dim, ONE, &mut tmp);
            cur.iter_mut().for_each(|v| *v = ZERO);
            w.right_mul_acc(&tmp, dim, ONE, &mut cur);
        }
        cur
    }
}

fn hadamard_on(n_qubits: usize, q: usize) -> SparseMatrix {
    let h = OperatorExpr::embed(n_qubits, q, crate::operator::Factor::X).expect("qubit in range");
    let z = OperatorExpr::embed(n_qubits, q, crate::operator::Factor::Z).expect("qubit in range");
    (&h + &z).scale(std::f64::consts::FRAC_1_SQRT_2).sparse().clone()
}

/// `dρ/dt = −i H_eff ρ + i ρ H_eff† + Σ_k L_k ρ L_k†` with
/// `H_eff = H − (i/2) Σ_k L_k† L_k`, all operators stored in a fixed frame.
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    dim: usize,
    frame: Frame,
    neg_i_heff: SparseMatrix,
    pos_i_heff_adj: SparseMatrix,
    jumps: Vec<JumpKernel>,
}

/// How `L ρ L†` is applied.
#[derive(Clone, Debug)]
enum JumpKernel {
    /// At most one entry per row: `L[r, col[r]] = val[r]`.
    Monomial { col: Vec<usize>, val: Vec<C64> },
    General(SparseMatrix, SparseMatrix),
}

impl JumpKernel {
    fn new(l: SparseMatrix) -> Self {
        let d = l.dim();
        if (0..d).all(|r| l.row(r).0.len() <= 1) {
            let mut col = vec![0; d];
            let mut val = vec![ZERO; d];
            for (r, c, v) in l.iter() {
                col[r] = c;
                val[r] = v;
            }
            JumpKernel::Monomial { col, val }
        } else {
            let ld = l.adjoint();
            JumpKernel::General(l, ld)
        }
    }

    fn nnz(&self) -> usize {
        match self {
            JumpKernel::Monomial { val, .. } => val.iter().filter(|v| v.norm() > 0.0).count(),
            JumpKernel::General(l, ld) => l.nnz() + ld.nnz(),
        }
    }

    fn apply_acc(&self, d: usize, rho: &[C64], out: &mut [C64], scratch: &mut [C64]) {
        match self {
            JumpKernel::Monomial { col, val } => {
                for r in 0..d {
                    let vr = val[r];
                    if vr.re == 0.0 && vr.im == 0.0 {
                        continue;
                    }
                    let src = &rho[col[r] * d..(col[r] + 1) * d];
                    let orow = &mut out[r * d..(r + 1) * d];
                    for c in 0..d {
                        let vc = val[c];
                        if vc.re == 0.0 && vc.im == 0.0 {
                            continue;
                        }
                        orow[c] += vr * src[col[c]] * vc.conj();
                    }
                }
            }
            JumpKernel::General(l, ld) => {
                scratch.iter_mut().for_each(|v| *v = ZERO);
                l.left_mul_acc(rho, d, ONE, scratch);
                ld.right_mul_acc(scratch, d, ONE, out);
            }
        }
    }
}

impl LindbladGenerator {
    pub fn new(h: &OperatorExpr, jumps: &JumpOperatorSet) -> Result<Self> {
        Self::with_frame(h, jumps, Frame::computational(h.n_qubits()))
    }

    /// Chooses the frame automatically (see [`Frame::auto`]).
    pub fn auto_frame(h: &OperatorExpr, jumps: &JumpOperatorSet) -> Result<Self> {
        check_dims(h, jumps)?;
        let mut ops: Vec<&SparseMatrix> = vec![h.sparse()];
        ops.extend(jumps.operators().map(OperatorExpr::sparse));
        let frame = Frame::auto(h.n_qubits(), &ops);
        Self::with_frame(h, jumps, frame)
    }

    pub fn with_frame(h: &OperatorExpr, jumps: &JumpOperatorSet, frame: Frame) -> Result<Self> {
        check_dims(h, jumps)?;
        let dim = h.dim();
        let mut heff = frame.conjugate(h.sparse());
        let mut ops = Vec::with_capacity(jumps.len());
        for l in jumps.operators() {
            let l = frame.conjugate(l.sparse());
            let ld = l.adjoint();
            heff = heff.add_scaled(&ld.matmul(&l), C64::new(0.0, -0.5));
            ops.push(JumpKernel::new(l));
        }
        let neg_i_heff = heff.scale(-I);
        let pos_i_heff_adj = heff.adjoint().scale(I);
        Ok(Self { dim, frame, neg_i_heff, pos_i_heff_adj, jumps: ops })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Stored entries touched by one application.
    pub fn cost(&self) -> usize {
        self.neg_i_heff.nnz()
            + self.pos_i_heff_adj.nnz()
            + self.jumps.iter().map(JumpKernel::nnz).sum::<usize>()
    }

    /// `out = L(ρ)` in the generator's frame; `scratch` has the same length as `rho`.
    pub fn apply(&self, rho: &[C64], out: &mut [C64], scratch: &mut [C64]) {
        let d = self.dim;
        out.iter_mut().for_each(|v| *v = ZERO);
        self.neg_i_heff.left_mul_acc(rho, d, ONE, out);
        self.pos_i_heff_adj.right_mul_acc(rho, d, ONE, out);
        for jump in &self.jumps {
            jump.apply_acc(d, rho, out, scratch);
        }
    }

    pub fn to_frame(&self, rho: &[C64]) -> Vec<C64> {
        self.frame.conjugate_dense(self.dim, rho)
    }

    pub fn from_frame(&self, rho: &[C64]) -> Vec<C64> {
        self.frame.conjugate_dense(self.dim, rho)
    }
}

pub(crate) fn check_dims(h: &OperatorExpr, jumps: &JumpOperatorSet) -> Result<()> {
    if !h.is_hermitian() {
        return Err(Error::InvalidState(format!(
            "Hamiltonian is not Hermitian (defect {:.3e})",
            h.hermiticity_defect()
        )));
    }
    for j in jumps.iter() {
        if j.op.dim() != h.dim() {
            return Err(Error::DimensionMismatch { expected: h.dim(), found: j.op.dim() });
        }
    }
    Ok(())
}

/// `i[ρ, H] + Σ_k (L_k ρ L_k† − ½ ρ L_k†L_k − ½ L_k†L_k ρ)`.
pub fn lindblad_rhs(rho: &ComplexMatrix, h: &OperatorExpr, jumps: &JumpOperatorSet) -> Result<ComplexMatrix> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: rho.dim() });
    }
    let gen = LindbladGenerator::new(h, jumps)?;
    let mut out = vec![ZERO; rho.as_slice().len()];
    let mut scratch = out.clone();
    gen.apply(rho.as_slice(), &mut out, &mut scratch);
    ComplexMatrix::from_vec(rho.dim(), out)
}
