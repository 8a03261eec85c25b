//! Vectorized Lindblad superoperator.
//!
//! Column stacking: `vec(ρ)[i + j·d] = ρ[i, j]`, so `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::JumpOperatorSet;
use crate::operator::{OperatorExpr, I, ZERO};
use crate::sparse::SparseMatrix;

use super::generator::check_dims;

/// Largest number of stored superoperator entries accepted by [`build_liouvillian`].
pub const MAX_SUPEROPERATOR_NNZ: usize = 40_000_000;

/// Largest Hilbert-space dimension for which a dense superoperator is formed.
pub const DENSE_MAX_DIM: usize = 64;

#[derive(Clone, Debug)]
pub struct Liouvillian {
    dim: usize,
    matrix: SparseMatrix,
}

impl Liouvillian {
    /// Hilbert-space dimension `d`; the superoperator is `d² × d²`.
    pub fn hilbert_dim(&self) -> usize {
        self.dim
    }

    pub fn sparse(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn apply(&self, vec_rho: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; vec_rho.len()];
        self.matrix.apply(vec_rho, &mut out);
        out
    }

    /// Largest `|Σ_i L[(i,i), c]|` over all columns: the trace functional is a
    /// left null vector exactly when this vanishes.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        let mut sums = vec![ZERO; d * d];
        for i in 0..d {
            let (cols, vals) = self.matrix.row(i + i * d);
            for (&c, &v) in cols.iter().zip(vals) {
                sums[c] += v;
            }
        }
        sums.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Result<Mat<C64>> {
        if self.dim > DENSE_MAX_DIM {
            return Err(Error::ResourceLimit(format!(
                "dense superoperator requested for d = {} (limit {DENSE_MAX_DIM})",
                self.dim
            )));
        }
        let n = self.dim * self.dim;
        let mut m = Mat::<C64>::zeros(n, n);
        for (r, c, v) in self.matrix.iter() {
            m[(r, c)] = v;
        }
        Ok(m)
    }
}

/// `−i(I ⊗ H_eff) + i(conj(H_eff) ⊗ I) + Σ_k conj(L_k) ⊗ L_k`.
pub fn build_liouvillian(h: &OperatorExpr, jumps: &JumpOperatorSet) -> Result<Liouvillian> {
    check_dims(h, jumps)?;
    let d = h.dim();
    let hs = h.sparse();
    let estimate = 2 * hs.nnz() * d
        + jumps.operators().map(|l| l.sparse().nnz().pow(2) + 2 * l.sparse().nnz() * d).sum::<usize>();
    if estimate > MAX_SUPEROPERATOR_NNZ {
        return Err(Error::ResourceLimit(format!(
            "superoperator would hold ~{estimate} entries (limit {MAX_SUPEROPERATOR_NNZ})"
        )));
    }
    let mut heff = hs.clone();
    for l in jumps.operators() {
        let l = l.sparse();
        heff = heff.add_scaled(&l.adjoint().matmul(l), C64::new(0.0, -0.5));
    }
    let id = SparseMatrix::identity(d);
    let mut sup = id.kron(&heff).scale(-I).add_scaled(&heff.conj().kron(&id), I);
    for l in jumps.operators() {
        let l = l.sparse();
        sup = sup.add_scaled(&l.conj().kron(l), C64::new(1.0, 0.0));
    }
    Ok(Liouvillian { dim: d, matrix: sup })
}
