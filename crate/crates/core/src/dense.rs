//! Thin wrappers over faer's dense decompositions.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::ComplexMatrix;

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// eigenvectors as columns.
pub fn eigh(m: &ComplexMatrix) -> Result<(Vec<f64>, Mat<C64>)> {
    eigh_faer(&m.to_faer())
}

pub fn eigh_faer(m: &Mat<C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let evd = m.self_adjoint_eigen(faer::Side::Lower).map_err(|e| Error::LinAlg(format!("{e:?}")))?;
    let s = evd.S();
    let values = (0..m.nrows()).map(|i| s[i].re).collect();
    Ok((values, evd.U().to_owned()))
}

/// Eigenvalues of a general complex matrix (no particular order).
pub fn eigenvalues(m: &Mat<C64>) -> Result<Vec<C64>> {
    m.eigenvalues().map_err(|e| Error::LinAlg(format!("{e:?}")))
}

/// `exp(−i H t)` for Hermitian `H`.
pub fn unitary_propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let (vals, vecs) = eigh(h)?;
    let n = h.dim();
    let phases: Vec<C64> = vals.iter().map(|&e| C64::from_polar(1.0, -e * t)).collect();
    Ok(ComplexMatrix::from_fn(n, |r, c| {
        (0..n).map(|k| vecs[(r, k)] * phases[k] * vecs[(c, k)].conj()).sum()
    }))
}

/// Dense matrix–vector product.
pub fn mat_vec(m: &ComplexMatrix, v: &[C64]) -> Vec<C64> {
    let n = m.dim();
    (0..n).map(|r| (0..n).map(|c| m[(r, c)] * v[c]).sum()).collect()
}
