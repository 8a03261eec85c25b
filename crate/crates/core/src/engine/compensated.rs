//! Lindblad right-hand side evaluated with double-word accumulation.
//!
//! Jumps enter as rate times an unscaled operator, so `√rate` is never squared
//! in floating point and the result is trace preserving to working precision
//! even when rates span many orders of magnitude.

use num_complex::Complex64 as C64;

use crate::model::JumpOperatorSet;
use crate::operator::OperatorExpr;
use crate::sparse::SparseMatrix;

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Real sum carrying its rounding error in a second word.
#[derive(Clone, Copy, Default)]
pub(super) struct Acc {
    hi: f64,
    lo: f64,
}

impl Acc {
    pub(super) fn add(&mut self, v: f64) {
        let (s, e) = two_sum(self.hi, v);
        self.hi = s;
        self.lo += e;
    }

    fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        self.add(p);
        self.lo += a.mul_add(b, -p);
    }

    /// Leading and trailing word of the sum.
    fn split(self) -> (f64, f64) {
        two_sum(self.hi, self.lo)
    }

    pub(super) fn value(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Clone, Copy, Default)]
struct CAcc {
    re: Acc,
    im: Acc,
}

impl CAcc {
    /// Adds `s · (hi + lo)`.
    fn add_scaled(&mut self, s: C64, hi: C64, lo: C64) {
        self.re.add_product(s.re, hi.re);
        self.re.add_product(-s.im, hi.im);
        self.im.add_product(s.re, hi.im);
        self.im.add_product(s.im, hi.re);
        self.re.add(s.re * lo.re - s.im * lo.im);
        self.im.add(s.re * lo.im + s.im * lo.re);
    }

    fn split(self) -> (C64, C64) {
        let (rh, rl) = self.re.split();
        let (ih, il) = self.im.split();
        (C64::new(rh, ih), C64::new(rl, il))
    }
}

/// Square matrix held as `hi + lo`, column-major.
struct Wide {
    dim: usize,
    hi: Vec<C64>,
    lo: Vec<C64>,
}

impl Wide {
    fn from_plain(dim: usize, v: &[C64]) -> Self {
        Self { dim, hi: v.to_vec(), lo: vec![C64::new(0.0, 0.0); v.len()] }
    }

    /// `S · self`
    fn left_mul(&self, s: &SparseMatrix) -> Self {
        let d = self.dim;
        let mut hi = vec![C64::new(0.0, 0.0); d * d];
        let mut lo = hi.clone();
        for c in 0..d {
            for r in 0..d {
                let (cols, vals) = s.row(r);
                let mut acc = CAcc::default();
                for (&k, &v) in cols.iter().zip(vals) {
                    acc.add_scaled(v, self.hi[k + c * d], self.lo[k + c * d]);
                }
                (hi[r + c * d], lo[r + c * d]) = acc.split();
            }
        }
        Self { dim: d, hi, lo }
    }

    /// `self · S`, given `st = Sᵀ`.
    fn right_mul(&self, st: &SparseMatrix) -> Self {
        let d = self.dim;
        let mut hi = vec![C64::new(0.0, 0.0); d * d];
        let mut lo = hi.clone();
        for c in 0..d {
            let (cols, vals) = st.row(c);
            for r in 0..d {
                let mut acc = CAcc::default();
                for (&k, &v) in cols.iter().zip(vals) {
                    acc.add_scaled(v, self.hi[r + k * d], self.lo[r + k * d]);
                }
                (hi[r + c * d], lo[r + c * d]) = acc.split();
            }
        }
        Self { dim: d, hi, lo }
    }
}

/// `L(ρ)` for a column-major `ρ`, accumulated entrywise in double-word precision.
pub(super) fn lindblad_apply(h: &OperatorExpr, jumps: &JumpOperatorSet, rho: &[C64]) -> Vec<C64> {
    let d = h.dim();
    let x = Wide::from_plain(d, rho);
    let mut acc = vec![CAcc::default(); d * d];
    let mut add = |m: &Wide, s: C64| {
        for (i, a) in acc.iter_mut().enumerate() {
            a.add_scaled(s, m.hi[i], m.lo[i]);
        }
    };
    let hs = h.sparse();
    add(&x.left_mul(hs), C64::new(0.0, -1.0));
    add(&x.right_mul(&hs.transpose()), C64::new(0.0, 1.0));
    for jump in jumps {
        let (b, w) = jump.factors();
        let b = b.sparse();
        let bdag = b.adjoint();
        let b_rho = x.left_mul(b);
        add(&b_rho.right_mul(&bdag.transpose()), C64::new(w, 0.0));
        add(&b_rho.left_mul(&bdag), C64::new(-0.5 * w, 0.0));
        add(&x.right_mul(&bdag.transpose()).right_mul(&b.transpose()), C64::new(-0.5 * w, 0.0));
    }
    acc.into_iter().map(|a| C64::new(a.re.value(), a.im.value())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_all_jumps, build_full_hamiltonian, ModelConfig, NoiseKind};

    #[test]
    fn matches_the_superoperator() {
        let cfg = ModelConfig { lambda: 0.1, gamma: 0.02, gamma_c: 0.7, noise: NoiseKind::SpontaneousAll, ..ModelConfig::with_sites(2) };
        let h = build_full_hamiltonian(&cfg).unwrap();
        let jumps = build_all_jumps(&cfg).unwrap();
        let d = h.dim();
        let rho: Vec<C64> = (0..d * d).map(|i| C64::new((i % 5) as f64 * 0.1, (i % 3) as f64 * 0.07 - 0.07)).collect();
        let fast = super::super::build_liouvillian(&h, &jumps).unwrap().apply(&rho);
        let wide = lindblad_apply(&h, &jumps, &rho);
        for (a, b) in fast.iter().zip(&wide) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
