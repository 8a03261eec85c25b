//! Compressed-sparse-row complex matrices and the dense/sparse product
//! kernels used by the master-equation right-hand side.
//!
//! Dense operands are square row-major slices of length `dim * dim`.

use num_complex::Complex64 as C64;

/// Entries with magnitude below this are dropped when a product or sum is formed.
pub const PRUNE: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, row_ptr: vec![0; dim + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let dim = diag.len();
        let mut rows = Vec::with_capacity(dim);
        for (i, &v) in diag.iter().enumerate() {
            rows.push(vec![(i, v)]);
        }
        Self::from_rows(dim, rows)
    }

    /// Builds a matrix from per-row `(column, value)` lists. Duplicate columns are
    /// summed, near-zero entries dropped.
    pub fn from_rows(dim: usize, rows: Vec<Vec<(usize, C64)>>) -> Self {
        assert_eq!(rows.len(), dim, "row count must equal dimension");
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_unstable_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < row.len() {
                let c = row[i].0;
                let mut acc = row[i].1;
                i += 1;
                while i < row.len() && row[i].0 == c {
                    acc += row[i].1;
                    i += 1;
                }
                debug_assert!(c < dim);
                if acc.norm() > PRUNE {
                    col_idx.push(c);
                    values.push(acc);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self { dim, row_ptr, col_idx, values }
    }

    pub fn from_dense(dim: usize, data: &[C64]) -> Self {
        assert_eq!(data.len(), dim * dim);
        let rows = (0..dim)
            .map(|r| {
                (0..dim)
                    .filter_map(|c| {
                        let v = data[r * dim + c];
                        (v.norm() > PRUNE).then_some((c, v))
                    })
                    .collect()
            })
            .collect();
        Self::from_rows(dim, rows)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, r: usize) -> (&[usize], &[C64]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        if s.norm() <= PRUNE {
            return Self::zeros(self.dim);
        }
        out
    }

    /// `self + s * other`
    pub fn add_scaled(&self, other: &Self, s: C64) -> Self {
        assert_eq!(self.dim, other.dim);
        let rows = (0..self.dim)
            .map(|r| {
                let (ca, va) = self.row(r);
                let (cb, vb) = other.row(r);
                let mut row: Vec<(usize, C64)> = ca.iter().copied().zip(va.iter().copied()).collect();
                row.extend(cb.iter().zip(vb).map(|(&c, &v)| (c, v * s)));
                row
            })
            .collect();
        Self::from_rows(self.dim, rows)
    }

    /// Sparse product `self * other` (Gustavson's row-wise algorithm).
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let mut acc = vec![C64::new(0.0, 0.0); dim];
        let mut marker = vec![usize::MAX; dim];
        let mut touched = Vec::new();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in 0..dim {
            touched.clear();
            let (ca, va) = self.row(r);
            for (&k, &a) in ca.iter().zip(va) {
                let (cb, vb) = other.row(k);
                for (&c, &b) in cb.iter().zip(vb) {
                    if marker[c] != r {
                        marker[c] = r;
                        acc[c] = C64::new(0.0, 0.0);
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                if acc[c].norm() > PRUNE {
                    col_idx.push(c);
                    values.push(acc[c]);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self { dim, row_ptr, col_idx, values }
    }

    pub fn transpose(&self) -> Self {
        self.transpose_map(|v| v)
    }

    pub fn adjoint(&self) -> Self {
        self.transpose_map(|v| v.conj())
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    fn transpose_map(&self, f: impl Fn(C64) -> C64) -> Self {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); self.dim];
        for (r, c, v) in self.iter() {
            rows[c].push((r, f(v)));
        }
        Self::from_rows(self.dim, rows)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let dim = da * db;
        let mut rows = Vec::with_capacity(dim);
        for ra in 0..da {
            let (ca, va) = self.row(ra);
            for rb in 0..db {
                let (cb, vb) = other.row(rb);
                let mut row = Vec::with_capacity(ca.len() * cb.len());
                for (&i, &a) in ca.iter().zip(va) {
                    for (&j, &b) in cb.iter().zip(vb) {
                        row.push((i * db + j, a * b));
                    }
                }
                rows.push(row);
            }
        }
        Self::from_rows(dim, rows)
    }

    pub fn to_dense(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim * self.dim];
        for (r, c, v) in self.iter() {
            out[r * self.dim + c] = v;
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `y = A x`
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.dim) {
            let (cols, vals) = self.row(r);
            let mut s = C64::new(0.0, 0.0);
            for (&c, &v) in cols.iter().zip(vals) {
                s += v * x[c];
            }
            *yr = s;
        }
    }

    /// `out += alpha * A * M` for a dense row-major `M` with `dim` rows of width `ncols`.
    pub fn left_mul_acc(&self, m: &[C64], ncols: usize, alpha: C64, out: &mut [C64]) {
        for r in 0..self.dim {
            let (cols, vals) = self.row(r);
            if cols.is_empty() {
                continue;
            }
            let orow = &mut out[r * ncols..(r + 1) * ncols];
            for (&c, &v) in cols.iter().zip(vals) {
                let w = alpha * v;
                let mrow = &m[c * ncols..(c + 1) * ncols];
                for (o, &x) in orow.iter_mut().zip(mrow) {
                    *o += w * x;
                }
            }
        }
    }

    /// `out += alpha * M * A` for a dense row-major `M` of shape `nrows × dim`.
    pub fn right_mul_acc(&self, m: &[C64], nrows: usize, alpha: C64, out: &mut [C64]) {
        let dim = self.dim;
        for r in 0..nrows {
            let mrow = &m[r * dim..(r + 1) * dim];
            let orow = &mut out[r * dim..(r + 1) * dim];
            for (k, &x) in mrow.iter().enumerate() {
                if x.re == 0.0 && x.im == 0.0 {
                    continue;
                }
                let (cols, vals) = self.row(k);
                let w = alpha * x;
                for (&c, &v) in cols.iter().zip(vals) {
                    orow[c] += w * v;
                }
            }
        }
    }
}
