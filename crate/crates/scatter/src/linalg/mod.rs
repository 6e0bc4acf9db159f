//! Sparse complex linear algebra: triplet accumulation, CSR storage, direct
//! solves and 1-norm condition estimation.

pub mod dense;

use crate::error::{Result, ScatterError};
use crate::specfun::C64;
use dense::DenseLu;
use faer::linalg::solvers::SolveCore;
use faer::sparse::{SparseRowMatRef, SymbolicSparseRowMatRef};
use faer::{Conj, MatMut};
use std::io::Write;

/// Largest dimension for which the dense LU fallback is attempted.
pub const DENSE_FALLBACK_MAX_DIM: usize = 4096;

const COMPACT_MIN: usize = 1 << 22;

/// Complex triplet list; duplicates are summed on compaction and finalize.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTripletMatrix {
    dim: usize,
    rows: Vec<u32>,
    cols: Vec<u32>,
    vals: Vec<C64>,
    compacted_len: usize,
}

impl ComplexTripletMatrix {
    /// Empty `dim × dim` matrix.
    pub fn new(dim: usize) -> Self {
        assert!(dim < u32::MAX as usize, "dimension {dim} exceeds the index type");
        Self { dim, rows: Vec::new(), cols: Vec::new(), vals: Vec::new(), compacted_len: 0 }
    }

    /// Dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored triplets.
    pub fn len(&self) -> usize {
        self.vals.len()
    }

    /// Whether no triplets are stored.
    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// Appends `v` at `(r, c)`. Panics when an index is out of range.
    pub fn add(&mut self, r: usize, c: usize, v: C64) {
        assert!(r < self.dim && c < self.dim, "triplet ({r}, {c}) outside {}", self.dim);
        self.rows.push(r as u32);
        self.cols.push(c as u32);
        self.vals.push(v);
        if self.vals.len() >= COMPACT_MIN.max(2 * self.compacted_len) {
            self.compact();
        }
    }

    /// Adds a dense local block `block[a][b]` at rows `ri[a]`, columns `ci[b]`.
    pub fn add_block(&mut self, ri: &[usize], ci: &[usize], block: &[C64]) {
        debug_assert_eq!(block.len(), ri.len() * ci.len());
        for (a, &r) in ri.iter().enumerate() {
            for (b, &c) in ci.iter().enumerate() {
                let v = block[a * ci.len() + b];
                if v != C64::new(0.0, 0.0) {
                    self.add(r, c, v);
                }
            }
        }
    }

    /// Appends all triplets of `other` scaled by `s`, shifted by `(dr, dc)`.
    pub fn add_scaled(&mut self, other: &ComplexTripletMatrix, s: C64, dr: usize, dc: usize) {
        for k in 0..other.len() {
            self.add(other.rows[k] as usize + dr, other.cols[k] as usize + dc, s * other.vals[k]);
        }
    }

    /// Iterates over the stored triplets.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.len()).map(move |k| (self.rows[k] as usize, self.cols[k] as usize, self.vals[k]))
    }

    /// Sorts by (row, column) and sums duplicates. Summation follows insertion
    /// order within each position, so the result is deterministic.
    pub fn compact(&mut self) {
        let n = self.vals.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by_key(|&k| ((self.rows[k as usize] as u64) << 32) | self.cols[k as usize] as u64);
        let mut rows = Vec::with_capacity(n / 2 + 1);
        let mut cols = Vec::with_capacity(n / 2 + 1);
        let mut vals: Vec<C64> = Vec::with_capacity(n / 2 + 1);
        for &k in &order {
            let (r, c, v) = (self.rows[k as usize], self.cols[k as usize], self.vals[k as usize]);
            if rows.last() == Some(&r) && cols.last() == Some(&c) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        }
        self.rows = rows;
        self.cols = cols;
        self.vals = vals;
        self.compacted_len = self.vals.len();
    }

    /// Dense row-major copy (for tests and small systems).
    pub fn to_dense(&self) -> Vec<C64> {
        let mut d = vec![C64::new(0.0, 0.0); self.dim * self.dim];
        for (r, c, v) in self.iter() {
            d[r * self.dim + c] += v;
        }
        d
    }
}

/// Compressed sparse row matrix with sorted unique columns per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    /// Dimension.
    pub dim: usize,
    /// Row pointers, length `dim + 1`.
    pub row_ptr: Vec<usize>,
    /// Column indices.
    pub col_idx: Vec<usize>,
    /// Values.
    pub vals: Vec<C64>,
}

/// Converts triplets into CSR, summing duplicates.
pub fn finalize(t: &ComplexTripletMatrix) -> CsrMatrix {
    let mut t = t.clone();
    t.compact();
    let n = t.dim;
    let mut row_ptr = vec![0usize; n + 1];
    for &r in &t.rows {
        row_ptr[r as usize + 1] += 1;
    }
    for i in 0..n {
        row_ptr[i + 1] += row_ptr[i];
    }
    CsrMatrix {
        dim: n,
        row_ptr,
        col_idx: t.cols.iter().map(|&c| c as usize).collect(),
        vals: t.vals,
    }
}

impl CsrMatrix {
    /// Symmetric equilibration factors `d_i = 1/sqrt(max_j |a_ij|)` (one for empty rows).
    pub fn equilibration(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|i| {
                let m = self.vals[self.row_ptr[i]..self.row_ptr[i + 1]].iter().map(|v| v.norm()).fold(0.0, f64::max);
                if m > 0.0 {
                    1.0 / m.sqrt()
                } else {
                    1.0
                }
            })
            .collect()
    }

    /// Replaces `A` by `D A D` with `D = diag(d)`.
    pub fn scale_symmetric(&mut self, d: &[f64]) {
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                self.vals[k] *= d[i] * d[self.col_idx[k]];
            }
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        Self { dim: n, row_ptr: (0..=n).collect(), col_idx: (0..n).collect(), vals: vec![C64::new(1.0, 0.0); n] }
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Entry `(i, j)` (zero if not stored).
    pub fn get(&self, i: usize, j: usize) -> C64 {
        let cols = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        match cols.binary_search(&j) {
            Ok(k) => self.vals[self.row_ptr[i] + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// `A x`.
    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .map(|k| self.vals[k] * x[self.col_idx[k]])
                    .sum()
            })
            .collect()
    }

    /// Plain transpose.
    pub fn transpose(&self) -> CsrMatrix {
        let mut t = ComplexTripletMatrix::new(self.dim);
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                t.add(self.col_idx[k], i, self.vals[k]);
            }
        }
        finalize(&t)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.vals[self.row_ptr[i]..self.row_ptr[i + 1]].iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        let mut s = vec![0.0; self.dim];
        for (k, &c) in self.col_idx.iter().enumerate() {
            s[c] += self.vals[k].norm();
        }
        s.into_iter().fold(0.0, f64::max)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                m = m.max((self.vals[k] - self.get(j, i)).norm());
            }
        }
        m
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<C64> {
        let mut d = vec![C64::new(0.0, 0.0); self.dim * self.dim];
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                d[i * self.dim + self.col_idx[k]] = self.vals[k];
            }
        }
        d
    }

    /// Writes the matrix in MatrixMarket coordinate complex general format.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate complex general")?;
        writeln!(w, "{} {} {}", self.dim, self.dim, self.nnz())?;
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                writeln!(w, "{} {} {:e} {:e}", i + 1, self.col_idx[k] + 1, self.vals[k].re, self.vals[k].im)?;
            }
        }
        Ok(())
    }
}

enum Factor {
    Sparse(faer::sparse::linalg::solvers::Lu<usize, C64>),
    Dense(DenseLu<C64>),
}

/// Reusable LU factorization of a square sparse matrix.
pub struct LuFactor {
    dim: usize,
    factor: Factor,
}

fn relative_residual(a: &CsrMatrix, x: &[C64], b: &[C64]) -> f64 {
    let ax = a.matvec(x);
    let r = ax.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
    let xn = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let an = a.norm_inf();
    if xn == 0.0 || an == 0.0 {
        return if r == 0.0 { 0.0 } else { f64::INFINITY };
    }
    r / (an * xn)
}

fn sparse_lu(a: &CsrMatrix) -> Result<faer::sparse::linalg::solvers::Lu<usize, C64>> {
    let sym = SymbolicSparseRowMatRef::new_checked(a.dim, a.dim, &a.row_ptr, None, &a.col_idx);
    let m = SparseRowMatRef::new(sym, &a.vals);
    m.sp_lu().map_err(|e| ScatterError::Singular(format!("sparse LU failed: {e:?}")))
}

impl LuFactor {
    /// Factors `a`, using the sparse LU and falling back to the dense LU for
    /// `dim <= DENSE_FALLBACK_MAX_DIM` when the sparse factorization fails or
    /// yields a non-finite or inaccurate solve on a probe right-hand side.
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let n = a.dim;
        let sparse_err = match sparse_lu(a) {
            Ok(lu) => {
                let f = LuFactor { dim: n, factor: Factor::Sparse(lu) };
                let probe: Vec<C64> = (0..n).map(|i| C64::new(1.0 + (i % 7) as f64, (i % 3) as f64 - 1.0)).collect();
                let x = f.solve(&probe);
                let res = relative_residual(a, &x, &probe);
                if x.iter().all(|v| v.is_finite()) && res < 1e-10 {
                    return Ok(f);
                }
                ScatterError::Singular(format!("sparse LU probe residual {res:e}"))
            }
            Err(e) => e,
        };
        if n > DENSE_FALLBACK_MAX_DIM {
            return Err(sparse_err);
        }
        let lu = DenseLu::factor(n, a.to_dense())?;
        Ok(LuFactor { dim: n, factor: Factor::Dense(lu) })
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        self.solve_impl(b, false, false)
    }

    /// Solves `Aᵀ x = b` (plain transpose).
    pub fn solve_transpose(&self, b: &[C64]) -> Vec<C64> {
        self.solve_impl(b, true, false)
    }

    /// Solves `Aᴴ x = b`.
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        self.solve_impl(b, true, true)
    }

    fn solve_impl(&self, b: &[C64], transpose: bool, conj: bool) -> Vec<C64> {
        assert_eq!(b.len(), self.dim, "right-hand side length");
        match &self.factor {
            Factor::Sparse(lu) => {
                let mut x = b.to_vec();
                let mat = MatMut::from_column_major_slice_mut(&mut x, self.dim, 1);
                let c = if conj { Conj::Yes } else { Conj::No };
                if transpose {
                    lu.solve_transpose_in_place_with_conj(c, mat);
                } else {
                    lu.solve_in_place_with_conj(c, mat);
                }
                x
            }
            Factor::Dense(lu) => {
                if !transpose {
                    lu.solve(b)
                } else if !conj {
                    lu.solve_transpose(b)
                } else {
                    let bc: Vec<C64> = b.iter().map(|v| v.conj()).collect();
                    lu.solve_transpose(&bc).into_iter().map(|v| v.conj()).collect()
                }
            }
        }
    }
}

/// Solves `A x = b`; fails when the relative residual
/// `‖Ax−b‖∞ / (‖A‖∞ ‖x‖∞)` exceeds `1e-10` after one refinement step.
pub fn solve(a: &CsrMatrix, b: &[C64]) -> Result<Vec<C64>> {
    let f = LuFactor::new(a)?;
    solve_with(&f, a, b)
}

/// Solves with an existing factorization of `a`, applying one step of
/// iterative refinement and checking the residual.
pub fn solve_with(f: &LuFactor, a: &CsrMatrix, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != a.dim {
        return Err(ScatterError::Domain(format!("rhs length {} for dimension {}", b.len(), a.dim)));
    }
    let mut x = f.solve(b);
    let ax = a.matvec(&x);
    let r: Vec<C64> = b.iter().zip(&ax).map(|(u, v)| u - v).collect();
    let dx = f.solve(&r);
    for (xi, di) in x.iter_mut().zip(&dx) {
        *xi += di;
    }
    let res = relative_residual(a, &x, b);
    if !x.iter().all(|v| v.is_finite()) || res > 1e-10 {
        return Err(ScatterError::Singular(format!("solve residual {res:e} exceeds 1e-10")));
    }
    Ok(x)
}

/// Estimate of `‖A‖₁ ‖A⁻¹‖₁` by the Hager/Higham method.
pub fn cond1_estimate(a: &CsrMatrix) -> Result<f64> {
    let f = LuFactor::new(a)?;
    Ok(a.norm_1() * inverse_norm1_estimate(&f))
}

/// Hager/Higham estimate of `‖A⁻¹‖₁` from a factorization.
pub fn inverse_norm1_estimate(f: &LuFactor) -> f64 {
    let n = f.dim();
    if n == 0 {
        return 0.0;
    }
    let norm1 = |v: &[C64]| v.iter().map(|z| z.norm()).sum::<f64>();
    let mut x = vec![C64::new(1.0 / n as f64, 0.0); n];
    let mut est = 0.0;
    let mut last_j = usize::MAX;
    for iter in 0..5 {
        let y = f.solve(&x);
        let new_est = norm1(&y);
        if iter > 0 && new_est <= est {
            break;
        }
        est = new_est;
        let xi: Vec<C64> = y
            .iter()
            .map(|v| if v.norm() > 0.0 { v / v.norm() } else { C64::new(1.0, 0.0) })
            .collect();
        let z = f.solve_adjoint(&xi);
        let (j, zmax) = z
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0, -1.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        let ztx: f64 = z.iter().zip(&x).map(|(zi, xi)| (zi.conj() * xi).re).sum();
        if iter > 0 && (zmax <= ztx || j == last_j) {
            break;
        }
        last_j = j;
        x = vec![C64::new(0.0, 0.0); n];
        x[j] = C64::new(1.0, 0.0);
    }
    let alt: Vec<C64> = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
            C64::new(s * (1.0 + t), 0.0)
        })
        .collect();
    let alt_est = 2.0 * norm1(&f.solve(&alt)) / (3.0 * n as f64);
    est.max(alt_est)
}


/// Solves `G x = b` for a real symmetric positive definite `G` given as
/// summed triplets (both triangles), with a complex right-hand side, by sparse
/// Cholesky. Fails with [`ScatterError::Singular`] when `G` is not positive definite.
pub fn spd_solve(dim: usize, entries: &[(usize, usize, f64)], b: &[C64]) -> Result<Vec<C64>> {
    use faer::sparse::{SparseColMat, Triplet};
    if b.len() != dim {
        return Err(ScatterError::Domain(format!("rhs length {} for dimension {dim}", b.len())));
    }
    let lower: Vec<Triplet<usize, usize, f64>> =
        entries.iter().filter(|e| e.0 >= e.1).map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
    let g = SparseColMat::<usize, f64>::try_new_from_triplets(dim, dim, &lower)
        .map_err(|e| ScatterError::Singular(format!("Gram matrix assembly failed: {e:?}")))?;
    let llt = g
        .sp_cholesky(faer::Side::Lower)
        .map_err(|e| ScatterError::Singular(format!("Cholesky failed: {e:?}")))?;
    let mut rhs: Vec<f64> = b.iter().map(|v| v.re).chain(b.iter().map(|v| v.im)).collect();
    llt.solve_in_place_with_conj(Conj::No, MatMut::from_column_major_slice_mut(&mut rhs, dim, 2));
    if !rhs.iter().all(|v| v.is_finite()) {
        return Err(ScatterError::Singular("Cholesky solve produced non-finite values".into()));
    }
    Ok((0..dim).map(|i| C64::new(rhs[i], rhs[dim + i])).collect())
}
