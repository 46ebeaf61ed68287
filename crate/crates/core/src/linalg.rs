//! Dense small-matrix kernels sized for the `n, k <= ~12` regime.
//!
//! Everything here feeds a rank decision somewhere in the criticality
//! machinery, so the factorization of record is a Householder QR with column
//! pivoting: `A P = Q R` with `|r_00| >= |r_11| >= ...`, from which rank,
//! nullspaces, solves and minimum-norm least squares all follow with one
//! shared relative tolerance.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is numerically singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        debug_assert!(rows.iter().all(|row| row.len() == c));
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Columns given as vectors.
    pub fn from_cols(cols: &[Vec<f64>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |col| col.len());
        debug_assert!(cols.iter().all(|col| col.len() == r));
        let mut m = Matrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Append `other`'s columns to the right: `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:>12.6e}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Result of a column-pivoted Householder QR: `A P = Q R`.
///
/// `q` has orthonormal columns (`m x min(m,n)`), `r` is upper triangular with
/// nonincreasing `|r_ii|`, and `perm[j]` is the original index of the column
/// now in position `j`.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    pub q: Matrix,
    pub r: Matrix,
    pub perm: Vec<usize>,
}

pub fn qr_pivoted(a: &Matrix) -> PivotedQr {
    let m = a.rows;
    let n = a.cols;
    let t = m.min(n);
    let mut work = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    // Reflectors stored as (start row, v); applied later to build Q.
    let mut reflectors: Vec<(usize, Vec<f64>)> = Vec::with_capacity(t);

    for step in 0..t {
        // Pivot: the remaining column with the largest trailing norm.
        let mut best = step;
        let mut best_norm = 0.0;
        for j in step..n {
            let norm2: f64 = (step..m).map(|i| work[(i, j)] * work[(i, j)]).sum();
            if norm2 > best_norm {
                best_norm = norm2;
                best = j;
            }
        }
        if best != step {
            for i in 0..m {
                let tmp = work[(i, step)];
                work[(i, step)] = work[(i, best)];
                work[(i, best)] = tmp;
            }
            perm.swap(step, best);
        }
        if best_norm == 0.0 {
            // Trailing block is exactly zero; remaining R rows stay zero.
            break;
        }
        // Householder vector for the trailing part of column `step`.
        let mut v: Vec<f64> = (step..m).map(|i| work[(i, step)]).collect();
        let alpha = -v[0].signum() * v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            // Apply I - 2 v v^T / (v^T v) to the trailing block.
            for j in step..n {
                let dot: f64 = (step..m).map(|i| v[i - step] * work[(i, j)]).sum();
                let scale = 2.0 * dot / vnorm2;
                for i in step..m {
                    work[(i, j)] -= scale * v[i - step];
                }
            }
            // Clean the annihilated entries to exact zeros.
            work[(step, step)] = alpha;
            for i in (step + 1)..m {
                work[(i, step)] = 0.0;
            }
            reflectors.push((step, v));
        }
    }

    let mut r = Matrix::zeros(t, n);
    for i in 0..t {
        for j in i..n {
            r[(i, j)] = work[(i, j)];
        }
    }
    // Q = H_1 ... H_t applied to the first t columns of the identity.
    let mut q = Matrix::zeros(m, t);
    for j in 0..t {
        q[(j, j)] = 1.0;
    }
    for (start, v) in reflectors.iter().rev() {
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        for j in 0..t {
            let dot: f64 = (*start..m).map(|i| v[i - start] * q[(i, j)]).sum();
            let scale = 2.0 * dot / vnorm2;
            for i in *start..m {
                q[(i, j)] -= scale * v[i - start];
            }
        }
    }
    PivotedQr { q, r, perm }
}

/// Numerical rank: significant diagonal entries of the pivoted `R` relative
/// to `|r_00|`. The zero matrix has rank 0.
pub fn rank(a: &Matrix, rtol: f64) -> usize {
    debug_assert!(rtol > 0.0);
    rank_from_qr(&qr_pivoted(a), rtol)
}

fn rank_from_qr(qr: &PivotedQr, rtol: f64) -> usize {
    let t = qr.r.rows();
    if t == 0 {
        return 0;
    }
    let r00 = qr.r[(0, 0)].abs();
    if r00 == 0.0 {
        return 0;
    }
    (0..t).take_while(|&i| qr.r[(i, i)].abs() > rtol * r00).count()
}

/// Orthonormal basis of the numerical kernel of `a`; `cols - rank` vectors.
pub fn nullspace(a: &Matrix, rtol: f64) -> Vec<Vec<f64>> {
    let n = a.cols;
    let qr = qr_pivoted(a);
    let r = rank_from_qr(&qr, rtol);
    if r == n {
        return Vec::new();
    }
    let d = n - r;
    // In pivoted coordinates the kernel is spanned by [-R11^{-1} R12; I].
    let mut basis = Matrix::zeros(n, d);
    for c in 0..d {
        let mut y = vec![0.0; r];
        for i in 0..r {
            y[i] = -qr.r[(i, r + c)];
        }
        // Back-substitute R11 x = y.
        for i in (0..r).rev() {
            let mut acc = y[i];
            for j in (i + 1)..r {
                acc -= qr.r[(i, j)] * y[j];
            }
            y[i] = acc / qr.r[(i, i)];
        }
        for i in 0..r {
            basis[(qr.perm[i], c)] = y[i];
        }
        basis[(qr.perm[r + c], c)] = 1.0;
    }
    // Orthonormalize; the basis has full column rank by construction.
    let bq = qr_pivoted(&basis);
    let mut out = Vec::with_capacity(d);
    for c in 0..d {
        let mut v = bq.q.col(c);
        normalize_sign(&mut v);
        out.push(v);
    }
    out
}

fn normalize_sign(v: &mut [f64]) {
    let mut lead = 0.0_f64;
    for &x in v.iter() {
        if x.abs() > lead.abs() {
            lead = x;
        }
    }
    if lead < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Solve the square system `a x = b` via pivoted QR.
///
/// A rank deficiency at `rtol` is reported as [`LinalgError::Singular`]; for
/// the KKT Jacobian this signals membership in the degenerate set.
pub fn solve(a: &Matrix, b: &[f64], rtol: f64) -> Result<Vec<f64>, LinalgError> {
    if a.rows != a.cols {
        return Err(LinalgError::DimensionMismatch(format!(
            "solve needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    if b.len() != a.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "rhs length {} vs {} rows",
            b.len(),
            a.rows
        )));
    }
    let n = a.rows;
    let qr = qr_pivoted(a);
    if rank_from_qr(&qr, rtol) < n {
        return Err(LinalgError::Singular);
    }
    // y = Q^T b, then R z = y, then undo the permutation.
    let mut y = vec![0.0; n];
    for j in 0..n {
        y[j] = (0..n).map(|i| qr.q[(i, j)] * b[i]).sum();
    }
    for i in (0..n).rev() {
        let mut acc = y[i];
        for j in (i + 1)..n {
            acc -= qr.r[(i, j)] * y[j];
        }
        y[i] = acc / qr.r[(i, i)];
    }
    let mut x = vec![0.0; n];
    for j in 0..n {
        x[qr.perm[j]] = y[j];
    }
    Ok(x)
}

/// Minimum-norm least-squares solution of `a x ~ b` (rank-deficient allowed).
///
/// Among all minimizers of `||a x - b||` this returns the one of smallest
/// norm, via a second QR on the transposed leading rows of `R`.
pub fn lstsq_min_norm(a: &Matrix, b: &[f64], rtol: f64) -> Vec<f64> {
    debug_assert_eq!(b.len(), a.rows);
    let n = a.cols;
    let qr = qr_pivoted(a);
    let r = rank_from_qr(&qr, rtol);
    if r == 0 {
        return vec![0.0; n];
    }
    // c = (Q^T b)[0..r]
    let mut c = vec![0.0; r];
    for j in 0..r {
        c[j] = (0..a.rows).map(|i| qr.q[(i, j)] * b[i]).sum();
    }
    // Minimum-norm solution of R_r z = c with R_r = R[0..r, :]:
    // factor R_r^T P2 = Q2 R2, solve R2^T w = P2^T c, z = Q2 w.
    let mut rt = Matrix::zeros(n, r);
    for i in 0..r {
        for j in 0..n {
            rt[(j, i)] = qr.r[(i, j)];
        }
    }
    let qr2 = qr_pivoted(&rt);
    let mut cp = vec![0.0; r];
    for (pos, &orig) in qr2.perm.iter().enumerate() {
        cp[pos] = c[orig];
    }
    // Forward-substitute R2^T w = cp (R2^T is lower triangular).
    let mut w = vec![0.0; r];
    for i in 0..r {
        let mut acc = cp[i];
        for j in 0..i {
            acc -= qr2.r[(j, i)] * w[j];
        }
        w[i] = acc / qr2.r[(i, i)];
    }
    let mut z = vec![0.0; n];
    for i in 0..n {
        z[i] = (0..r).map(|j| qr2.q[(i, j)] * w[j]).sum();
    }
    let mut x = vec![0.0; n];
    for j in 0..n {
        x[qr.perm[j]] = z[j];
    }
    x
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}
