//! Dense row-major matrices and the handful of kernels the solvers need.
//!
//! Everything in the factorization models lives in a [`DenseMatrix`]: data,
//! labels, factors, masks and gradients. Signed values are allowed in the
//! type itself (gradients are signed); the nonnegative constructors are used
//! wherever a matrix is declared nonnegative.
//!
//! The `*_into` kernels write into preallocated outputs so the iteration loops
//! do not allocate.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SsnmfError};

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Problem dimensions: features, samples, classes and rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub n1: usize,
    pub n2: usize,
    pub k: usize,
    pub r: usize,
}

impl Shape {
    pub fn new(n1: usize, n2: usize, k: usize, r: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 || k == 0 || r == 0 {
            return Err(SsnmfError::Config(format!(
                "all dimensions must be >= 1, got n1={n1} n2={n2} k={k} r={r}"
            )));
        }
        Ok(Shape { n1, n2, k, r })
    }
}

impl DenseMatrix {
    /// Zero matrix. Used for scratch buffers, so it does not validate sizes.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 1.0)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data. Entries may be any finite real.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(SsnmfError::Config(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(SsnmfError::Config(format!(
                "data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(SsnmfError::Config(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Like [`from_vec`](Self::from_vec) but rejects negative entries.
    pub fn from_nonnegative(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        let m = Self::from_vec(rows, cols, data)?;
        m.check_nonnegative()?;
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != m) {
            return Err(SsnmfError::Config(format!(
                "ragged rows: row {bad} has {} entries, expected {m}",
                rows[bad].len()
            )));
        }
        Self::from_vec(n, m, rows.concat())
    }

    pub fn check_nonnegative(&self) -> Result<()> {
        match self.data.iter().position(|&v| v < 0.0) {
            Some(pos) => Err(SsnmfError::Negative {
                row: pos / self.cols,
                col: pos % self.cols,
                value: self.data[pos],
            }),
            None => Ok(()),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> DenseMatrix {
        self.map(|v| v * c)
    }

    /// Negative entries replaced by zero.
    pub fn clamp_nonnegative(&self) -> DenseMatrix {
        self.map(|v| v.max(0.0))
    }

    pub fn all_equal(&self, value: f64) -> bool {
        self.data.iter().all(|&v| v == value)
    }

    /// Columns `idx` in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            let src = self.row(i);
            for (c, &j) in idx.iter().enumerate() {
                out.data[i * idx.len() + c] = src[j];
            }
        }
        out
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, v) in sums.iter_mut().zip(self.row(i)) {
                *s += v;
            }
        }
        sums
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        same_shape("sub", self, other)?;
        Ok(zip_map(self, other, |a, b| a - b))
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        same_shape("add", self, other)?;
        Ok(zip_map(self, other, |a, b| a + b))
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            let row = self.row(i);
            let shown: Vec<String> = row.iter().take(8).map(|v| format!("{v:.6}")).collect();
            let more = if self.cols > 8 { ", ..." } else { "" };
            writeln!(f, "  [{}{more}]", shown.join(", "))?;
        }
        if self.rows > 8 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

pub(crate) fn same_shape(op: &'static str, a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(SsnmfError::Dimension {
            op,
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(())
}

fn zip_map(a: &DenseMatrix, b: &DenseMatrix, f: impl Fn(f64, f64) -> f64) -> DenseMatrix {
    DenseMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

/// Entrywise product.
pub fn hadamard(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    same_shape("hadamard", a, b)?;
    Ok(zip_map(a, b, |x, y| x * y))
}

/// Entrywise `a / (b + eps)`.
pub fn safe_divide(a: &DenseMatrix, b: &DenseMatrix, eps: f64) -> Result<DenseMatrix> {
    same_shape("safe_divide", a, b)?;
    check_eps(eps)?;
    Ok(zip_map(a, b, |x, y| x / (y + eps)))
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(SsnmfError::Config(format!(
            "divisor guard eps must be positive, got {eps}"
        )))
    }
}

pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.rows {
        return Err(SsnmfError::Dimension {
            op: "matmul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut out = DenseMatrix::zeros(a.rows, b.cols);
    matmul_into(a, b, &mut out);
    Ok(out)
}

pub fn transpose(a: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(a.cols, a.rows);
    for i in 0..a.rows {
        for j in 0..a.cols {
            out.data[j * a.rows + i] = a.data[i * a.cols + j];
        }
    }
    out
}

/// `out = a * b`. Shapes are the caller's responsibility.
pub(crate) fn matmul_into(a: &DenseMatrix, b: &DenseMatrix, out: &mut DenseMatrix) {
    debug_assert_eq!(a.cols, b.rows);
    debug_assert_eq!(out.shape(), (a.rows, b.cols));
    let n = b.cols;
    out.data.fill(0.0);
    for i in 0..a.rows {
        let arow = &a.data[i * a.cols..(i + 1) * a.cols];
        let orow = &mut out.data[i * n..(i + 1) * n];
        for (p, &aip) in arow.iter().enumerate() {
            if aip == 0.0 {
                continue;
            }
            axpy(aip, &b.data[p * n..(p + 1) * n], orow);
        }
    }
}

/// `out = aᵀ * b`.
pub(crate) fn matmul_tn_into(a: &DenseMatrix, b: &DenseMatrix, out: &mut DenseMatrix) {
    debug_assert_eq!(a.rows, b.rows);
    debug_assert_eq!(out.shape(), (a.cols, b.cols));
    let n = b.cols;
    out.data.fill(0.0);
    for p in 0..a.rows {
        let arow = &a.data[p * a.cols..(p + 1) * a.cols];
        let brow = &b.data[p * n..(p + 1) * n];
        for (i, &api) in arow.iter().enumerate() {
            if api == 0.0 {
                continue;
            }
            axpy(api, brow, &mut out.data[i * n..(i + 1) * n]);
        }
    }
}

/// `out = a * bᵀ`.
pub(crate) fn matmul_nt_into(a: &DenseMatrix, b: &DenseMatrix, out: &mut DenseMatrix) {
    debug_assert_eq!(a.cols, b.cols);
    debug_assert_eq!(out.shape(), (a.rows, b.rows));
    for i in 0..a.rows {
        let arow = &a.data[i * a.cols..(i + 1) * a.cols];
        for j in 0..b.rows {
            out.data[i * b.rows + j] = dot(arow, &b.data[j * b.cols..(j + 1) * b.cols]);
        }
    }
}

pub(crate) fn matmul_tn(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(a.cols, b.cols);
    matmul_tn_into(a, b, &mut out);
    out
}

pub(crate) fn matmul_nt(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(a.rows, b.rows);
    matmul_nt_into(a, b, &mut out);
    out
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Four independent accumulators so the reduction vectorizes.
#[inline]
pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let xc = x.chunks_exact(4);
    let yc = y.chunks_exact(4);
    let (xr, yr) = (xc.remainder(), yc.remainder());
    for (a, b) in xc.zip(yc) {
        acc[0] += a[0] * b[0];
        acc[1] += a[1] * b[1];
        acc[2] += a[2] * b[2];
        acc[3] += a[3] * b[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (a, b) in xr.iter().zip(yr) {
        s += a * b;
    }
    s
}
