//! Dense complex linear algebra helpers on top of `nalgebra`, with `faer` for
//! the SVD.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest entry modulus, the `max |a_ij|` norm used by all tolerances here.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff_vec(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn to_faer(m: &CMatrix) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

/// Thin SVD through `faer`; `nalgebra`'s complex SVD loses accuracy on
/// rank-deficient input such as group-averaged projectors.
struct Svd {
    u: CMatrix,
    s: Vec<f64>,
    v: CMatrix,
}

fn thin_svd(m: &CMatrix) -> Svd {
    if m.is_empty() {
        return Svd {
            u: zeros(m.nrows(), 0),
            s: Vec::new(),
            v: zeros(m.ncols(), 0),
        };
    }
    let svd = to_faer(m).thin_svd().expect("SVD converges on finite input");
    let (u, v) = (svd.U(), svd.V());
    let n = u.ncols();
    let diag = svd.S().column_vector();
    Svd {
        u: CMatrix::from_fn(u.nrows(), n, |r, c| u[(r, c)]),
        s: (0..n).map(|i| diag[i].re).collect(),
        v: CMatrix::from_fn(v.nrows(), n, |r, c| v[(r, c)]),
    }
}

fn cut(s: &[f64], rel_tol: f64) -> f64 {
    rel_tol * s.iter().copied().fold(0.0, f64::max).max(1.0)
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s = thin_svd(m).s;
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Count of singular values above `rel_tol * max(sigma_max, 1)`.
///
/// The floor of 1 fits the matrices ranked here (projectors, whose nonzero
/// singular values are 1) and keeps a matrix of pure rounding noise at rank 0.
pub fn numerical_rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let cut = cut(&s, rel_tol);
    s.iter().filter(|&&v| v > cut).count()
}

/// Orthonormal basis of the column space, from the left singular vectors whose
/// singular values pass the same cut as [`numerical_rank`].
pub fn column_space(m: &CMatrix, rel_tol: f64) -> Vec<Vec<Complex64>> {
    let Svd { u, s, .. } = thin_svd(m);
    let cut = cut(&s, rel_tol);
    let mut keep: Vec<usize> = (0..s.len()).filter(|&i| s[i] > cut).collect();
    keep.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    keep.into_iter()
        .map(|i| u.column(i).iter().copied().collect())
        .collect()
}

/// Least-squares solution of `a x = b` for several right-hand sides.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: CMatrix,
    /// `sigma_max / sigma_min` of `a`.
    pub condition: f64,
    /// Largest entry of `a x - b`.
    pub residual: f64,
}

pub fn least_squares(a: &CMatrix, b: &CMatrix) -> LeastSquares {
    let Svd { u, s, v } = thin_svd(a);
    let top = s.iter().copied().fold(0.0, f64::max);
    let bottom = s.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if bottom > 0.0 { top / bottom } else { f64::INFINITY };
    let mut utb = u.adjoint() * b;
    for (i, &si) in s.iter().enumerate() {
        let inv = if si > top * 1e-15 { 1.0 / si } else { 0.0 };
        utb.row_mut(i).scale_mut(inv);
    }
    let solution = v * utb;
    let residual = max_abs_diff(&(a * &solution), b);
    LeastSquares {
        solution,
        condition,
        residual,
    }
}

/// Entries as `[re, im]` pairs, row by row.
pub fn entries_row_major(m: &CMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            out.push([z.re, z.im]);
        }
    }
    out
}

pub fn matrix_from_row_major(shape: [usize; 2], entries: &[[f64; 2]]) -> Result<CMatrix> {
    if entries.len() != shape[0] * shape[1] {
        return Err(Error::DimensionMismatch {
            expected: shape[0] * shape[1],
            got: entries.len(),
        });
    }
    Ok(CMatrix::from_fn(shape[0], shape[1], |r, c| {
        let [re, im] = entries[r * shape[1] + c];
        Complex64::new(re, im)
    }))
}

/// One `row,col,re,im` line per entry, row-major, after a header line.
/// Floats are printed in shortest round-trip form.
pub fn matrix_to_csv(m: &CMatrix) -> String {
    let mut s = String::from("row,col,re,im\n");
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            let _ = writeln!(s, "{r},{c},{:?},{:?}", z.re, z.im);
        }
    }
    s
}

pub fn mat_vec(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    let v = CVector::from_column_slice(v);
    (m * v).iter().copied().collect()
}
