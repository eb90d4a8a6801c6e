//! Small dense complex linear algebra on top of `nalgebra`.

use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Singular values below this fraction of the largest mark a set as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

pub fn select_rows(m: &CMatrix, rows: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), m.ncols(), |r, c| m[(rows[r], c)])
}

pub fn hstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), b.nrows(), "hstack needs equal row counts");
    let k = a.ncols();
    CMatrix::from_fn(
        a.nrows(),
        k + b.ncols(),
        |r, c| {
            if c < k {
                a[(r, c)]
            } else {
                b[(r, c - k)]
            }
        },
    )
}

pub fn row(m: &CMatrix, i: usize) -> Vec<C64> {
    (0..m.ncols()).map(|c| m[(i, c)]).collect()
}

/// `sum_k a_k * conj(b_k)`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// `|h . w|^2` for row `i` of `h` and column `j` of `w`.
pub fn row_col_gain(h: &CMatrix, i: usize, w: &CMatrix, j: usize) -> f64 {
    (0..h.ncols()).map(|k| h[(i, k)] * w[(k, j)]).sum::<C64>().norm_sqr()
}

/// Ratio of smallest to largest singular value (0 for an all-zero matrix).
pub fn singular_value_ratio(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max > 0.0 {
        min / max
    } else {
        0.0
    }
}

/// Right pseudo-inverse of a wide, full-row-rank matrix, computed from its SVD.
pub fn right_pseudo_inverse(h: &CMatrix) -> Result<CMatrix> {
    let (n, k) = h.shape();
    if n == 0 || n > k {
        return Err(Error::RankDeficient { ratio: 0.0 });
    }
    let svd = h.clone().svd(true, true);
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let min = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let ratio = if max > 0.0 { min / max } else { 0.0 };
    if !(ratio >= RANK_TOLERANCE) {
        return Err(Error::RankDeficient { ratio });
    }
    let u = svd.u.as_ref().expect("svd computed with u");
    let v_t = svd.v_t.as_ref().expect("svd computed with v_t");
    // pinv = V diag(1/s) U^H
    let mut v_scaled = v_t.adjoint();
    for (c, s) in svd.singular_values.iter().enumerate() {
        v_scaled.column_mut(c).scale_mut(1.0 / s);
    }
    Ok(v_scaled * u.adjoint())
}

/// `ln det(a)` for a Hermitian positive definite matrix.
pub fn ln_det_hpd(a: CMatrix) -> Option<f64> {
    let chol = a.cholesky()?;
    let l = chol.l_dirty();
    Some((0..l.nrows()).map(|i| 2.0 * libm::log(l[(i, i)].re)).sum())
}
