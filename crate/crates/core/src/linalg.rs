//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `Tr(AB)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Largest entry-wise modulus of `A − A†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// `S^{-1/2}` for a positive definite Hermitian `S`.
///
/// Returns `None` when the condition number exceeds `max_condition`.
pub fn hermitian_inverse_sqrt(s: &CMatrix, max_condition: f64) -> Option<CMatrix> {
    let (values, vectors) = hermitian_eigen(s);
    let lo = values[0];
    let hi = *values.last().unwrap();
    if lo <= 0.0 || hi / lo > max_condition {
        return None;
    }
    let n = s.nrows();
    let scaled = CMatrix::from_fn(n, n, |i, j| vectors[(i, j)] / values[j].sqrt());
    Some(&scaled * vectors.adjoint())
}

/// Sandwich `S^{-1/2} B S^{-1/2}` with the result re-hermitized.
pub fn sandwich(inv_sqrt: &CMatrix, b: &CMatrix) -> CMatrix {
    let m = inv_sqrt * b * inv_sqrt;
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub fn symmetric_eigen(m: &RMatrix) -> (Vec<f64>, RMatrix) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = RMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Singular values in descending order.
pub fn singular_values(m: &RMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    // thin SVD drops the trailing zeros of a wide matrix
    s.resize(m.ncols(), 0.0);
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Ratio of extreme singular values; infinite when the smallest vanishes.
pub fn condition_number(singular: &[f64]) -> f64 {
    match (singular.first(), singular.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

pub fn spectral_norm(m: &RMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Moore–Penrose pseudo-inverse of a real matrix with full column rank.
///
/// Returns `None` if the smallest singular value is below `rel_tol · s_max`.
pub fn full_rank_pseudo_inverse(m: &RMatrix, rel_tol: f64) -> Option<RMatrix> {
    let svd = m.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    if svd.singular_values.len() < m.ncols() || svd.singular_values.min() <= rel_tol * s_max {
        return None;
    }
    svd.pseudo_inverse(0.0).ok()
}

/// Inverse of a symmetric positive definite matrix through its eigenbasis.
pub fn spd_inverse(m: &RMatrix, rel_tol: f64) -> Option<RMatrix> {
    let (values, vectors) = symmetric_eigen(m);
    let hi = *values.last()?;
    if values[0] <= rel_tol * hi {
        return None;
    }
    let n = m.nrows();
    let scaled = RMatrix::from_fn(n, n, |i, j| vectors[(i, j)] / values[j]);
    Some(&scaled * vectors.transpose())
}

pub fn max_abs(m: &RMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

pub fn diag(v: &[f64]) -> RMatrix {
    RMatrix::from_diagonal(&DVector::from_column_slice(v))
}
