//! Dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Default threshold below which an eigenvalue counts as zero.
pub const ZERO_TOL: f64 = 1e-9;

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
pub fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `f(M)` for symmetric `M`, through the eigenbasis.
pub fn sym_apply(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (values, vectors) = sym_eigen(m);
    let scaled = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |r, c| vectors[(r, c)] * f(values[c]));
    scaled * vectors.transpose()
}

/// Orthogonal projector onto the span of eigenvectors whose eigenvalue
/// satisfies `keep`.
pub fn spectral_projector(m: &DMatrix<f64>, keep: impl Fn(f64) -> bool) -> DMatrix<f64> {
    sym_apply(m, |x| if keep(x) { 1.0 } else { 0.0 })
}

pub fn kernel_projector(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    spectral_projector(m, |x| x.abs() <= tol)
}

pub fn range_projector(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    spectral_projector(m, |x| x.abs() > tol)
}

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank with a relative tolerance.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let s = singular_values(m);
    let scale = s.first().copied().unwrap_or(0.0).max(1.0);
    s.iter().filter(|&&x| x > tol * scale).count()
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    if m.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let scale = svd.singular_values.max().max(1.0);
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > tol * scale).collect();
    DMatrix::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Orthonormal eigenvectors of symmetric `m` whose eigenvalue satisfies `keep`.
pub fn eigen_basis(m: &DMatrix<f64>, keep: impl Fn(f64) -> bool) -> DMatrix<f64> {
    let (values, vectors) = sym_eigen(m);
    let cols: Vec<usize> = (0..values.len()).filter(|&i| keep(values[i])).collect();
    DMatrix::from_fn(m.nrows(), cols.len(), |r, c| vectors[(r, cols[c])])
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
}
