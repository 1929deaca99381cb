//! Dense complex matrix helpers shared by every module.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

pub type C = Complex64;
pub type Mat = DMatrix<C>;
pub type Vector = DVector<C>;

pub const ZERO: C = C::new(0.0, 0.0);
pub const ONE: C = C::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C {
    C::new(re, 0.0)
}

/// Largest singular value; zero for empty matrices.
pub fn op_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Largest absolute entry.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_part(m: &Mat) -> Mat {
    (m + m.adjoint()) * r(0.5)
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn eigh(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), Mat::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vectors.set_column(j, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn eigvalsh(m: &Mat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = SymmetricEigen::new(hermitian_part(m))
        .eigenvalues
        .iter()
        .cloned()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Minimum eigenvalue of the Hermitian part; `+inf` for the empty matrix.
pub fn min_eigenvalue(m: &Mat) -> f64 {
    eigvalsh(m).first().cloned().unwrap_or(f64::INFINITY)
}

/// Positive square root of the Hermitian part, negative eigenvalues clamped to zero.
pub fn psd_sqrt(m: &Mat) -> Mat {
    let (vals, vecs) = eigh(m);
    let d = Mat::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| r(l.max(0.0).sqrt())),
    ));
    &vecs * d * vecs.adjoint()
}

fn full_svd_parts(a: &Mat) -> (Vec<f64>, Mat, Mat) {
    // Pad with zero rows so that V is square and spans the whole domain.
    let (rows, cols) = a.shape();
    let padded = if rows < cols {
        let mut p = Mat::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(true, true);
    let u = svd.u.expect("svd u");
    let v = svd.v_t.expect("svd v_t").adjoint();
    (svd.singular_values.iter().cloned().collect(), u, v)
}

/// Orthonormal basis (as columns) of the null space of `a`, deciding rank by
/// singular values below `rel_tol * sigma_max`.
pub fn null_space(a: &Mat, rel_tol: f64) -> Mat {
    let cols = a.ncols();
    if cols == 0 {
        return Mat::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return Mat::identity(cols, cols);
    }
    let (sv, _u, v) = full_svd_parts(a);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let cut = (rel_tol * smax).max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..cols).filter(|&i| sv.get(i).is_none_or(|&s| s <= cut)).collect();
    let mut out = Mat::zeros(cols, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &v.column(i));
    }
    out
}

/// Null space deciding rank by an absolute singular-value threshold.
pub fn null_space_abs(a: &Mat, abs_tol: f64) -> Mat {
    let cols = a.ncols();
    if cols == 0 {
        return Mat::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return Mat::identity(cols, cols);
    }
    let (sv, _u, v) = full_svd_parts(a);
    let keep: Vec<usize> = (0..cols).filter(|&i| sv.get(i).is_none_or(|&s| s <= abs_tol)).collect();
    let mut out = Mat::zeros(cols, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &v.column(i));
    }
    out
}

/// Orthonormal basis of the column space of `a`.
pub fn range_basis(a: &Mat, rel_tol: f64) -> Mat {
    let rows = a.nrows();
    if a.ncols() == 0 || rows == 0 {
        return Mat::zeros(rows, 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("svd u");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = (rel_tol * smax).max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cut)
        .collect();
    let mut out = Mat::zeros(rows, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &u.column(i));
    }
    out
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &Mat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    match Schur::new(m.clone()).eigenvalues() {
        Some(ev) => ev.iter().map(|z| z.norm()).fold(0.0, f64::max),
        // Fall back to Gelfand's formula on a high power.
        None => {
            let mut p = m.clone();
            let mut k = 1u32;
            while k < 64 {
                p = &p * &p;
                k *= 2;
            }
            op_norm(&p).powf(1.0 / k as f64)
        }
    }
}

pub fn block_diag(blocks: &[Mat]) -> Mat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Mat::zeros(rows, cols);
    let (mut i, mut j) = (0, 0);
    for b in blocks {
        out.view_mut((i, j), b.shape()).copy_from(b);
        i += b.nrows();
        j += b.ncols();
    }
    out
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = ONE;
    v
}

/// Matrix unit e_{pq} of size `rows x cols`.
pub fn matrix_unit(rows: usize, cols: usize, p: usize, q: usize) -> Mat {
    let mut m = Mat::zeros(rows, cols);
    m[(p, q)] = ONE;
    m
}

pub fn is_unitary(u: &Mat, tol: f64) -> (bool, f64) {
    if !u.is_square() {
        return (false, f64::INFINITY);
    }
    let n = u.nrows();
    let id = Mat::identity(n, n);
    let res = max_abs(&(u.adjoint() * u - &id)).max(max_abs(&(u * u.adjoint() - &id)));
    (res <= tol, res)
}
