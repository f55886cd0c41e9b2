//! Dense matrix primitives shared by every manifold: matrix exponential and
//! logarithm, SPD square roots, polar and Procrustes factors, and the thin
//! QR / SVD / symmetric eigendecompositions with deterministic conventions.

mod expm;
mod logm;
mod svd;

pub use expm::{exp_m, SkewExp};
pub use logm::{log_m, log_orthogonal, orthogonal_eigenangles};
pub use svd::singular_values;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tol;
use crate::DenseMatrix;

const EIG_EPS: f64 = f64::EPSILON;
const EIG_MAX_ITER: usize = 10_000;

/// Thin QR factorization `x = q r` with `diag(r) >= 0`.
#[derive(Debug, Clone)]
pub struct ThinQR {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
}

/// Thin SVD `x = u diag(s) vᵀ`, singular values descending.
#[derive(Debug, Clone)]
pub struct ThinSVD {
    pub u: DenseMatrix,
    pub s: DVector<f64>,
    pub v: DenseMatrix,
}

/// Symmetric eigendecomposition `x = q diag(lambda) qᵀ`, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub q: DenseMatrix,
    pub lambda: DVector<f64>,
}

impl SymEig {
    /// Rebuilds `q diag(f(lambda)) qᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let mut scaled = self.q.clone();
        for (j, &l) in self.lambda.iter().enumerate() {
            let fl = f(l);
            scaled.column_mut(j).scale_mut(fl);
        }
        let out = scaled * self.q.transpose();
        sym_part(&out)
    }

    pub fn min(&self) -> f64 {
        self.lambda.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn ensure_finite(x: &DenseMatrix) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_square(x: &DenseMatrix) -> Result<()> {
    if x.is_square() {
        Ok(())
    } else {
        Err(Error::shape("square matrix", x.nrows(), x.ncols()))
    }
}

pub(crate) fn ensure_same_shape(a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.shape() == b.shape() {
        Ok(())
    } else {
        Err(Error::shape(
            format!("{}x{}", a.nrows(), a.ncols()),
            b.nrows(),
            b.ncols(),
        ))
    }
}

/// `(x + xᵀ) / 2`
pub fn sym_part(x: &DenseMatrix) -> DenseMatrix {
    (x + x.transpose()) * 0.5
}

/// `(x - xᵀ) / 2`
pub fn skew_part(x: &DenseMatrix) -> DenseMatrix {
    (x - x.transpose()) * 0.5
}

/// Spectral norm (largest singular value).
pub fn norm2(x: &DenseMatrix) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    singular_values(x).map_or(f64::NAN, |s| s[0])
}

/// Frobenius residual `‖xᵀx − I‖_F`.
pub fn orthonormality_residual(x: &DenseMatrix) -> f64 {
    let p = x.ncols();
    (x.tr_mul(x) - DenseMatrix::identity(p, p)).norm()
}

pub(crate) fn symmetry_residual(x: &DenseMatrix) -> f64 {
    (x - x.transpose()).norm()
}

pub(crate) fn is_symmetric(x: &DenseMatrix, rel: f64) -> bool {
    symmetry_residual(x) <= rel * x.norm()
}

pub(crate) fn is_skew(x: &DenseMatrix, rel: f64) -> bool {
    (x + x.transpose()).norm() <= rel * x.norm()
}

/// Solves `a x = b` by LU with a reciprocal-condition guard.
pub fn solve(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    ensure_square(a)?;
    if a.nrows() != b.nrows() {
        return Err(Error::shape(format!("{} rows", a.nrows()), b.nrows(), b.ncols()));
    }
    let rcond = reciprocal_condition(a);
    if rcond < tol::SINGULARITY {
        return Err(Error::SingularInput { rcond });
    }
    a.clone().lu().solve(b).ok_or(Error::SingularInput { rcond: 0.0 })
}

/// Solves `x a = b`, i.e. `x = b a⁻¹`.
pub fn solve_right(b: &DenseMatrix, a: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(solve(&a.transpose(), &b.transpose())?.transpose())
}

/// `σ_min / σ_max`, zero for empty or zero matrices.
pub fn reciprocal_condition(a: &DenseMatrix) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    let Ok(s) = singular_values(a) else {
        return 0.0;
    };
    let (max, min) = (s[0], s[s.len() - 1]);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

pub fn thin_qr(x: &DenseMatrix) -> ThinQR {
    let qr = x.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..r.nrows().min(r.ncols()) {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    ThinQR { q, r }
}

pub fn thin_svd(x: &DenseMatrix) -> Result<ThinSVD> {
    ensure_finite(x)?;
    svd::jacobi_svd(x)
}

pub fn sym_eig(x: &DenseMatrix) -> Result<SymEig> {
    ensure_square(x)?;
    let residual = symmetry_residual(x);
    if residual > tol::MEMBERSHIP * x.norm().max(1.0) {
        return Err(Error::NotSymmetric { residual });
    }
    sym_eig_unchecked(&sym_part(x))
}

pub(crate) fn sym_eig_unchecked(x: &DenseMatrix) -> Result<SymEig> {
    let eig = SymmetricEigen::try_new(x.clone(), EIG_EPS, EIG_MAX_ITER)
        .ok_or(Error::DecompositionFailed("symmetric eigendecomposition"))?;
    let order = descending_order(eig.eigenvalues.as_slice());
    Ok(SymEig {
        q: select_columns(&eig.eigenvectors, &order),
        lambda: DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i])),
    })
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    // stable: ties keep backend order
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

fn select_columns(m: &DenseMatrix, order: &[usize]) -> DenseMatrix {
    DMatrix::from_fn(m.nrows(), order.len(), |i, j| m[(i, order[j])])
}

/// Matrix exponential of a symmetric matrix via its eigendecomposition.
pub fn exp_sym(x: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(sym_eig(x)?.map(f64::exp))
}

/// Principal logarithm of an SPD matrix via its eigendecomposition.
pub fn log_spd(x: &DenseMatrix) -> Result<DenseMatrix> {
    let eig = spd_eig(x)?;
    Ok(eig.map(f64::ln))
}

/// The unique SPD square root.
pub fn spd_sqrt(a: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(spd_eig(a)?.map(f64::sqrt))
}

/// Eigendecomposition of a matrix required to be SPD.
pub(crate) fn spd_eig(a: &DenseMatrix) -> Result<SymEig> {
    let eig = sym_eig(a)?;
    let (min, max) = (eig.min(), eig.max());
    if !(min > tol::DEFINITENESS * max) || max <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    Ok(eig)
}

/// Polar factors `a = q p` with `q` orthogonal and `p` SPD.
pub fn polar_decompose(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    ensure_square(a)?;
    let svd = thin_svd(a)?;
    let max = svd.s.iter().copied().fold(0.0, f64::max);
    let min = svd.s.iter().copied().fold(f64::INFINITY, f64::min);
    let rcond = if max > 0.0 { min / max } else { 0.0 };
    if rcond < tol::SINGULARITY {
        return Err(Error::SingularInput { rcond });
    }
    let q = &svd.u * svd.v.transpose();
    let mut vs = svd.v.clone();
    for (j, &s) in svd.s.iter().enumerate() {
        vs.column_mut(j).scale_mut(s);
    }
    let p = sym_part(&(vs * svd.v.transpose()));
    Ok((q, p))
}

/// Orthogonal `R` minimizing `‖a − b R‖_F`.
pub fn procrustes_rotation(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    ensure_same_shape(a, b)?;
    let svd = thin_svd(&b.tr_mul(a))?;
    Ok(&svd.u * svd.v.transpose())
}

/// Extends a block with orthonormal columns to a square orthogonal matrix
/// whose leading columns are the block itself.
pub fn orthogonal_complete(block: &DenseMatrix) -> Result<DenseMatrix> {
    let (n, p) = block.shape();
    if p > n {
        return Err(Error::shape("tall block", n, p));
    }
    let residual = orthonormality_residual(block);
    if residual > tol::MEMBERSHIP {
        return Err(Error::NotOrthonormal { residual });
    }
    // Gram-Schmidt over the coordinate axes, always taking the axis with the
    // largest component outside the current span.
    let mut q = DMatrix::zeros(n, n);
    q.columns_mut(0, p).copy_from(block);
    let mut rest = DMatrix::<f64>::identity(n, n) - block * block.transpose();
    for j in p..n {
        let mut k = 0;
        for i in 1..n {
            if rest.column(i).norm_squared() > rest.column(k).norm_squared() {
                k = i;
            }
        }
        let mut col = rest.column(k).into_owned();
        for i in 0..j {
            let c = q.column(i).dot(&col);
            col.axpy(-c, &q.column(i), 1.0);
        }
        col /= col.norm();
        rest -= &col * col.transpose();
        q.set_column(j, &col);
    }
    Ok(q)
}
