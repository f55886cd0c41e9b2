//! Symmetric positive definite matrices with the natural (affine-invariant)
//! metric `⟨Δ, Δ̃⟩_A = trace(A⁻¹ Δ A⁻¹ Δ̃)`.

use nalgebra::Cholesky;

use crate::error::{Error, Result};
use crate::kernels::{self, exp_sym, log_spd, spd_eig, sym_eig_unchecked, sym_part, symmetry_residual};
use crate::tol;
use crate::DenseMatrix;

/// An SPD matrix with `A^{1/2}` and `A^{−1/2}` precomputed from a single
/// symmetric eigendecomposition.
#[derive(Debug, Clone)]
pub struct SpdPoint {
    a: DenseMatrix,
    sqrt: DenseMatrix,
    inv_sqrt: DenseMatrix,
}

impl PartialEq for SpdPoint {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a
    }
}

impl SpdPoint {
    pub fn new(a: DenseMatrix) -> Result<Self> {
        Self::with_tolerance(a, tol::MEMBERSHIP)
    }

    pub fn with_tolerance(a: DenseMatrix, tol: f64) -> Result<Self> {
        kernels::ensure_square(&a)?;
        kernels::ensure_finite(&a)?;
        let residual = symmetry_residual(&a);
        if residual > tol * a.norm().max(1.0) {
            return Err(Error::NotSymmetric { residual });
        }
        let a = sym_part(&a);
        let eig = spd_eig(&a)?;
        Ok(SpdPoint {
            sqrt: eig.map(f64::sqrt),
            inv_sqrt: eig.map(|l| 1.0 / l.sqrt()),
            a,
        })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.a
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn sqrt(&self) -> &DenseMatrix {
        &self.sqrt
    }

    pub fn inv_sqrt(&self) -> &DenseMatrix {
        &self.inv_sqrt
    }

    fn whiten(&self, x: &DenseMatrix) -> DenseMatrix {
        sym_part(&(&self.inv_sqrt * x * &self.inv_sqrt))
    }

    fn color(&self, x: &DenseMatrix) -> DenseMatrix {
        sym_part(&(&self.sqrt * x * &self.sqrt))
    }
}

fn check_shape(a: &SpdPoint, delta: &DenseMatrix) -> Result<()> {
    if delta.shape() != a.a.shape() {
        return Err(Error::shape(
            format!("{n}x{n}", n = a.dim()),
            delta.nrows(),
            delta.ncols(),
        ));
    }
    Ok(())
}

fn check_symmetric(delta: &DenseMatrix) -> Result<()> {
    kernels::ensure_finite(delta)?;
    let residual = symmetry_residual(delta);
    if residual > tol::MEMBERSHIP * delta.norm().max(1.0) {
        return Err(Error::NotSymmetric { residual });
    }
    Ok(())
}

/// `trace(A⁻¹ Δ A⁻¹ Δ̃)` with `A⁻¹` applied through a Cholesky solve.
pub fn inner_natural(a: &SpdPoint, delta: &DenseMatrix, other: &DenseMatrix) -> Result<f64> {
    check_shape(a, delta)?;
    check_shape(a, other)?;
    let chol = Cholesky::new(a.a.clone()).ok_or(Error::NotPositiveDefinite {
        min_eigenvalue: f64::NAN,
    })?;
    let x = chol.solve(delta);
    let y = chol.solve(other);
    // trace(XY) = Σ_ij X_ij Y_ji
    Ok(x.dot(&y.transpose()))
}

/// `A^{1/2} exp_m(A^{−1/2} Δ A^{−1/2}) A^{1/2}`
pub fn exp(a: &SpdPoint, delta: &DenseMatrix) -> Result<SpdPoint> {
    check_shape(a, delta)?;
    check_symmetric(delta)?;
    let b = a.color(&exp_sym(&a.whiten(delta))?);
    SpdPoint::new(b)
}

/// `A^{1/2} log_m(A^{−1/2} B A^{−1/2}) A^{1/2}`
pub fn log(a: &SpdPoint, b: &SpdPoint) -> Result<DenseMatrix> {
    check_shape(a, &b.a)?;
    Ok(a.color(&log_spd(&a.whiten(&b.a))?))
}

/// `‖log_m(A^{−1/2} B A^{−1/2})‖_F`, from the eigenvalues of the whitened matrix.
pub fn dist(a: &SpdPoint, b: &SpdPoint) -> Result<f64> {
    check_shape(a, &b.a)?;
    let eig = sym_eig_unchecked(&a.whiten(&b.a))?;
    if eig.min() <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: eig.min(),
        });
    }
    Ok(eig.lambda.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt())
}

/// `‖log_m(A) − log_m(B)‖_F`
pub fn dist_log_euclidean(a: &SpdPoint, b: &SpdPoint) -> Result<f64> {
    check_shape(a, &b.a)?;
    Ok((log_spd(&a.a)? - log_spd(&b.a)?).norm())
}

pub fn project_tangent(ambient: &DenseMatrix) -> DenseMatrix {
    sym_part(ambient)
}
