//! The orthogonal group O(n) with its bi-invariant metric
//! `⟨Δ, Δ̃⟩_Q = trace(Δᵀ Δ̃)`.

use crate::error::{Error, Result};
use crate::kernels::{self, log_orthogonal, orthogonal_eigenangles, orthonormality_residual, skew_part, SkewExp};
use crate::tol;
use crate::DenseMatrix;

/// An orthogonal matrix together with the sign of its determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthPoint {
    q: DenseMatrix,
    component: i8,
}

impl OrthPoint {
    pub fn new(q: DenseMatrix) -> Result<Self> {
        Self::with_tolerance(q, tol::MEMBERSHIP)
    }

    pub fn with_tolerance(q: DenseMatrix, tol: f64) -> Result<Self> {
        kernels::ensure_square(&q)?;
        kernels::ensure_finite(&q)?;
        let residual = orthonormality_residual(&q);
        if residual > tol {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Self::new_unchecked(q))
    }

    pub(crate) fn new_unchecked(q: DenseMatrix) -> Self {
        let component = if q.nrows() > 0 && q.clone().lu().determinant() < 0.0 {
            -1
        } else {
            1
        };
        OrthPoint { q, component }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.q
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    /// `+1` on SO(n), `−1` on the other component.
    pub fn component(&self) -> i8 {
        self.component
    }
}

fn check_shape(q: &OrthPoint, delta: &DenseMatrix) -> Result<()> {
    if delta.shape() != q.q.shape() {
        return Err(Error::shape(
            format!("{n}x{n}", n = q.dim()),
            delta.nrows(),
            delta.ncols(),
        ));
    }
    Ok(())
}

/// `‖QᵀΔ + ΔᵀQ‖_F`
pub fn tangency_residual(q: &OrthPoint, delta: &DenseMatrix) -> f64 {
    let m = q.q.tr_mul(delta);
    (&m + m.transpose()).norm()
}

pub fn inner(delta: &DenseMatrix, other: &DenseMatrix) -> f64 {
    delta.dot(other)
}

/// `Q exp_m(QᵀΔ)`
pub fn exp(q: &OrthPoint, delta: &DenseMatrix) -> Result<OrthPoint> {
    check_shape(q, delta)?;
    kernels::ensure_finite(delta)?;
    let residual = tangency_residual(q, delta);
    if residual > tol::MEMBERSHIP * delta.norm().max(1.0) {
        return Err(Error::NotTangent { residual });
    }
    let v = skew_part(&q.q.tr_mul(delta));
    let e = SkewExp::new(&v)?.at(1.0);
    Ok(OrthPoint {
        q: &q.q * e,
        component: q.component,
    })
}

/// `Q log_m(QᵀQ̃)`
pub fn log(q: &OrthPoint, q2: &OrthPoint) -> Result<DenseMatrix> {
    check_shape(q, &q2.q)?;
    if q.component != q2.component {
        return Err(Error::ComponentMismatch);
    }
    let rel = q.q.tr_mul(&q2.q);
    Ok(&q.q * log_orthogonal(&rel)?)
}

/// `(Σ θ_k²)^{1/2}` over the eigenangles of `QᵀQ̃`.
pub fn dist(q: &OrthPoint, q2: &OrthPoint) -> Result<f64> {
    check_shape(q, &q2.q)?;
    if q.component != q2.component {
        return Err(Error::ComponentMismatch);
    }
    let angles = orthogonal_eigenangles(&q.q.tr_mul(&q2.q))?;
    Ok(angles.iter().map(|t| t * t).sum::<f64>().sqrt())
}

/// `Q skew(QᵀT)`
pub fn project_tangent(q: &OrthPoint, ambient: &DenseMatrix) -> DenseMatrix {
    &q.q * skew_part(&q.q.tr_mul(ambient))
}
