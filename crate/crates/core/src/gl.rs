//! The general linear group GL(n) with two geometries: the flat Euclidean
//! one (geodesics are straight lines) and the left-invariant metric
//! `⟨Δ, Δ̃⟩_A = ⟨A⁻¹Δ, A⁻¹Δ̃⟩₀`, whose geodesics have a closed form but whose
//! logarithm is only available when `A⁻¹B` is normal.

use crate::error::{Error, Result};
use crate::kernels::{self, exp_m, log_m, reciprocal_condition, solve};
use crate::tol;
use crate::DenseMatrix;

/// An invertible square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GlPoint(DenseMatrix);

impl GlPoint {
    pub fn new(a: DenseMatrix) -> Result<Self> {
        kernels::ensure_square(&a)?;
        kernels::ensure_finite(&a)?;
        let rcond = reciprocal_condition(&a);
        if rcond < tol::SINGULARITY {
            return Err(Error::SingularInput { rcond });
        }
        Ok(GlPoint(a))
    }

    pub(crate) fn new_unchecked(a: DenseMatrix) -> Self {
        GlPoint(a)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Sign of the determinant, i.e. the connected component.
    pub fn component(&self) -> i8 {
        if self.0.clone().lu().determinant() < 0.0 {
            -1
        } else {
            1
        }
    }

    /// `A⁻¹ Δ`, the left-translated velocity.
    pub fn translate_to_identity(&self, delta: &DenseMatrix) -> Result<DenseMatrix> {
        solve(&self.0, delta).map_err(|_| Error::SingularBase)
    }
}

/// Result of the flat logarithm. The straight segment always exists in the
/// ambient space; `crosses_components` flags that it passes through a
/// singular matrix because the endpoints have determinants of opposite sign.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatLog {
    pub delta: DenseMatrix,
    pub crosses_components: bool,
}

fn check_shape(a: &GlPoint, delta: &DenseMatrix) -> Result<()> {
    if delta.shape() != a.0.shape() {
        return Err(Error::shape(
            format!("{n}x{n}", n = a.dim()),
            delta.nrows(),
            delta.ncols(),
        ));
    }
    Ok(())
}

/// `A + Δ`
pub fn exp_flat(a: &GlPoint, delta: &DenseMatrix) -> Result<GlPoint> {
    check_shape(a, delta)?;
    let b = &a.0 + delta;
    let rcond = reciprocal_condition(&b);
    if rcond < tol::SINGULARITY {
        return Err(Error::LeftManifold { rcond });
    }
    Ok(GlPoint(b))
}

/// `B − A`
pub fn log_flat(a: &GlPoint, b: &GlPoint) -> Result<FlatLog> {
    check_shape(a, &b.0)?;
    Ok(FlatLog {
        delta: &b.0 - &a.0,
        crosses_components: a.component() != b.component(),
    })
}

pub fn dist_flat(a: &GlPoint, b: &GlPoint) -> f64 {
    (&b.0 - &a.0).norm()
}

pub fn inner_flat(delta: &DenseMatrix, other: &DenseMatrix) -> f64 {
    delta.dot(other)
}

/// `trace((A⁻¹Δ)ᵀ (A⁻¹Δ̃))`
pub fn inner_left_invariant(a: &GlPoint, delta: &DenseMatrix, other: &DenseMatrix) -> Result<f64> {
    check_shape(a, delta)?;
    check_shape(a, other)?;
    let v = a.translate_to_identity(delta)?;
    let w = a.translate_to_identity(other)?;
    Ok(v.dot(&w))
}

/// `t ↦ A exp_m(t Vᵀ) exp_m(t (V − Vᵀ))` with `V = A⁻¹Δ`.
pub fn geodesic_left_invariant(a: &GlPoint, delta: &DenseMatrix, t: f64) -> Result<GlPoint> {
    check_shape(a, delta)?;
    let v = a.translate_to_identity(delta)?;
    let first = exp_m(&(v.transpose() * t))?;
    let second = exp_m(&((&v - v.transpose()) * t))?;
    Ok(GlPoint(&a.0 * first * second))
}

pub fn exp_left_invariant(a: &GlPoint, delta: &DenseMatrix) -> Result<GlPoint> {
    geodesic_left_invariant(a, delta, 1.0)
}

/// Left-invariant logarithm in the special case where `A⁻¹B` is normal:
/// `Δ = A log_m(A⁻¹B)`.
pub fn log_left_invariant_normal(a: &GlPoint, b: &GlPoint) -> Result<DenseMatrix> {
    check_shape(a, &b.0)?;
    let rel = a.translate_to_identity(&b.0)?;
    let residual = (&rel * rel.transpose() - rel.transpose() * &rel).norm();
    let scale = rel.norm_squared();
    if residual > tol::MEMBERSHIP * scale {
        return Err(Error::NotNormal { residual });
    }
    let l = log_m(&rel)?;
    Ok(&a.0 * l)
}

/// Left-invariant length of `log_left_invariant_normal(a, b)`.
pub fn dist_left_invariant_normal(a: &GlPoint, b: &GlPoint) -> Result<f64> {
    let delta = log_left_invariant_normal(a, b)?;
    Ok(inner_left_invariant(a, &delta, &delta)?.max(0.0).sqrt())
}
