//! Geodesic extrapolation `Exp_{p0}(μ* v0)` and its use on POD bases via the
//! derivative of the thin SVD.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::thin_svd;
use crate::manifold::{self, ManifoldPoint, MetricTag, TangentVector};
use crate::stiefel::{self, StiefelPoint};
use crate::tol;
use crate::DenseMatrix;

/// Relative gap `(σ_i − σ_j) / σ_1` below which singular values count as
/// repeated.
pub const DEGENERATE_GAP: f64 = 1e-8;

/// `Exp_{p0}(μ* v0)`
pub fn extrapolate_geodesic(
    p0: &ManifoldPoint,
    v0: &TangentVector,
    mu_star: f64,
    metric: MetricTag,
) -> Result<ManifoldPoint> {
    if v0.base().kind() != p0.kind() || v0.base().rep() != p0.rep() {
        return Err(Error::BaseMismatch);
    }
    let check = manifold::check_tangent(p0, v0);
    if !check.valid {
        return Err(Error::NotTangent {
            residual: check.residual,
        });
    }
    manifold::exp(p0, &v0.scaled(mu_star), metric)
}

/// Thin SVD `S = U Σ Zᵀ` at the expansion point together with the
/// derivatives of its leading `r` triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdDerivative {
    /// n×r
    pub u: DenseMatrix,
    /// r
    pub sigma: DVector<f64>,
    /// m×m
    pub z: DenseMatrix,
    /// r
    pub sigma_dot: DVector<f64>,
    /// m×r, `Z A`
    pub z_dot: DenseMatrix,
    /// n×r
    pub u_dot: DenseMatrix,
    /// m×r block of the skew coefficient matrix `A`.
    pub a: DenseMatrix,
}

/// Derivatives of all `m` singular triplets of an n×m matrix, `n ≥ m`.
pub fn svd_derivative(s: &DenseMatrix, s_dot: &DenseMatrix) -> Result<SvdDerivative> {
    svd_derivative_truncated(s, s_dot, s.ncols())
}

/// Derivatives of the leading `r` singular triplets:
///
/// `σ̇_j = u_jᵀ Ṡ v_j`, `Ż = Z A` with
/// `A_ij = (σ_j u_jᵀṠv_i + σ_i u_iᵀṠv_j) / ((σ_j + σ_i)(σ_j − σ_i))`,
/// `U̇ = (Ṡ Z + U(ΣA − Σ̇)) Σ⁻¹`.
///
/// Only the leading `r` singular values need to be nonzero and separated
/// from all others.
pub fn svd_derivative_truncated(s: &DenseMatrix, s_dot: &DenseMatrix, r: usize) -> Result<SvdDerivative> {
    let (n, m) = s.shape();
    if n < m {
        return Err(Error::shape("n x m with n >= m", n, m));
    }
    if s_dot.shape() != s.shape() {
        return Err(Error::shape(format!("{n}x{m}"), s_dot.nrows(), s_dot.ncols()));
    }
    if r == 0 || r > m {
        return Err(Error::InvalidArgument(format!("truncation rank {r} outside 1..={m}")));
    }
    let svd = thin_svd(s)?;
    let (u, sig, z) = (svd.u, svd.s, svd.v);
    let top = sig[0];
    for j in 0..r {
        if top == 0.0 || sig[j] <= tol::SINGULARITY * top {
            return Err(Error::SingularValueZero { index: j });
        }
    }
    for j in 0..r {
        for i in 0..m {
            if i == j {
                continue;
            }
            let gap = (sig[i] - sig[j]).abs() / top;
            if gap < DEGENERATE_GAP {
                return Err(Error::DegenerateSpectrum {
                    i: i.min(j),
                    j: i.max(j),
                    gap,
                });
            }
        }
    }

    // g_ij = u_iᵀ Ṡ v_j
    let sz = s_dot * &z;
    let g = u.tr_mul(&sz);
    let sigma_dot = DVector::from_fn(r, |j, _| g[(j, j)]);
    let a = DMatrix::from_fn(m, r, |i, j| {
        if i == j {
            0.0
        } else {
            (sig[j] * g[(j, i)] + sig[i] * g[(i, j)]) / ((sig[j] + sig[i]) * (sig[j] - sig[i]))
        }
    });
    let z_dot = &z * &a;
    let mut sa = a.clone();
    for i in 0..m {
        sa.row_mut(i).scale_mut(sig[i]);
    }
    for j in 0..r {
        sa[(j, j)] -= sigma_dot[j];
    }
    let mut u_dot = sz.columns(0, r) + &u * sa;
    for j in 0..r {
        u_dot.column_mut(j).scale_mut(1.0 / sig[j]);
    }
    Ok(SvdDerivative {
        u: u.columns(0, r).into_owned(),
        sigma: sig.rows(0, r).into_owned(),
        z,
        sigma_dot,
        z_dot,
        u_dot,
        a,
    })
}

#[derive(Debug, Clone)]
pub struct PodExtrapolation {
    pub basis: StiefelPoint,
    /// Truncated basis at the expansion point.
    pub u: DenseMatrix,
    /// Truncated derivative after projection onto the tangent space.
    pub u_dot: DenseMatrix,
    /// `‖U̇_r − P(U̇_r)‖_F`, the correction applied by the projection.
    pub tangency_repair: f64,
}

/// Extrapolated POD basis `Exp^{St}_{U_r}(μ* U̇_r)` from a snapshot matrix and
/// its parameter derivative.
pub fn extrapolate_pod_basis(s: &DenseMatrix, s_dot: &DenseMatrix, r: usize, mu_star: f64) -> Result<PodExtrapolation> {
    let d = svd_derivative_truncated(s, s_dot, r)?;
    let u = StiefelPoint::new(d.u.clone())?;
    let projected = stiefel::project_tangent(&u, &d.u_dot);
    let tangency_repair = (&projected - &d.u_dot).norm();
    let basis = stiefel::exp_canonical(&u, &(&projected * mu_star))?;
    Ok(PodExtrapolation {
        basis,
        u: d.u,
        u_dot: projected,
        tangency_repair,
    })
}
