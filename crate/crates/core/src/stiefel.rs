//! The Stiefel manifold St(n, p) of n×p matrices with orthonormal columns,
//! with the canonical metric `trace(Δᵀ(I − ½UUᵀ)Δ̃)` and the Euclidean metric
//! `trace(ΔᵀΔ̃)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernels::{
    self, exp_m, log_orthogonal, norm2, orthogonal_complete, orthonormality_residual, skew_part, thin_qr, thin_svd,
    SkewExp, ThinQR,
};
use crate::manifold::{ManifoldKind, MetricTag};
use crate::tol;
use crate::DenseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct StiefelPoint(DenseMatrix);

impl StiefelPoint {
    pub fn new(u: DenseMatrix) -> Result<Self> {
        Self::with_tolerance(u, tol::MEMBERSHIP)
    }

    pub fn with_tolerance(u: DenseMatrix, tol: f64) -> Result<Self> {
        kernels::ensure_finite(&u)?;
        if u.ncols() > u.nrows() || u.ncols() == 0 {
            return Err(Error::shape("n x p with 1 <= p <= n", u.nrows(), u.ncols()));
        }
        let residual = orthonormality_residual(&u);
        if residual > tol {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(StiefelPoint(u))
    }

    pub(crate) fn new_unchecked(u: DenseMatrix) -> Self {
        StiefelPoint(u)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.0
    }

    /// `(n, p)`
    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }
}

/// Options for [`log_canonical`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogOptions {
    pub tau: f64,
    pub max_iter: usize,
}

impl Default for LogOptions {
    fn default() -> Self {
        LogOptions {
            tau: 1e-11,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogReport {
    pub delta: DenseMatrix,
    /// Number of `V_k` updates performed.
    pub iterations: usize,
    /// `‖C_k‖₂` at termination.
    pub final_residual: f64,
    /// `‖C_k‖₂` for every visited `k`, starting with `k = 0`.
    pub history: Vec<f64>,
}

fn check_shape(u: &StiefelPoint, delta: &DenseMatrix) -> Result<()> {
    if delta.shape() != u.0.shape() {
        let (n, p) = u.shape();
        return Err(Error::shape(format!("{n}x{p}"), delta.nrows(), delta.ncols()));
    }
    Ok(())
}

/// `‖UᵀΔ + ΔᵀU‖_F`
pub fn tangency_residual(u: &StiefelPoint, delta: &DenseMatrix) -> f64 {
    let m = u.0.tr_mul(delta);
    (&m + m.transpose()).norm()
}

fn check_tangent(u: &StiefelPoint, delta: &DenseMatrix) -> Result<()> {
    check_shape(u, delta)?;
    kernels::ensure_finite(delta)?;
    let residual = tangency_residual(u, delta);
    if residual > tol::MEMBERSHIP * delta.norm().max(1.0) {
        return Err(Error::NotTangent { residual });
    }
    Ok(())
}

/// `U skew(UᵀT) + (I − UUᵀ)T`
pub fn project_tangent(u: &StiefelPoint, ambient: &DenseMatrix) -> DenseMatrix {
    let m = u.0.tr_mul(ambient);
    let normal = ambient - &u.0 * &m;
    &u.0 * skew_part(&m) + normal
}

pub fn inner(u: &StiefelPoint, delta: &DenseMatrix, other: &DenseMatrix, metric: MetricTag) -> Result<f64> {
    check_shape(u, delta)?;
    check_shape(u, other)?;
    match metric {
        MetricTag::Euclidean => Ok(delta.dot(other)),
        MetricTag::Canonical => {
            let a = u.0.tr_mul(delta);
            let b = u.0.tr_mul(other);
            Ok(delta.dot(other) - 0.5 * a.dot(&b))
        }
        other => Err(Error::UnsupportedMetric {
            manifold: ManifoldKind::St,
            metric: other,
        }),
    }
}

/// `sqrt(trace(Δᵀ(I − ½UUᵀ)Δ))`
pub fn canonical_norm(u: &StiefelPoint, delta: &DenseMatrix) -> Result<f64> {
    Ok(inner(u, delta, delta, MetricTag::Canonical)?.max(0.0).sqrt())
}

/// Canonical geodesic with the QR and the block eigendecomposition done up
/// front; evaluating it at a given `t` costs two n×p by p×p products.
#[derive(Debug, Clone)]
pub struct Geodesic {
    u: DenseMatrix,
    q: DenseMatrix,
    block: SkewExp,
}

impl Geodesic {
    pub fn new(u: &StiefelPoint, delta: &DenseMatrix) -> Result<Self> {
        check_tangent(u, delta)?;
        let p = u.0.ncols();
        let a = skew_part(&u.0.tr_mul(delta));
        let ThinQR { q, r } = thin_qr(&(delta - &u.0 * &a));
        let mut x = DMatrix::zeros(2 * p, 2 * p);
        x.view_mut((0, 0), (p, p)).copy_from(&a);
        x.view_mut((0, p), (p, p)).copy_from(&(-r.transpose()));
        x.view_mut((p, 0), (p, p)).copy_from(&r);
        Ok(Geodesic {
            u: u.0.clone(),
            q,
            block: SkewExp::new(&x)?,
        })
    }

    pub fn at(&self, t: f64) -> StiefelPoint {
        let p = self.u.ncols();
        let e = self.block.at(t);
        let m = e.view((0, 0), (p, p));
        let n = e.view((p, 0), (p, p));
        StiefelPoint(&self.u * m + &self.q * n)
    }
}

/// Canonical exponential `UM + QN`.
pub fn exp_canonical(u: &StiefelPoint, delta: &DenseMatrix) -> Result<StiefelPoint> {
    Ok(Geodesic::new(u, delta)?.at(1.0))
}

/// Euclidean exponential
/// `[U Δ] exp_m([[A, −ΔᵀΔ], [I, A]]) [I; 0] exp_m(−A)` with `A = UᵀΔ`.
pub fn exp_euclidean(u: &StiefelPoint, delta: &DenseMatrix) -> Result<StiefelPoint> {
    check_tangent(u, delta)?;
    let (n, p) = u.shape();
    let a = skew_part(&u.0.tr_mul(delta));
    let mut block = DMatrix::zeros(2 * p, 2 * p);
    block.view_mut((0, 0), (p, p)).copy_from(&a);
    block.view_mut((0, p), (p, p)).copy_from(&(-delta.tr_mul(delta)));
    block.view_mut((p, 0), (p, p)).fill_with_identity();
    block.view_mut((p, p), (p, p)).copy_from(&a);
    let e = exp_m(&block)?;
    let mut ud = DMatrix::zeros(n, 2 * p);
    ud.columns_mut(0, p).copy_from(&u.0);
    ud.columns_mut(p, p).copy_from(delta);
    let lead = ud * e.columns(0, p);
    Ok(StiefelPoint(lead * exp_m(&(-a))?))
}

/// Canonical logarithm by the fixed-point iteration on the orthogonal
/// completion `V_k = [[M, X_k], [N, Y_k]]`, which drives the lower-right
/// block `C_k` of `log_m(V_k)` to zero.
pub fn log_canonical(u: &StiefelPoint, u2: &StiefelPoint, opts: LogOptions) -> Result<LogReport> {
    check_shape(u, &u2.0)?;
    let p = u.0.ncols();
    let m = u.0.tr_mul(&u2.0);
    let ThinQR { q, r: nmat } = thin_qr(&(&u2.0 - &u.0 * &m));

    let mut block = DMatrix::zeros(2 * p, p);
    block.rows_mut(0, p).copy_from(&m);
    block.rows_mut(p, p).copy_from(&nmat);
    let mut v = orthogonal_complete(&block)?;
    align_completion(&mut v, p)?;

    let mut history = Vec::new();
    for k in 0..=opts.max_iter {
        let l = log_orthogonal(&v).map_err(|e| match e {
            Error::AntipodalSpectrum { .. } => Error::SpectrumOnBranchCut { re: -1.0, im: 0.0 },
            other => other,
        })?;
        let c = l.view((p, p), (p, p)).into_owned();
        let residual = norm2(&c);
        history.push(residual);
        if residual <= opts.tau {
            let a = l.view((0, 0), (p, p));
            let b = l.view((p, 0), (p, p));
            let delta = &u.0 * a + &q * b;
            return Ok(LogReport {
                delta,
                iterations: k,
                final_residual: residual,
                history,
            });
        }
        if k == opts.max_iter {
            break;
        }
        let phi = exp_m(&(-c))?;
        let updated = v.columns(p, p) * phi;
        v.columns_mut(p, p).copy_from(&updated);
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        history,
    })
}

/// Rotates the completion columns `[X; Y]` so that `Y` is as close to the
/// identity as possible while keeping `det V = +1`.
fn align_completion(v: &mut DenseMatrix, p: usize) -> Result<()> {
    let det_v = v.clone().lu().determinant().signum();
    let y = v.view((p, p), (p, p)).into_owned();
    let svd = thin_svd(&y)?;
    let mut w = svd.v;
    let base = &w * svd.u.transpose();
    if det_v * base.clone().lu().determinant() < 0.0 {
        w.column_mut(p - 1).neg_mut();
    }
    let rot = w * svd.u.transpose();
    let aligned = v.columns(p, p) * rot;
    v.columns_mut(p, p).copy_from(&aligned);
    Ok(())
}

/// Canonical length of the canonical logarithm.
pub fn dist_canonical(u: &StiefelPoint, u2: &StiefelPoint, opts: LogOptions) -> Result<f64> {
    let report = log_canonical(u, u2, opts)?;
    canonical_norm(u, &report.delta)
}
