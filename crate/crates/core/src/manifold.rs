//! Uniform interface over the five matrix manifolds.
//!
//! Points and tangent vectors carry their extrinsic matrix representative
//! and a [`ManifoldKind`] tag; every operation dispatches to the module of
//! the owning manifold. Each manifold accepts a subset of [`MetricTag`]s:
//!
//! | manifold | metrics |
//! |----------|---------|
//! | GL(n)    | euclidean (default), left_invariant |
//! | O(n)     | canonical (default), euclidean (identical) |
//! | SPD(n)   | natural |
//! | St(n,p)  | canonical (default), euclidean (no logarithm) |
//! | Gr(n,p)  | canonical (default), euclidean (identical) |
//!
//! Logarithms are only defined on part of each manifold: O(n) refuses
//! relative rotations with eigenvalue −1, the Stiefel logarithm is an
//! iteration guaranteed to converge when `‖U − Ũ‖₂ ≤ 0.09`, the
//! left-invariant GL(n) logarithm requires `A⁻¹B` normal, and GL(n) flat,
//! SPD and Grassmann logarithms are global.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gl::{self, GlPoint};
use crate::grassmann::{self, GrassmannPoint};
use crate::kernels::{self, orthonormality_residual, reciprocal_condition, symmetry_residual};
use crate::orthogonal::{self, OrthPoint};
use crate::spd::{self, SpdPoint};
use crate::stiefel::{self, StiefelPoint};
use crate::tol::{self, Tolerances};
use crate::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ManifoldKind {
    Gl,
    On,
    Spd,
    St,
    Gr,
}

impl ManifoldKind {
    pub const ALL: [ManifoldKind; 5] = [Self::Gl, Self::On, Self::Spd, Self::St, Self::Gr];

    pub fn id(self) -> &'static str {
        match self {
            Self::Gl => "gl",
            Self::On => "on",
            Self::Spd => "spd",
            Self::St => "st",
            Self::Gr => "gr",
        }
    }

    pub fn default_metric(self) -> MetricTag {
        match self {
            Self::Gl => MetricTag::Euclidean,
            Self::Spd => MetricTag::Natural,
            Self::On | Self::St | Self::Gr => MetricTag::Canonical,
        }
    }

    pub fn supports(self, metric: MetricTag) -> bool {
        use MetricTag::*;
        matches!(
            (self, metric),
            (Self::Gl, Euclidean | LeftInvariant)
                | (Self::On | Self::Gr | Self::St, Euclidean | Canonical)
                | (Self::Spd, Natural)
        )
    }

    /// Whether points are square matrices.
    pub fn is_square(self) -> bool {
        matches!(self, Self::Gl | Self::On | Self::Spd)
    }
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ManifoldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown manifold '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricTag {
    Euclidean,
    Canonical,
    Natural,
    LeftInvariant,
}

impl MetricTag {
    pub const ALL: [MetricTag; 4] = [Self::Euclidean, Self::Canonical, Self::Natural, Self::LeftInvariant];

    pub fn id(self) -> &'static str {
        match self {
            Self::Euclidean => "euclidean",
            Self::Canonical => "canonical",
            Self::Natural => "natural",
            Self::LeftInvariant => "left_invariant",
        }
    }
}

impl fmt::Display for MetricTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for MetricTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|m| m.id().eq_ignore_ascii_case(&norm))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown metric '{s}'")))
    }
}

/// A point on one of the manifolds, given by its matrix representative.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldPoint {
    kind: ManifoldKind,
    rep: DenseMatrix,
}

/// A tangent vector together with its base point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: ManifoldPoint,
    rep: DenseMatrix,
}

/// Residuals of the membership predicate. Fields that do not apply to the
/// manifold are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCheck {
    pub kind: ManifoldKind,
    /// `‖UᵀU − I‖_F` for O(n), St and Gr.
    pub orthonormality: Option<f64>,
    /// `‖A − Aᵀ‖_F` for SPD.
    pub symmetry: Option<f64>,
    /// Smallest eigenvalue of the symmetric part, for SPD.
    pub min_eigenvalue: Option<f64>,
    /// `σ_min / σ_max` for GL.
    pub rcond: Option<f64>,
    pub valid: bool,
}

/// Residual of the tangency predicate: `‖UᵀΔ + ΔᵀU‖_F` on O(n) and St,
/// `‖UᵀΔ‖_F` on Gr, `‖Δ − Δᵀ‖_F` on SPD and zero on GL.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentCheck {
    pub kind: ManifoldKind,
    pub residual: f64,
    pub valid: bool,
}

fn expected_shape(kind: ManifoldKind, rep: &DenseMatrix) -> Result<()> {
    let (r, c) = rep.shape();
    let ok = match kind {
        k if k.is_square() => r == c,
        _ => c >= 1 && c <= r,
    };
    if !ok {
        let expected = if kind.is_square() {
            "square"
        } else {
            "n x p with 1 <= p <= n"
        };
        return Err(Error::shape(expected, r, c));
    }
    Ok(())
}

/// Membership diagnostics; never fails.
pub fn check_point_matrix(kind: ManifoldKind, rep: &DenseMatrix, tols: Tolerances) -> PointCheck {
    let mut out = PointCheck {
        kind,
        orthonormality: None,
        symmetry: None,
        min_eigenvalue: None,
        rcond: None,
        valid: false,
    };
    if expected_shape(kind, rep).is_err() || kernels::ensure_finite(rep).is_err() {
        return out;
    }
    match kind {
        ManifoldKind::Gl => {
            let rc = reciprocal_condition(rep);
            out.rcond = Some(rc);
            out.valid = rc >= tol::SINGULARITY;
        }
        ManifoldKind::On | ManifoldKind::St | ManifoldKind::Gr => {
            let r = orthonormality_residual(rep);
            out.orthonormality = Some(r);
            out.valid = r <= tols.membership;
        }
        ManifoldKind::Spd => {
            let s = symmetry_residual(rep);
            out.symmetry = Some(s);
            let eig = kernels::sym_eig_unchecked(&kernels::sym_part(rep)).ok();
            out.min_eigenvalue = eig.as_ref().map(|e| e.min());
            out.valid = s <= tols.membership * rep.norm().max(1.0)
                && eig.is_some_and(|e| e.min() > tol::DEFINITENESS * e.max());
        }
    }
    out
}

impl ManifoldPoint {
    /// Validates `rep` against the membership predicate of `kind`.
    pub fn new(kind: ManifoldKind, rep: DenseMatrix) -> Result<Self> {
        Self::with_tolerance(kind, rep, Tolerances::default())
    }

    pub fn with_tolerance(kind: ManifoldKind, rep: DenseMatrix, tols: Tolerances) -> Result<Self> {
        expected_shape(kind, &rep)?;
        match kind {
            ManifoldKind::Gl => drop(GlPoint::new(rep.clone())?),
            ManifoldKind::On => drop(OrthPoint::with_tolerance(rep.clone(), tols.membership)?),
            ManifoldKind::Spd => drop(SpdPoint::with_tolerance(rep.clone(), tols.membership)?),
            ManifoldKind::St => drop(StiefelPoint::with_tolerance(rep.clone(), tols.membership)?),
            ManifoldKind::Gr => drop(GrassmannPoint::with_tolerance(rep.clone(), tols.membership)?),
        }
        Ok(ManifoldPoint { kind, rep })
    }

    /// Skips validation; for callers that have already checked the input or
    /// deliberately want to operate on slightly-off data.
    pub fn new_unchecked(kind: ManifoldKind, rep: DenseMatrix) -> Self {
        ManifoldPoint { kind, rep }
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn rep(&self) -> &DenseMatrix {
        &self.rep
    }

    pub fn into_rep(self) -> DenseMatrix {
        self.rep
    }

    pub fn shape(&self) -> (usize, usize) {
        self.rep.shape()
    }

    pub fn check(&self) -> PointCheck {
        check_point_matrix(self.kind, &self.rep, Tolerances::default())
    }

    fn gl(&self) -> GlPoint {
        GlPoint::new_unchecked(self.rep.clone())
    }

    fn on(&self) -> OrthPoint {
        OrthPoint::new_unchecked(self.rep.clone())
    }

    fn spd(&self) -> Result<SpdPoint> {
        // the SPD point caches A^{±1/2}, so it has to be rebuilt
        SpdPoint::with_tolerance(self.rep.clone(), f64::INFINITY)
    }

    fn st(&self) -> StiefelPoint {
        StiefelPoint::new_unchecked(self.rep.clone())
    }

    fn gr(&self) -> GrassmannPoint {
        GrassmannPoint::new_unchecked(self.rep.clone())
    }

    /// Same point for Gl/On/Spd/St (elementwise); same subspace for Gr.
    pub fn same_point(&self, other: &ManifoldPoint, tol: f64) -> bool {
        if self.kind != other.kind || self.shape() != other.shape() {
            return false;
        }
        match self.kind {
            ManifoldKind::Gr => self.gr().same_subspace(&other.gr(), tol),
            _ => (&self.rep - &other.rep).amax() <= tol,
        }
    }
}

impl TangentVector {
    /// Validates `rep` against the tangency predicate at `base`.
    pub fn new(base: ManifoldPoint, rep: DenseMatrix) -> Result<Self> {
        let check = tangent_check(&base, &rep)?;
        if !check.valid {
            let residual = check.residual;
            return Err(match base.kind {
                ManifoldKind::Gr => Error::NotHorizontal { residual },
                ManifoldKind::Spd => Error::NotSymmetric { residual },
                _ => Error::NotTangent { residual },
            });
        }
        Ok(TangentVector { base, rep })
    }

    pub fn new_unchecked(base: ManifoldPoint, rep: DenseMatrix) -> Self {
        TangentVector { base, rep }
    }

    pub fn zero(base: ManifoldPoint) -> Self {
        let (r, c) = base.shape();
        TangentVector {
            base,
            rep: DenseMatrix::zeros(r, c),
        }
    }

    pub fn base(&self) -> &ManifoldPoint {
        &self.base
    }

    pub fn rep(&self) -> &DenseMatrix {
        &self.rep
    }

    pub fn into_rep(self) -> DenseMatrix {
        self.rep
    }

    pub fn scaled(&self, t: f64) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            rep: &self.rep * t,
        }
    }

    pub fn check(&self) -> TangentCheck {
        tangent_check(&self.base, &self.rep).unwrap_or(TangentCheck {
            kind: self.base.kind,
            residual: f64::INFINITY,
            valid: false,
        })
    }
}

fn tangent_check(base: &ManifoldPoint, rep: &DenseMatrix) -> Result<TangentCheck> {
    if rep.shape() != base.shape() {
        let (r, c) = base.shape();
        return Err(Error::shape(format!("{r}x{c}"), rep.nrows(), rep.ncols()));
    }
    kernels::ensure_finite(rep)?;
    let residual = match base.kind {
        ManifoldKind::Gl => 0.0,
        ManifoldKind::On | ManifoldKind::St => {
            let m = base.rep.tr_mul(rep);
            (&m + m.transpose()).norm()
        }
        ManifoldKind::Spd => symmetry_residual(rep),
        ManifoldKind::Gr => base.rep.tr_mul(rep).norm(),
    };
    Ok(TangentCheck {
        kind: base.kind,
        residual,
        valid: residual <= tol::MEMBERSHIP * rep.norm().max(1.0),
    })
}

pub fn check_point(p: &ManifoldPoint) -> PointCheck {
    p.check()
}

pub fn check_tangent(p: &ManifoldPoint, v: &TangentVector) -> TangentCheck {
    tangent_check(p, &v.rep).unwrap_or(TangentCheck {
        kind: p.kind,
        residual: f64::INFINITY,
        valid: false,
    })
}

fn require_metric(kind: ManifoldKind, metric: MetricTag) -> Result<()> {
    if kind.supports(metric) {
        Ok(())
    } else {
        Err(Error::UnsupportedMetric { manifold: kind, metric })
    }
}

fn require_base(p: &ManifoldPoint, v: &TangentVector) -> Result<()> {
    if p.kind != v.base.kind || p.rep != v.base.rep {
        return Err(Error::BaseMismatch);
    }
    Ok(())
}

// Stiefel has no Euclidean-metric logarithm.
fn require_log(kind: ManifoldKind, metric: MetricTag) -> Result<()> {
    if kind == ManifoldKind::St && metric == MetricTag::Euclidean {
        return Err(Error::UnsupportedMetric { manifold: kind, metric });
    }
    Ok(())
}

fn require_same_kind(p: &ManifoldPoint, q: &ManifoldPoint) -> Result<()> {
    if p.kind != q.kind {
        return Err(Error::InvalidArgument(format!(
            "points on different manifolds ({} and {})",
            p.kind, q.kind
        )));
    }
    if p.shape() != q.shape() {
        let (r, c) = p.shape();
        return Err(Error::shape(format!("{r}x{c}"), q.rep.nrows(), q.rep.ncols()));
    }
    Ok(())
}

/// Riemannian inner product of two tangent vectors at the same base point.
pub fn inner(v: &TangentVector, w: &TangentVector, metric: MetricTag) -> Result<f64> {
    if v.base.kind != w.base.kind || v.base.rep != w.base.rep {
        return Err(Error::BaseMismatch);
    }
    let base = &v.base;
    require_metric(base.kind, metric)?;
    match (base.kind, metric) {
        (ManifoldKind::Gl, MetricTag::LeftInvariant) => gl::inner_left_invariant(&base.gl(), &v.rep, &w.rep),
        (ManifoldKind::Gl, _) => Ok(gl::inner_flat(&v.rep, &w.rep)),
        (ManifoldKind::On, _) => Ok(orthogonal::inner(&v.rep, &w.rep)),
        (ManifoldKind::Spd, _) => spd::inner_natural(&base.spd()?, &v.rep, &w.rep),
        (ManifoldKind::St, m) => stiefel::inner(&base.st(), &v.rep, &w.rep, m),
        (ManifoldKind::Gr, _) => Ok(grassmann::inner(&v.rep, &w.rep)),
    }
}

pub fn norm(v: &TangentVector, metric: MetricTag) -> Result<f64> {
    Ok(inner(v, v, metric)?.max(0.0).sqrt())
}

/// Riemannian exponential.
pub fn exp(p: &ManifoldPoint, v: &TangentVector, metric: MetricTag) -> Result<ManifoldPoint> {
    require_base(p, v)?;
    require_metric(p.kind, metric)?;
    if v.rep.iter().all(|&x| x == 0.0) {
        return Ok(p.clone());
    }
    let rep = match (p.kind, metric) {
        (ManifoldKind::Gl, MetricTag::LeftInvariant) => gl::exp_left_invariant(&p.gl(), &v.rep)?.into_matrix(),
        (ManifoldKind::Gl, _) => gl::exp_flat(&p.gl(), &v.rep)?.into_matrix(),
        (ManifoldKind::On, _) => orthogonal::exp(&p.on(), &v.rep)?.into_matrix(),
        (ManifoldKind::Spd, _) => spd::exp(&p.spd()?, &v.rep)?.into_matrix(),
        (ManifoldKind::St, MetricTag::Euclidean) => stiefel::exp_euclidean(&p.st(), &v.rep)?.into_matrix(),
        (ManifoldKind::St, _) => stiefel::exp_canonical(&p.st(), &v.rep)?.into_matrix(),
        (ManifoldKind::Gr, _) => grassmann::exp(&p.gr(), &v.rep)?.into_matrix(),
    };
    Ok(ManifoldPoint { kind: p.kind, rep })
}

/// `exp(p, t·v)`
pub fn geodesic(p: &ManifoldPoint, v: &TangentVector, t: f64, metric: MetricTag) -> Result<ManifoldPoint> {
    require_base(p, v)?;
    require_metric(p.kind, metric)?;
    match (p.kind, metric) {
        (ManifoldKind::Gl, MetricTag::LeftInvariant) => Ok(ManifoldPoint {
            kind: p.kind,
            rep: gl::geodesic_left_invariant(&p.gl(), &v.rep, t)?.into_matrix(),
        }),
        _ => exp(p, &v.scaled(t), metric),
    }
}

/// Riemannian logarithm with the default options of each manifold. The
/// Stiefel logarithm uses `τ = 1e−11`, 100 iterations; the Grassmann
/// logarithm is the Procrustes-aligned variant.
pub fn log(p: &ManifoldPoint, q: &ManifoldPoint, metric: MetricTag) -> Result<TangentVector> {
    log_with(p, q, metric, stiefel::LogOptions::default())
}

pub fn log_with(
    p: &ManifoldPoint,
    q: &ManifoldPoint,
    metric: MetricTag,
    st_opts: stiefel::LogOptions,
) -> Result<TangentVector> {
    require_same_kind(p, q)?;
    require_metric(p.kind, metric)?;
    require_log(p.kind, metric)?;
    if p.rep == q.rep {
        return Ok(TangentVector::zero(p.clone()));
    }
    let rep = match (p.kind, metric) {
        (ManifoldKind::Gl, MetricTag::LeftInvariant) => gl::log_left_invariant_normal(&p.gl(), &q.gl())?,
        (ManifoldKind::Gl, _) => gl::log_flat(&p.gl(), &q.gl())?.delta,
        (ManifoldKind::On, _) => orthogonal::log(&p.on(), &q.on())?,
        (ManifoldKind::Spd, _) => spd::log(&p.spd()?, &q.spd()?)?,
        (ManifoldKind::St, _) => stiefel::log_canonical(&p.st(), &q.st(), st_opts)?.delta,
        (ManifoldKind::Gr, _) => grassmann::log_modified(&p.gr(), &q.gr())?,
    };
    Ok(TangentVector { base: p.clone(), rep })
}

/// Riemannian distance. O(n), SPD and Gr use their closed forms; the others
/// measure the logarithm.
pub fn dist(p: &ManifoldPoint, q: &ManifoldPoint, metric: MetricTag) -> Result<f64> {
    require_same_kind(p, q)?;
    require_metric(p.kind, metric)?;
    require_log(p.kind, metric)?;
    if p.rep == q.rep {
        return Ok(0.0);
    }
    match (p.kind, metric) {
        (ManifoldKind::Gl, MetricTag::LeftInvariant) => gl::dist_left_invariant_normal(&p.gl(), &q.gl()),
        (ManifoldKind::Gl, _) => Ok(gl::dist_flat(&p.gl(), &q.gl())),
        (ManifoldKind::On, _) => orthogonal::dist(&p.on(), &q.on()),
        (ManifoldKind::Spd, _) => spd::dist(&p.spd()?, &q.spd()?),
        (ManifoldKind::St, _) => norm(&log(p, q, metric)?, metric),
        (ManifoldKind::Gr, _) => grassmann::dist(&p.gr(), &q.gr()),
    }
}

/// Orthogonal projection of an ambient matrix onto the tangent space.
pub fn project_tangent(p: &ManifoldPoint, ambient: &DenseMatrix) -> Result<TangentVector> {
    if ambient.shape() != p.shape() {
        let (r, c) = p.shape();
        return Err(Error::shape(format!("{r}x{c}"), ambient.nrows(), ambient.ncols()));
    }
    let rep = match p.kind {
        ManifoldKind::Gl => ambient.clone(),
        ManifoldKind::On => orthogonal::project_tangent(&p.on(), ambient),
        ManifoldKind::Spd => spd::project_tangent(ambient),
        ManifoldKind::St => stiefel::project_tangent(&p.st(), ambient),
        ManifoldKind::Gr => grassmann::project_tangent(&p.gr(), ambient),
    };
    Ok(TangentVector { base: p.clone(), rep })
}
