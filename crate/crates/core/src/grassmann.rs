//! The Grassmann manifold Gr(n, p) of p-dimensional subspaces of ℝⁿ,
//! represented by n×p matrices with orthonormal columns. Tangent vectors are
//! horizontal lifts (`UᵀΔ = 0`).

use std::f64::consts::FRAC_PI_4;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::kernels::{self, orthonormality_residual, solve_right, thin_svd, ThinSVD};
use crate::tol;
use crate::DenseMatrix;

/// Threshold on `σ_min(UᵀŨ)` below which the standard logarithm refuses.
pub const OVERLAP_THRESHOLD: f64 = 1e-8;

/// A subspace, carried by one of its orthonormal bases. Any `U R` with `R`
/// orthogonal denotes the same point.
#[derive(Debug, Clone)]
pub struct GrassmannPoint(DenseMatrix);

impl GrassmannPoint {
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
        Ok(GrassmannPoint(u))
    }

    pub(crate) fn new_unchecked(u: DenseMatrix) -> Self {
        GrassmannPoint(u)
    }

    /// The representative; not unique for the subspace.
    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.0
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    /// Subspace equality: all principal angles below `tol`.
    pub fn same_subspace(&self, other: &GrassmannPoint, tol: f64) -> bool {
        self.shape() == other.shape()
            && principal_angles(self, other)
                .map(|a| a.theta.iter().all(|t| *t <= tol))
                .unwrap_or(false)
    }
}

/// Principal angles in `[0, π/2]`, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAngles {
    pub theta: Vec<f64>,
}

impl PrincipalAngles {
    pub fn norm(&self) -> f64 {
        self.theta.iter().map(|t| t * t).sum::<f64>().sqrt()
    }
}

fn check_shape(u: &GrassmannPoint, delta: &DenseMatrix) -> Result<()> {
    if delta.shape() != u.0.shape() {
        let (n, p) = u.shape();
        return Err(Error::shape(format!("{n}x{p}"), delta.nrows(), delta.ncols()));
    }
    Ok(())
}

/// `‖UᵀΔ‖_F`
pub fn horizontality_residual(u: &GrassmannPoint, delta: &DenseMatrix) -> f64 {
    u.0.tr_mul(delta).norm()
}

/// `(I − UUᵀ) T`
pub fn project_tangent(u: &GrassmannPoint, ambient: &DenseMatrix) -> DenseMatrix {
    ambient - &u.0 * u.0.tr_mul(ambient)
}

pub fn inner(delta: &DenseMatrix, other: &DenseMatrix) -> f64 {
    delta.dot(other)
}

fn scaled_columns(m: &DenseMatrix, s: &DVector<f64>, f: impl Fn(f64) -> f64) -> DenseMatrix {
    let mut out = m.clone();
    for (j, &v) in s.iter().enumerate() {
        out.column_mut(j).scale_mut(f(v));
    }
    out
}

/// `U V cos(Σ) Vᵀ + Q sin(Σ) Vᵀ` from the thin SVD `Δ = QΣVᵀ`.
pub fn exp(u: &GrassmannPoint, delta: &DenseMatrix) -> Result<GrassmannPoint> {
    check_shape(u, delta)?;
    kernels::ensure_finite(delta)?;
    let residual = horizontality_residual(u, delta);
    if residual > tol::MEMBERSHIP * delta.norm().max(1.0) {
        return Err(Error::NotHorizontal { residual });
    }
    let ThinSVD { u: q, s, v } = thin_svd(delta)?;
    let vt = v.transpose();
    let out = &u.0 * scaled_columns(&v, &s, f64::cos) * &vt + scaled_columns(&q, &s, f64::sin) * &vt;
    Ok(GrassmannPoint(out))
}

/// Standard logarithm: `L = (I − UUᵀ) Ũ (UᵀŨ)⁻¹ = QΣVᵀ`, `Δ = Q arctan(Σ) Vᵀ`.
///
/// Requires `UᵀŨ` to be invertible, i.e. no principal angle at `π/2`.
pub fn log(u: &GrassmannPoint, u2: &GrassmannPoint) -> Result<DenseMatrix> {
    check_shape(u, &u2.0)?;
    let m = u.0.tr_mul(&u2.0);
    let smallest = *kernels::singular_values(&m)?.last().expect("p >= 1");
    if smallest < OVERLAP_THRESHOLD {
        return Err(Error::RankDeficientOverlap {
            smallest_singular_value: smallest,
        });
    }
    let normal = &u2.0 - &u.0 * &m;
    let l = solve_right(&normal, &m).map_err(|_| Error::RankDeficientOverlap {
        smallest_singular_value: smallest,
    })?;
    let ThinSVD { u: q, s, v } = thin_svd(&l)?;
    let delta = scaled_columns(&q, &s, f64::atan) * v.transpose();
    Ok(project_tangent(u, &delta))
}

/// `Ũ* = Ũ Ψ Rᵀ` where `ŨᵀU = Ψ S Rᵀ`: the representative of `[Ũ]` closest
/// to `U`.
pub fn procrustes_representative(u: &GrassmannPoint, u2: &GrassmannPoint) -> Result<DenseMatrix> {
    check_shape(u, &u2.0)?;
    let ThinSVD { u: psi, v: r, .. } = thin_svd(&u2.0.tr_mul(&u.0))?;
    Ok(&u2.0 * (psi * r.transpose()))
}

/// Modified logarithm through the Procrustes representative:
/// `L = (I − UUᵀ) Ũ* = QΣVᵀ`, `Δ = Q arcsin(Σ) Vᵀ`.
///
/// Defined for every pair; `exp(u, Δ)` reproduces `Ũ*` as a matrix. At a
/// principal angle of exactly `π/2` the geodesic is not unique and the
/// returned one is whichever the SVD ordering selects.
pub fn log_modified(u: &GrassmannPoint, u2: &GrassmannPoint) -> Result<DenseMatrix> {
    let star = procrustes_representative(u, u2)?;
    let l = &star - &u.0 * u.0.tr_mul(&star);
    let ThinSVD { u: q, s, v } = thin_svd(&l)?;
    let delta = scaled_columns(&q, &s, |x| x.clamp(-1.0, 1.0).asin()) * v.transpose();
    Ok(project_tangent(u, &delta))
}

fn cosines(u: &GrassmannPoint, u2: &GrassmannPoint) -> DVector<f64> {
    let mut s = kernels::singular_values(&u.0.tr_mul(&u2.0)).unwrap_or_default();
    s.sort_by(|a, b| b.total_cmp(a));
    DVector::from_vec(s)
}

fn sines(u: &GrassmannPoint, u2: &GrassmannPoint) -> DVector<f64> {
    let p = u.0.ncols();
    let l = &u2.0 - &u.0 * u.0.tr_mul(&u2.0);
    let mut s = kernels::singular_values(&l).unwrap_or_default();
    s.resize(p, 0.0);
    s.sort_by(|a, b| a.total_cmp(b));
    DVector::from_vec(s)
}

/// `arccos` of the singular values of `UᵀŨ`, ascending.
pub fn angles_from_cosines(u: &GrassmannPoint, u2: &GrassmannPoint) -> Result<Vec<f64>> {
    check_shape(u, &u2.0)?;
    Ok(cosines(u, u2).iter().map(|c| c.clamp(-1.0, 1.0).acos()).collect())
}

/// `arcsin` of the singular values of `(I − UUᵀ)Ũ`, ascending.
pub fn angles_from_sines(u: &GrassmannPoint, u2: &GrassmannPoint) -> Result<Vec<f64>> {
    check_shape(u, &u2.0)?;
    Ok(sines(u, u2).iter().map(|s| s.clamp(-1.0, 1.0).asin()).collect())
}

/// Principal angles between the subspaces. Angles below `π/4` are taken
/// from the sines and the rest from the cosines, so that neither tiny nor
/// near-right angles lose accuracy.
pub fn principal_angles(u: &GrassmannPoint, u2: &GrassmannPoint) -> Result<PrincipalAngles> {
    check_shape(u, &u2.0)?;
    let from_cos = cosines(u, u2);
    let from_sin = sines(u, u2);
    let mut theta: Vec<f64> = from_cos
        .iter()
        .zip(from_sin.iter())
        .map(|(&c, &s)| {
            let small = s.clamp(0.0, 1.0).asin();
            if small < FRAC_PI_4 {
                small
            } else {
                c.clamp(-1.0, 1.0).acos()
            }
        })
        .collect();
    theta.sort_by(|a, b| a.total_cmp(b));
    Ok(PrincipalAngles { theta })
}

/// `(Σ θ_k²)^{1/2}` over the principal angles.
pub fn dist(u: &GrassmannPoint, u2: &GrassmannPoint) -> Result<f64> {
    Ok(principal_angles(u, u2)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::thin_qr;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DenseMatrix {
        DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
    }

    fn random_point(rng: &mut ChaCha8Rng, n: usize, p: usize) -> GrassmannPoint {
        GrassmannPoint::new(thin_qr(&gaussian(rng, n, p)).q).unwrap()
    }

    fn random_orthogonal(rng: &mut ChaCha8Rng, p: usize) -> DenseMatrix {
        thin_qr(&gaussian(rng, p, p)).q
    }

    fn cols(n: usize, c: &[&[f64]]) -> DenseMatrix {
        DMatrix::from_fn(n, c.len(), |i, j| c[j][i])
    }

    fn nearby(rng: &mut ChaCha8Rng, u: &GrassmannPoint, max_angle: f64) -> GrassmannPoint {
        let (n, p) = u.shape();
        let d = project_tangent(u, &gaussian(rng, n, p));
        let d = &d * (max_angle / kernels::norm2(&d));
        exp(u, &d).unwrap()
    }

    #[test]
    fn exp_examples() {
        let u = GrassmannPoint::new(cols(3, &[&[1.0, 0.0, 0.0]])).unwrap();
        let out = exp(&u, &DMatrix::zeros(3, 1)).unwrap();
        assert!(dist(&u, &out).unwrap() < 1e-14);

        let alpha: f64 = 0.8;
        let out = exp(&u, &cols(3, &[&[0.0, alpha, 0.0]])).unwrap();
        let target = GrassmannPoint::new(cols(3, &[&[alpha.cos(), alpha.sin(), 0.0]])).unwrap();
        assert!(out.same_subspace(&target, 1e-14));

        assert!(matches!(
            exp(&u, &cols(3, &[&[1.0, 0.0, 0.0]])),
            Err(Error::NotHorizontal { .. })
        ));
    }

    #[test]
    fn exp_stays_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_point(&mut rng, 200, 10);
        let d = project_tangent(&u, &gaussian(&mut rng, 200, 10));
        assert!(orthonormality_residual(exp(&u, &d).unwrap().matrix()) <= 1e-10);
    }

    #[test]
    fn log_examples() {
        let u = GrassmannPoint::new(cols(3, &[&[1.0, 0.0, 0.0]])).unwrap();
        assert!(log(&u, &u).unwrap().norm() == 0.0);
        assert!(log_modified(&u, &u).unwrap().norm() < 1e-15);
        let alpha: f64 = 0.6;
        let u2 = GrassmannPoint::new(cols(3, &[&[alpha.cos(), alpha.sin(), 0.0]])).unwrap();
        let expected = cols(3, &[&[0.0, alpha, 0.0]]);
        assert_relative_eq!(log(&u, &u2).unwrap(), expected, epsilon = 1e-15);
        assert_relative_eq!(log_modified(&u, &u2).unwrap(), expected, epsilon = 1e-15);

        let perp = GrassmannPoint::new(cols(3, &[&[0.0, 1.0, 0.0]])).unwrap();
        assert!(matches!(log(&u, &perp), Err(Error::RankDeficientOverlap { .. })));
        let d = log_modified(&u, &perp).unwrap();
        assert_relative_eq!(d.norm(), FRAC_PI_2, epsilon = 1e-15);
        assert!(exp(&u, &d).unwrap().same_subspace(&perp, 1e-14));
    }

    #[test]
    fn log_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let u = random_point(&mut rng, 12, 3);
            let u2 = nearby(&mut rng, &u, 1.2);
            let d = log(&u, &u2).unwrap();
            assert!(horizontality_residual(&u, &d) <= 1e-10);
            assert!(dist(&exp(&u, &d).unwrap(), &u2).unwrap() <= 1e-9);

            let dm = log_modified(&u, &u2).unwrap();
            assert!(horizontality_residual(&u, &dm) <= 1e-10);
            assert!((&dm - &d).norm() <= 1e-9);
            let star = procrustes_representative(&u, &u2).unwrap();
            assert!((exp(&u, &dm).unwrap().into_matrix() - star).norm() <= 1e-8);
        }
    }

    #[test]
    fn principal_angle_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_point(&mut rng, 6, 3);
        assert!(principal_angles(&u, &u).unwrap().theta.iter().all(|t| *t < 1e-15));

        let e1 = GrassmannPoint::new(cols(2, &[&[1.0, 0.0]])).unwrap();
        let e2 = GrassmannPoint::new(cols(2, &[&[0.0, 1.0]])).unwrap();
        assert_eq!(principal_angles(&e1, &e2).unwrap().theta, vec![FRAC_PI_2]);

        let beta: f64 = 0.4;
        let a = GrassmannPoint::new(cols(3, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]])).unwrap();
        let b = GrassmannPoint::new(cols(3, &[&[1.0, 0.0, 0.0], &[0.0, beta.cos(), beta.sin()]])).unwrap();
        let theta = principal_angles(&a, &b).unwrap().theta;
        assert!(theta[0].abs() < 1e-15);
        assert_relative_eq!(theta[1], beta, epsilon = 1e-15);
    }

    #[test]
    fn dist_examples() {
        let alpha: f64 = 1.1;
        let a = GrassmannPoint::new(cols(2, &[&[1.0, 0.0]])).unwrap();
        let b = GrassmannPoint::new(cols(2, &[&[alpha.cos(), alpha.sin()]])).unwrap();
        assert_relative_eq!(dist(&a, &b).unwrap(), alpha, epsilon = 1e-15);
        assert_eq!(dist(&a, &a).unwrap(), 0.0);

        let x = GrassmannPoint::new(cols(4, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]])).unwrap();
        let y = GrassmannPoint::new(cols(4, &[&[0.0, 0.0, 1.0, 0.0], &[0.0, 0.0, 0.0, 1.0]])).unwrap();
        assert_relative_eq!(dist(&x, &y).unwrap(), PI / 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn representative_invariance_and_sine_cosine_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let u = random_point(&mut rng, 9, 3);
            let u2 = random_point(&mut rng, 9, 3);
            let base = principal_angles(&u, &u2).unwrap();
            let ur = GrassmannPoint::new(u.matrix() * random_orthogonal(&mut rng, 3)).unwrap();
            let u2r = GrassmannPoint::new(u2.matrix() * random_orthogonal(&mut rng, 3)).unwrap();
            let moved = principal_angles(&ur, &u2r).unwrap();
            for (a, b) in base.theta.iter().zip(&moved.theta) {
                assert!((a - b).abs() <= 1e-10);
            }
            let sum_sin: f64 = angles_from_sines(&u, &u2).unwrap().iter().map(|t| t * t).sum();
            let sum_cos: f64 = angles_from_cosines(&u, &u2).unwrap().iter().map(|t| t * t).sum();
            assert!((sum_sin - sum_cos).abs() <= 1e-9);
            assert!(base.theta.windows(2).all(|w| w[0] <= w[1]));
            assert!(base.norm() <= (3f64).sqrt() * FRAC_PI_2 + 1e-15);
        }
    }

    #[test]
    fn tiny_angles_resolved_by_sines() {
        let u = GrassmannPoint::new(cols(2, &[&[1.0, 0.0]])).unwrap();
        let t: f64 = 1e-10;
        let u2 = GrassmannPoint::new(cols(2, &[&[t.cos(), t.sin()]])).unwrap();
        assert_relative_eq!(dist(&u, &u2).unwrap(), t, max_relative = 1e-6);
    }
}
