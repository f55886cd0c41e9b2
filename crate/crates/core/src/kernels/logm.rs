use nalgebra::{DMatrix, Schur};

use super::{
    ensure_finite, ensure_square, is_symmetric, orthonormality_residual, skew_part, solve, sym_eig_unchecked, sym_part,
};
use crate::error::{Error, Result};
use crate::tol;
use crate::DenseMatrix;

const STRUCTURE_TOL: f64 = 1e-12;
const ORTHOGONAL_ROUTE_TOL: f64 = 1e-10;

// 8-point Gauss–Legendre rule on [-1, 1].
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Principal matrix logarithm.
///
/// Symmetric input is handled spectrally, orthogonal input through
/// [`log_orthogonal`] (exactly skew result), and anything else by inverse
/// scaling and squaring: repeated square roots until `‖X − I‖₁ ≤ 1/4`, a
/// Gauss–Legendre rational approximation of `log(I + E)`, then rescaling.
pub fn log_m(x: &DenseMatrix) -> Result<DenseMatrix> {
    ensure_square(x)?;
    ensure_finite(x)?;
    let n = x.nrows();
    if n == 0 {
        return Ok(x.clone());
    }
    if is_symmetric(x, STRUCTURE_TOL) {
        let eig = sym_eig_unchecked(&sym_part(x))?;
        let min = eig.min();
        if min <= 0.0 || min <= f64::EPSILON * eig.max() {
            return Err(Error::SpectrumOnBranchCut { re: min, im: 0.0 });
        }
        return Ok(eig.map(f64::ln));
    }
    if orthonormality_residual(x) <= ORTHOGONAL_ROUTE_TOL {
        return log_orthogonal(x).map_err(|e| match e {
            Error::AntipodalSpectrum { angle } => Error::SpectrumOnBranchCut {
                re: angle.cos(),
                im: angle.sin(),
            },
            other => other,
        });
    }
    check_branch_cut(x)?;
    inverse_scaling_squaring(x)
}

fn check_branch_cut(x: &DenseMatrix) -> Result<()> {
    // Schur may fail on clustered spectra; the square-root iteration is the
    // fallback guard in that case.
    let Some(schur) = Schur::try_new(x.clone(), f64::EPSILON, 2_000) else {
        return Ok(());
    };
    let scale = x.norm().max(f64::MIN_POSITIVE);
    for l in schur.complex_eigenvalues().iter() {
        let on_axis = l.im.abs() <= 1e-12 * l.norm().max(1e-300);
        if (on_axis && l.re <= 0.0) || l.norm() <= f64::EPSILON * scale {
            return Err(Error::SpectrumOnBranchCut { re: l.re, im: l.im });
        }
    }
    Ok(())
}

fn norm1(x: &DenseMatrix) -> f64 {
    x.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn inverse_scaling_squaring(x: &DenseMatrix) -> Result<DenseMatrix> {
    let n = x.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut y = x.clone();
    let mut k = 0;
    while norm1(&(&y - &id)) > 0.25 {
        y = sqrt_denman_beavers(&y)?;
        k += 1;
        if k > 64 {
            return Err(Error::DecompositionFailed("inverse scaling and squaring"));
        }
    }
    let e = &y - &id;
    let mut acc = DMatrix::zeros(n, n);
    for (&node, &w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        for s in [0.5 * (1.0 - node), 0.5 * (1.0 + node)] {
            let denom = &id + &e * s;
            let term = solve(&denom, &e)?;
            acc += term * (0.5 * w);
        }
    }
    Ok(acc * 2f64.powi(k))
}

/// Principal square root by the product form of the Denman–Beavers iteration.
fn sqrt_denman_beavers(x: &DenseMatrix) -> Result<DenseMatrix> {
    let n = x.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut m = x.clone();
    let mut y = x.clone();
    for _ in 0..100 {
        let minv = m
            .clone()
            .try_inverse()
            .ok_or(Error::DecompositionFailed("matrix square root"))?;
        y = &y * (&id + &minv) * 0.5;
        m = (&id + (&m + &minv) * 0.5) * 0.5;
        if !m.iter().all(|v| v.is_finite()) {
            break;
        }
        if norm1(&(&m - &id)) <= 1e-15 * n as f64 {
            return Ok(y);
        }
    }
    Err(Error::DecompositionFailed("matrix square root"))
}

/// Real form `[[0, -C], [C, 0]]` of the Hermitian matrix `iC` for skew `C`.
fn hermitian_form(c: &DenseMatrix) -> DenseMatrix {
    let n = c.nrows();
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    h.view_mut((0, n), (n, n)).copy_from(&(-c));
    h.view_mut((n, 0), (n, n)).copy_from(c);
    sym_part(&h)
}

fn cayley(q: &DenseMatrix) -> Result<DenseMatrix> {
    let n = q.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    Ok(skew_part(&solve(&(&id + q), &(&id - q))?))
}

/// Largest eigenangle of an orthogonal matrix, read from `cos θ` = eigenvalues
/// of its symmetric part.
fn max_angle(q: &DenseMatrix) -> Result<f64> {
    let eig = sym_eig_unchecked(&sym_part(q))?;
    Ok(eig.min().clamp(-1.0, 1.0).acos())
}

/// Logarithm of an orthogonal matrix, returned exactly skew-symmetric.
///
/// Fails with `AntipodalSpectrum` when an eigenangle exceeds `π − 1e−6`.
pub fn log_orthogonal(q: &DenseMatrix) -> Result<DenseMatrix> {
    ensure_square(q)?;
    let n = q.nrows();
    if n == 0 {
        return Ok(q.clone());
    }
    let angle = max_angle(q)?;
    if angle > std::f64::consts::PI - tol::ANTIPODAL {
        return Err(Error::AntipodalSpectrum { angle });
    }
    // Cayley transform: eigenvalue e^{iθ} ↦ −i·tan(θ/2), and θ = 2·arctan(t)
    // on the eigenvalues t of iC.
    let c = cayley(q)?;
    let eig = sym_eig_unchecked(&hermitian_form(&c))?;
    let top = eig.q.rows(0, n);
    let bottom = eig.q.rows(n, n);
    let mut scaled = bottom.into_owned();
    for (j, &t) in eig.lambda.iter().enumerate() {
        scaled.column_mut(j).scale_mut(2.0 * t.atan());
    }
    let l = -(scaled * top.transpose());
    Ok(skew_part(&l))
}

/// Magnitudes of the eigenangles `|θ_k| ∈ [0, π]` of an orthogonal matrix,
/// one per eigenvalue, sorted descending.
pub fn orthogonal_eigenangles(q: &DenseMatrix) -> Result<Vec<f64>> {
    ensure_square(q)?;
    let n = q.nrows();
    let sym = sym_eig_unchecked(&sym_part(q))?;
    let mut angles: Vec<f64> = if sym.min() > -0.5 {
        let c = cayley(q)?;
        let eig = sym_eig_unchecked(&hermitian_form(&c))?;
        let mut doubled: Vec<f64> = eig.lambda.iter().map(|t| (2.0 * t.atan()).abs()).collect();
        doubled.sort_by(|a, b| b.total_cmp(a));
        doubled.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
    } else {
        sym.lambda.iter().map(|c| c.clamp(-1.0, 1.0).acos()).collect()
    };
    angles.sort_by(|a, b| b.total_cmp(a));
    debug_assert_eq!(angles.len(), n);
    Ok(angles)
}
