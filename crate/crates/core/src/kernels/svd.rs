//! One-sided Jacobi SVD. nalgebra's bidiagonal SVD returns factors that do
//! not reconstruct some rank-deficient inputs, so every SVD goes through here.

use nalgebra::{DMatrix, DVector};

use super::ThinSVD;
use crate::error::{Error, Result};
use crate::DenseMatrix;

const MAX_SWEEPS: usize = 80;

pub(crate) fn jacobi_svd(x: &DenseMatrix) -> Result<ThinSVD> {
    if x.nrows() < x.ncols() {
        let t = jacobi_svd(&x.transpose())?;
        return Ok(ThinSVD { u: t.v, s: t.s, v: t.u });
    }
    let (n, p) = x.shape();
    let mut a = x.clone();
    let mut v = DMatrix::<f64>::identity(p, p);
    // columns below this norm are rounding noise and cannot be orthogonalized
    let floor = (f64::EPSILON * x.norm()).powi(2);
    let mut converged = p < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for i in 0..p {
            for j in i + 1..p {
                let alpha = a.column(i).norm_squared();
                let beta = a.column(j).norm_squared();
                let gamma = a.column(i).dot(&a.column(j));
                if alpha.min(beta) <= floor || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::DecompositionFailed("SVD"));
    }

    let norms: Vec<f64> = (0..p).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = DMatrix::zeros(n, p);
    let mut vs = DMatrix::zeros(p, p);
    let mut s = DVector::zeros(p);
    for (k, &j) in order.iter().enumerate() {
        s[k] = norms[j];
        vs.set_column(k, &v.column(j));
        let mut col = if norms[j] > 0.0 {
            a.column(j) / norms[j]
        } else {
            DVector::zeros(n)
        };
        // re-orthogonalize; columns of tiny singular values carry rounding
        for _ in 0..2 {
            for i in 0..k {
                let c = u.column(i).dot(&col);
                col.axpy(-c, &u.column(i), 1.0);
            }
        }
        let len = col.norm();
        if len < 0.5 {
            col = complement_axis(&u, k);
        } else {
            col /= len;
        }
        u.set_column(k, &col);
    }
    Ok(ThinSVD { u, s, v: vs })
}

fn rotate(m: &mut DenseMatrix, i: usize, j: usize, c: f64, s: f64) {
    for r in 0..m.nrows() {
        let (x, y) = (m[(r, i)], m[(r, j)]);
        m[(r, i)] = c * x - s * y;
        m[(r, j)] = s * x + c * y;
    }
}

// Unit vector orthogonal to the first k columns of u, from the coordinate
// axis with the largest component outside their span.
fn complement_axis(u: &DenseMatrix, k: usize) -> DVector<f64> {
    let n = u.nrows();
    let lead = u.columns(0, k);
    let mut best = DVector::zeros(n);
    let mut best_len = -1.0;
    for axis in 0..n {
        let mut e = DVector::zeros(n);
        e[axis] = 1.0;
        for _ in 0..2 {
            let c = lead.tr_mul(&e);
            e -= lead * c;
        }
        let len = e.norm();
        if len > best_len {
            best_len = len;
            best = e;
        }
    }
    best / best_len
}

/// Singular values, descending.
pub fn singular_values(x: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(jacobi_svd(x)?.s.iter().copied().collect())
}
