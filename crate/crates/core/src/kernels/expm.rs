use nalgebra::{DMatrix, DVector};

use super::{ensure_finite, ensure_square, is_skew, is_symmetric, skew_part, sym_eig_unchecked, sym_part};
use crate::error::{Error, Result};
use crate::DenseMatrix;

const STRUCTURE_TOL: f64 = 1e-12;

// [13/13] Padé coefficients and the matching scaling threshold.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential.
///
/// Symmetric inputs go through the symmetric eigendecomposition and skew
/// inputs through [`SkewExp`], so that SPD and orthogonal outputs keep their
/// structure to working precision. Everything else uses scaling and squaring
/// around a degree-13 Padé approximant.
pub fn exp_m(x: &DenseMatrix) -> Result<DenseMatrix> {
    ensure_square(x)?;
    ensure_finite(x)?;
    if is_symmetric(x, STRUCTURE_TOL) {
        return Ok(sym_eig_unchecked(&sym_part(x))?.map(f64::exp));
    }
    if is_skew(x, STRUCTURE_TOL) {
        return Ok(SkewExp::new(&skew_part(x))?.at(1.0));
    }
    pade_exp(x)
}

fn norm1(x: &DenseMatrix) -> f64 {
    x.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn pade_exp(x: &DenseMatrix) -> Result<DenseMatrix> {
    let n = x.nrows();
    let nrm = norm1(x);
    let s = if nrm > THETA13 {
        (nrm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = x * 2f64.powi(-s);
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let inner_u = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u = &a * (inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let inner_v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];

    let mut r = (&v - &u)
        .lu()
        .solve(&(&v + &u))
        .ok_or(Error::DecompositionFailed("Padé denominator solve"))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// Spectral factorization of a skew-symmetric matrix, reusable for
/// `exp(t X)` at many `t`.
///
/// `X` is handled through the real form `[[0, -X], [X, 0]]` of the Hermitian
/// matrix `iX`, which is symmetric; `exp(tX)` is then assembled from the
/// cosine and sine of that form.
#[derive(Debug, Clone)]
pub struct SkewExp {
    top: DenseMatrix,
    bottom: DenseMatrix,
    lambda: DVector<f64>,
}

impl SkewExp {
    pub fn new(x: &DenseMatrix) -> Result<Self> {
        ensure_square(x)?;
        ensure_finite(x)?;
        let n = x.nrows();
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        h.view_mut((0, n), (n, n)).copy_from(&(-x));
        h.view_mut((n, 0), (n, n)).copy_from(x);
        let eig = sym_eig_unchecked(&sym_part(&h))?;
        Ok(SkewExp {
            top: eig.q.rows(0, n).into_owned(),
            bottom: eig.q.rows(n, n).into_owned(),
            lambda: eig.lambda,
        })
    }

    pub fn dim(&self) -> usize {
        self.top.nrows()
    }

    /// `exp(t X)`
    pub fn at(&self, t: f64) -> DenseMatrix {
        let mut left = DMatrix::zeros(self.top.nrows(), self.top.ncols());
        for (j, &l) in self.lambda.iter().enumerate() {
            let (s, c) = (t * l).sin_cos();
            let col = self.top.column(j) * c + self.bottom.column(j) * s;
            left.set_column(j, &col);
        }
        left * self.top.transpose()
    }
}
