//! Random points and tangent vectors for tests and benchmarks.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::kernels::{exp_sym, reciprocal_condition, sym_part, thin_qr};
use crate::manifold::{self, ManifoldKind, ManifoldPoint, MetricTag, TangentVector};
use crate::DenseMatrix;

/// Matrix with i.i.d. standard normal entries.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// n×p matrix with orthonormal columns, Haar-distributed.
pub fn orthonormal<R: Rng + ?Sized>(rng: &mut R, n: usize, p: usize) -> DenseMatrix {
    thin_qr(&gaussian(rng, n, p)).q
}

/// Random point; `p` is ignored for the square manifolds.
pub fn point<R: Rng + ?Sized>(rng: &mut R, kind: ManifoldKind, n: usize, p: usize) -> ManifoldPoint {
    let rep = match kind {
        ManifoldKind::Gl => loop {
            let g = gaussian(rng, n, n);
            if reciprocal_condition(&g) > 1e-6 {
                break g;
            }
        },
        ManifoldKind::On => orthonormal(rng, n, n),
        ManifoldKind::Spd => {
            let s = sym_part(&gaussian(rng, n, n)) * (1.0 / (n as f64).sqrt());
            exp_sym(&s).expect("symmetric input")
        }
        ManifoldKind::St | ManifoldKind::Gr => orthonormal(rng, n, p),
    };
    ManifoldPoint::new_unchecked(kind, rep)
}

/// Random tangent vector at `base` with norm `norm` in `metric`.
pub fn tangent<R: Rng + ?Sized>(
    rng: &mut R,
    base: &ManifoldPoint,
    norm: f64,
    metric: MetricTag,
) -> Result<TangentVector> {
    let (r, c) = base.shape();
    let v = manifold::project_tangent(base, &gaussian(rng, r, c))?;
    let len = manifold::norm(&v, metric)?;
    Ok(v.scaled(norm / len))
}

/// A point at distance roughly `radius` from `base` along a random geodesic.
pub fn nearby<R: Rng + ?Sized>(
    rng: &mut R,
    base: &ManifoldPoint,
    radius: f64,
    metric: MetricTag,
) -> Result<ManifoldPoint> {
    let v = tangent(rng, base, radius, metric)?;
    manifold::exp(base, &v, metric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_points_and_tangents_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for kind in ManifoldKind::ALL {
            let p = point(&mut rng, kind, 6, 3);
            assert!(p.check().valid, "{kind}");
            let v = tangent(&mut rng, &p, 0.4, kind.default_metric()).unwrap();
            assert!(v.check().valid, "{kind}");
            let len = manifold::norm(&v, kind.default_metric()).unwrap();
            assert!((len - 0.4).abs() < 1e-12);
            assert!(nearby(&mut rng, &p, 0.3, kind.default_metric()).unwrap().check().valid);
        }
    }
}
