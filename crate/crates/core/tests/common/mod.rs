#![allow(dead_code)]

use manifoldkit::kernels::{exp_sym, reciprocal_condition, sym_part, thin_qr};
use manifoldkit::manifold::{self, ManifoldKind, ManifoldPoint, MetricTag, TangentVector};
use manifoldkit::DenseMatrix;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DenseMatrix {
    DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

pub fn orthonormal(rng: &mut ChaCha8Rng, n: usize, p: usize) -> DenseMatrix {
    thin_qr(&gaussian(rng, n, p)).q
}

pub fn point(rng: &mut ChaCha8Rng, kind: ManifoldKind, n: usize, p: usize) -> ManifoldPoint {
    let rep = match kind {
        ManifoldKind::Gl => loop {
            let g = gaussian(rng, n, n);
            if reciprocal_condition(&g) > 1e-3 {
                break g;
            }
        },
        ManifoldKind::On => orthonormal(rng, n, n),
        ManifoldKind::Spd => exp_sym(&(sym_part(&gaussian(rng, n, n)) * (1.0 / (n as f64).sqrt()))).unwrap(),
        ManifoldKind::St | ManifoldKind::Gr => orthonormal(rng, n, p),
    };
    ManifoldPoint::new(kind, rep).unwrap()
}

pub fn tangent(rng: &mut ChaCha8Rng, base: &ManifoldPoint, len: f64, metric: MetricTag) -> TangentVector {
    let (r, c) = base.shape();
    let v = manifold::project_tangent(base, &gaussian(rng, r, c)).unwrap();
    let n = manifold::norm(&v, metric).unwrap();
    v.scaled(len / n)
}

/// Random orthogonal matrix with determinant +1.
pub fn rotation(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let mut q = orthonormal(rng, n, n);
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// The manifold/metric pairs with a logarithm and the shapes they are tested at.
pub const CASES: [(ManifoldKind, MetricTag); 6] = [
    (ManifoldKind::Gl, MetricTag::Euclidean),
    (ManifoldKind::On, MetricTag::Canonical),
    (ManifoldKind::Spd, MetricTag::Natural),
    (ManifoldKind::St, MetricTag::Canonical),
    (ManifoldKind::Gr, MetricTag::Canonical),
    (ManifoldKind::On, MetricTag::Euclidean),
];
