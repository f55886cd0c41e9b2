//! Interpolation as a weighted Riemannian center: minimize
//! `f(q) = ½ Σ φ_i(μ*) dist(q, p_i)²` by Riemannian gradient descent with
//! `∇f_q = −Σ φ_i(μ*) Log_q(p_i)`.

use super::{SampleSet, WeightScheme};
use crate::error::{Error, Result};
use crate::manifold::{self, ManifoldPoint, MetricTag, TangentVector};
use crate::stiefel;
use crate::DenseMatrix;

#[derive(Debug, Clone)]
pub struct KarcherOptions {
    /// Stop when `‖∇f_q‖_q ≤ tau`.
    pub tau: f64,
    pub max_iter: usize,
    /// Step-halving budget per iteration, starting from a unit step.
    pub max_halvings: usize,
    /// Initial iterate; defaults to the sample with the largest weight.
    pub q0: Option<ManifoldPoint>,
    /// Options for the Stiefel logarithms inside the iteration.
    pub stiefel: stiefel::LogOptions,
}

impl Default for KarcherOptions {
    fn default() -> Self {
        KarcherOptions {
            tau: 1e-9,
            max_iter: 200,
            max_halvings: 30,
            q0: None,
            stiefel: stiefel::LogOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct KarcherReport {
    pub point: ManifoldPoint,
    pub iterations: usize,
    /// `‖∇f_{q_k}‖` for every iterate.
    pub gradient_norms: Vec<f64>,
    pub weights: Vec<f64>,
    pub objective: f64,
}

struct State {
    q: ManifoldPoint,
    gradient: DenseMatrix,
    objective: f64,
}

fn evaluate(
    q: ManifoldPoint,
    samples: &SampleSet,
    w: &[f64],
    metric: MetricTag,
    opts: &KarcherOptions,
) -> Result<State> {
    let (r, c) = q.shape();
    let mut gradient = DenseMatrix::zeros(r, c);
    let mut objective = 0.0;
    for (i, (p, wi)) in samples.points().iter().zip(w).enumerate() {
        if *wi == 0.0 {
            continue;
        }
        let l = manifold::log_with(&q, p, metric, opts.stiefel).map_err(|e| Error::log_failure(i, e))?;
        objective += 0.5 * wi * manifold::norm(&l, metric)?.powi(2);
        gradient -= l.rep() * *wi;
    }
    Ok(State { q, gradient, objective })
}

pub fn karcher_interpolate(
    samples: &SampleSet,
    mu_star: &[f64],
    scheme: &WeightScheme,
    metric: MetricTag,
    opts: &KarcherOptions,
) -> Result<KarcherReport> {
    let weights = samples.weights(scheme, mu_star)?;
    karcher_center(samples, weights, metric, opts)
}

/// Weighted Riemannian center for explicitly given weights.
pub fn karcher_center(
    samples: &SampleSet,
    weights: Vec<f64>,
    metric: MetricTag,
    opts: &KarcherOptions,
) -> Result<KarcherReport> {
    if weights.len() != samples.len() {
        return Err(Error::InvalidArgument(format!(
            "{} weights for {} samples",
            weights.len(),
            samples.len()
        )));
    }
    let q0 = match &opts.q0 {
        Some(q) => q.clone(),
        None => {
            let best = (0..weights.len()).fold(0, |b, i| if weights[i] > weights[b] { i } else { b });
            samples.points()[best].clone()
        }
    };
    let mut state = evaluate(q0, samples, &weights, metric, opts)?;
    let mut history = Vec::new();
    for k in 0..=opts.max_iter {
        let grad = TangentVector::new_unchecked(state.q.clone(), state.gradient.clone());
        let gnorm = manifold::norm(&grad, metric)?;
        history.push(gnorm);
        if gnorm <= opts.tau {
            return Ok(KarcherReport {
                point: state.q,
                iterations: k,
                gradient_norms: history,
                weights,
                objective: state.objective,
            });
        }
        if k == opts.max_iter {
            break;
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let step = grad.scaled(-alpha);
            let trial =
                manifold::exp(&state.q, &step, metric).and_then(|q| evaluate(q, samples, &weights, metric, opts));
            if let Ok(next) = trial {
                if next.objective <= state.objective + 1e-13 * (1.0 + state.objective.abs()) {
                    accepted = Some(next);
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some(next) => state = next,
            None => break,
        }
    }
    Err(Error::NoConvergence {
        iterations: history.len() - 1,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{sym_part, thin_qr};
    use crate::manifold::ManifoldKind;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DenseMatrix {
        DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
    }

    fn spd_point(rng: &mut ChaCha8Rng, n: usize) -> ManifoldPoint {
        let g = gaussian(rng, n, n) * 0.5;
        ManifoldPoint::new(ManifoldKind::Spd, g.tr_mul(&g) + DMatrix::identity(n, n)).unwrap()
    }

    fn stationarity(q: &ManifoldPoint, s: &SampleSet, w: &[f64], m: MetricTag) -> f64 {
        let (r, c) = q.shape();
        let mut g = DenseMatrix::zeros(r, c);
        for (p, wi) in s.points().iter().zip(w) {
            g += manifold::log(q, p, m).unwrap().rep() * *wi;
        }
        manifold::norm(&TangentVector::new_unchecked(q.clone(), g), m).unwrap()
    }

    #[test]
    fn nodes_are_reproduced() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<_> = (0..3).map(|_| spd_point(&mut rng, 3)).collect();
        let s = SampleSet::from_scalar(&[0.0, 1.0, 2.0], pts.clone()).unwrap();
        for (j, mu) in [0.0, 1.0, 2.0].iter().enumerate() {
            let r = karcher_interpolate(
                &s,
                &[*mu],
                &WeightScheme::Lagrange,
                MetricTag::Natural,
                &KarcherOptions::default(),
            )
            .unwrap();
            assert!(manifold::dist(&r.point, &pts[j], MetricTag::Natural).unwrap() <= 1e-7);
        }
    }

    #[test]
    fn two_point_center_is_the_midpoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = ManifoldPoint::new(ManifoldKind::Gr, thin_qr(&gaussian(&mut rng, 6, 2)).q).unwrap();
        let d = manifold::project_tangent(&u, &gaussian(&mut rng, 6, 2)).unwrap();
        let d = d.scaled(0.7 / d.rep().norm());
        let v = manifold::geodesic(&u, &d, 1.0, MetricTag::Canonical).unwrap();
        let s = SampleSet::from_scalar(&[0.0, 1.0], vec![u.clone(), v]).unwrap();
        let r = karcher_interpolate(
            &s,
            &[0.5],
            &WeightScheme::Linear,
            MetricTag::Canonical,
            &KarcherOptions::default(),
        )
        .unwrap();
        let mid = manifold::geodesic(&u, &d, 0.5, MetricTag::Canonical).unwrap();
        assert!(manifold::dist(&r.point, &mid, MetricTag::Canonical).unwrap() <= 1e-8);
        assert!(stationarity(&r.point, &s, &r.weights, MetricTag::Canonical) <= 1e-9);
    }

    #[test]
    fn three_spd_samples_agree_with_fixed_step_descent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<_> = (0..3).map(|_| spd_point(&mut rng, 3)).collect();
        let s = SampleSet::from_scalar(&[0.0, 1.0, 2.0], pts.clone()).unwrap();
        let w = vec![1.0 / 3.0; 3];
        let m = MetricTag::Natural;

        let mut q = pts[0].clone();
        for _ in 0..200 {
            let mut g = DenseMatrix::zeros(3, 3);
            for (p, wi) in pts.iter().zip(&w) {
                g += manifold::log(&q, p, m).unwrap().rep() * *wi;
            }
            q = manifold::exp(&q, &TangentVector::new_unchecked(q.clone(), sym_part(&g)), m).unwrap();
        }

        let r = karcher_center(&s, w.clone(), m, &KarcherOptions::default()).unwrap();
        assert!(*r.gradient_norms.last().unwrap() <= 1e-9);
        assert!(stationarity(&r.point, &s, &w, m) <= 1e-9);
        assert!((r.point.rep() - q.rep()).norm() <= 1e-8);
    }

    #[test]
    fn equal_weights_via_the_public_entry_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts: Vec<_> = (0..3).map(|_| spd_point(&mut rng, 3)).collect();
        let s = SampleSet::from_scalar(&[0.0, 2.0], pts[..2].to_vec()).unwrap();
        let r = karcher_interpolate(
            &s,
            &[1.0],
            &WeightScheme::Linear,
            MetricTag::Natural,
            &KarcherOptions::default(),
        )
        .unwrap();
        assert_eq!(r.weights, vec![0.5, 0.5]);
        assert!(r.gradient_norms.last().unwrap() <= &1e-9);
        assert!(stationarity(&r.point, &s, &r.weights, MetricTag::Natural) <= 1e-9);
    }

    #[test]
    fn reports_non_convergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<_> = (0..3).map(|_| spd_point(&mut rng, 3)).collect();
        let s = SampleSet::from_scalar(&[0.0, 1.0, 2.0], pts).unwrap();
        let opts = KarcherOptions {
            max_iter: 0,
            ..KarcherOptions::default()
        };
        match karcher_interpolate(&s, &[0.5], &WeightScheme::Lagrange, MetricTag::Natural, &opts) {
            Err(Error::NoConvergence { history, .. }) => assert_eq!(history.len(), 1),
            other => panic!("{other:?}"),
        }
    }
}
