//! Interpolation and extrapolation of manifold-valued data, written against
//! the [`crate::manifold`] interface.

mod extrapolate;
mod karcher;
mod weights;

pub use extrapolate::{
    extrapolate_geodesic, extrapolate_pod_basis, svd_derivative, svd_derivative_truncated, PodExtrapolation,
    SvdDerivative,
};
pub use karcher::{karcher_center, karcher_interpolate, KarcherOptions, KarcherReport};
pub use weights::{RbfKernel, WeightScheme};

use crate::error::{Error, Result};
use crate::manifold::{self, ManifoldPoint, MetricTag};

/// Sample parameters `μ_i ∈ ℝᵈ` and the corresponding points on one
/// manifold.
#[derive(Debug, Clone)]
pub struct SampleSet {
    params: Vec<Vec<f64>>,
    points: Vec<ManifoldPoint>,
}

impl SampleSet {
    pub fn new(params: Vec<Vec<f64>>, points: Vec<ManifoldPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSamples("sample set is empty".into()));
        }
        if params.len() != points.len() {
            return Err(Error::InvalidSamples(format!(
                "{} parameters for {} points",
                params.len(),
                points.len()
            )));
        }
        let d = params[0].len();
        if d == 0 || params.iter().any(|p| p.len() != d) {
            return Err(Error::InvalidSamples(
                "parameters must share one nonzero dimension".into(),
            ));
        }
        if params.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSamples("non-finite parameter".into()));
        }
        let (kind, shape) = (points[0].kind(), points[0].shape());
        if let Some(i) = points.iter().position(|p| p.kind() != kind || p.shape() != shape) {
            return Err(Error::InvalidSamples(format!(
                "sample {i} is not on the same manifold as sample 0"
            )));
        }
        for i in 0..params.len() {
            for j in 0..i {
                if params[i] == params[j] {
                    return Err(Error::InvalidSamples(format!("samples {j} and {i} share a parameter")));
                }
            }
        }
        Ok(SampleSet { params, points })
    }

    /// One-dimensional convenience constructor.
    pub fn from_scalar(params: &[f64], points: Vec<ManifoldPoint>) -> Result<Self> {
        Self::new(params.iter().map(|&m| vec![m]).collect(), points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.params[0].len()
    }

    pub fn params(&self) -> &[Vec<f64>] {
        &self.params
    }

    pub fn points(&self) -> &[ManifoldPoint] {
        &self.points
    }

    pub fn weights(&self, scheme: &WeightScheme, mu: &[f64]) -> Result<Vec<f64>> {
        scheme.weights(&self.params, mu)
    }
}

/// Which sample serves as the base point of the normal coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BasePolicy {
    Index(usize),
    /// The sample minimizing its maximal distance to the others.
    Medoid,
    #[default]
    First,
}

#[derive(Debug, Clone)]
pub struct NormalCoordsResult {
    pub point: ManifoldPoint,
    pub base_index: usize,
    pub weights: Vec<f64>,
}

fn medoid(samples: &SampleSet, metric: MetricTag) -> Result<usize> {
    let k = samples.len();
    let mut worst = vec![0.0f64; k];
    for i in 0..k {
        for j in 0..i {
            let d =
                manifold::dist(&samples.points[i], &samples.points[j], metric).map_err(|e| Error::log_failure(j, e))?;
            worst[i] = worst[i].max(d);
            worst[j] = worst[j].max(d);
        }
    }
    Ok((0..k).fold(0, |best, i| if worst[i] < worst[best] { i } else { best }))
}

pub fn resolve_base(samples: &SampleSet, policy: BasePolicy, metric: MetricTag) -> Result<usize> {
    match policy {
        BasePolicy::First => Ok(0),
        BasePolicy::Index(i) if i < samples.len() => Ok(i),
        BasePolicy::Index(i) => Err(Error::InvalidArgument(format!(
            "base index {i} out of range for {} samples",
            samples.len()
        ))),
        BasePolicy::Medoid => medoid(samples, metric),
    }
}

/// Interpolation in normal coordinates: map every sample to the tangent
/// space at the base point, combine with the scheme's weights and map back.
pub fn interp_normal_coords(
    samples: &SampleSet,
    mu_star: &[f64],
    scheme: &WeightScheme,
    base: BasePolicy,
    metric: MetricTag,
) -> Result<NormalCoordsResult> {
    let weights = samples.weights(scheme, mu_star)?;
    let base_index = resolve_base(samples, base, metric)?;
    let p = &samples.points[base_index];
    let (r, c) = p.shape();
    let mut v = crate::DenseMatrix::zeros(r, c);
    // every log is checked, including zero-weight samples
    for (j, (q, w)) in samples.points.iter().zip(&weights).enumerate() {
        let l = manifold::log(p, q, metric).map_err(|e| Error::log_failure(j, e))?;
        v += l.rep() * *w;
    }
    let v = manifold::TangentVector::new_unchecked(p.clone(), v);
    Ok(NormalCoordsResult {
        point: manifold::exp(p, &v, metric)?,
        base_index,
        weights,
    })
}

/// Piecewise-geodesic interpolation of a 1-d sampled curve.
pub fn interp_geodesic(samples: &SampleSet, mu_star: f64, metric: MetricTag) -> Result<ManifoldPoint> {
    if samples.dim() != 1 {
        return Err(Error::WeightSchemeUnsupported(format!(
            "geodesic interpolation needs 1-d parameters, got d = {}",
            samples.dim()
        )));
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples.params[a][0].total_cmp(&samples.params[b][0]));
    let lo = samples.params[order[0]][0];
    let hi = samples.params[order[order.len() - 1]][0];
    if !(mu_star >= lo && mu_star <= hi) {
        return Err(Error::OutOfRange { mu: mu_star, lo, hi });
    }
    if let Some(&j) = order.iter().find(|&&j| samples.params[j][0] == mu_star) {
        return Ok(samples.points[j].clone());
    }
    let seg = order
        .windows(2)
        .find(|w| mu_star <= samples.params[w[1]][0])
        .expect("mu_star inside the sampled range");
    let (i, j) = (seg[0], seg[1]);
    let (a, b) = (samples.params[i][0], samples.params[j][0]);
    let v = manifold::log(&samples.points[i], &samples.points[j], metric).map_err(|e| Error::log_failure(j, e))?;
    manifold::geodesic(&samples.points[i], &v, (mu_star - a) / (b - a), metric)
}
