//! Cardinal weight functions `φ_i` with `φ_i(μ_j) = δ_ij`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::solve;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RbfKernel {
    /// `exp(−(ε r)²)`
    Gaussian,
    /// `r² log r`, augmented with a linear polynomial.
    ThinPlate,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum WeightScheme {
    /// Piecewise-linear hat functions on 1-d parameters. Outside the node
    /// range the outermost interval is extended linearly.
    #[default]
    Linear,
    /// Lagrange polynomials on 1-d parameters.
    Lagrange,
    /// Radial basis functions on parameters of any dimension. With
    /// `normalize` the weights are rescaled to sum to one.
    Rbf {
        kernel: RbfKernel,
        shape: f64,
        normalize: bool,
    },
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn node_hit(nodes: &[Vec<f64>], mu: &[f64]) -> Option<usize> {
    nodes.iter().position(|n| n.as_slice() == mu)
}

impl WeightScheme {
    pub fn is_one_dimensional(&self) -> bool {
        matches!(self, WeightScheme::Linear | WeightScheme::Lagrange)
    }

    /// Weights `φ_i(μ)` for nodes `μ_i`. A parameter equal to a node gets
    /// the exact Kronecker weights.
    pub fn weights(&self, nodes: &[Vec<f64>], mu: &[f64]) -> Result<Vec<f64>> {
        let k = nodes.len();
        if k == 0 {
            return Err(Error::InvalidSamples("no nodes".into()));
        }
        let d = nodes[0].len();
        if mu.len() != d || nodes.iter().any(|n| n.len() != d) {
            return Err(Error::shape(format!("{d}-dimensional parameter"), mu.len(), 1));
        }
        if let Some(j) = node_hit(nodes, mu) {
            let mut w = vec![0.0; k];
            w[j] = 1.0;
            return Ok(w);
        }
        if k == 1 {
            return Ok(vec![1.0]);
        }
        if self.is_one_dimensional() && d != 1 {
            return Err(Error::WeightSchemeUnsupported(format!(
                "{self:?} weights need 1-d parameters, got d = {d}"
            )));
        }
        match *self {
            WeightScheme::Linear => Ok(linear(nodes, mu[0])),
            WeightScheme::Lagrange => Ok(lagrange(nodes, mu[0])),
            WeightScheme::Rbf {
                kernel,
                shape,
                normalize,
            } => {
                if !(shape > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "RBF shape parameter must be positive, got {shape}"
                    )));
                }
                let mut w = rbf(nodes, mu, kernel, shape)?;
                if normalize {
                    let sum: f64 = w.iter().sum();
                    if sum.abs() < 1e-14 {
                        return Err(Error::WeightSchemeUnsupported(
                            "RBF weights sum to zero; cannot normalize".into(),
                        ));
                    }
                    w.iter_mut().for_each(|x| *x /= sum);
                }
                Ok(w)
            }
        }
    }
}

fn linear(nodes: &[Vec<f64>], x: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[a][0].total_cmp(&nodes[b][0]));
    let last = order.len() - 2;
    let seg = order.windows(2).position(|w| x <= nodes[w[1]][0]).unwrap_or(last);
    let (i, j) = (order[seg], order[seg + 1]);
    let (a, b) = (nodes[i][0], nodes[j][0]);
    let t = (x - a) / (b - a);
    let mut w = vec![0.0; nodes.len()];
    w[i] = 1.0 - t;
    w[j] = t;
    w
}

fn lagrange(nodes: &[Vec<f64>], x: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|i| {
            nodes
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, n)| (x - n[0]) / (nodes[i][0] - n[0]))
                .product()
        })
        .collect()
}

fn kernel_value(kernel: RbfKernel, shape: f64, r: f64) -> f64 {
    match kernel {
        RbfKernel::Gaussian => (-(shape * r).powi(2)).exp(),
        RbfKernel::ThinPlate => {
            let r = shape * r;
            if r == 0.0 {
                0.0
            } else {
                r * r * r.ln()
            }
        }
    }
}

// The interpolant is f(μ) = k(μ)ᵀ K⁻¹ f, so the cardinal weights are K⁻¹ k(μ)
// (K symmetric). Thin-plate adds the linear polynomial block.
fn rbf(nodes: &[Vec<f64>], mu: &[f64], kernel: RbfKernel, shape: f64) -> Result<Vec<f64>> {
    let k = nodes.len();
    let d = mu.len();
    let extra = match kernel {
        RbfKernel::Gaussian => 0,
        RbfKernel::ThinPlate => d + 1,
    };
    let size = k + extra;
    let mut sys = DMatrix::zeros(size, size);
    let mut rhs = DVector::zeros(size);
    for i in 0..k {
        for j in 0..k {
            sys[(i, j)] = kernel_value(kernel, shape, distance(&nodes[i], &nodes[j]));
        }
        rhs[i] = kernel_value(kernel, shape, distance(&nodes[i], mu));
    }
    if extra > 0 {
        for i in 0..k {
            sys[(i, k)] = 1.0;
            sys[(k, i)] = 1.0;
            for c in 0..d {
                sys[(i, k + 1 + c)] = nodes[i][c];
                sys[(k + 1 + c, i)] = nodes[i][c];
            }
        }
        rhs[k] = 1.0;
        for c in 0..d {
            rhs[k + 1 + c] = mu[c];
        }
    }
    let sol = solve(&sys, &DMatrix::from_column_slice(size, 1, rhs.as_slice())).map_err(|e| match e {
        Error::SingularInput { rcond } => Error::WeightSchemeUnsupported(format!(
            "RBF system is singular (reciprocal condition {rcond:e}); thin-plate needs at least d+1 affinely independent nodes"
        )),
        other => other,
    })?;
    Ok(sol.column(0).rows(0, k).iter().copied().collect())
}
