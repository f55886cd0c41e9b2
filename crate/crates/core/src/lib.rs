//! Riemannian computing on matrix manifolds.
//!
//! Points and tangent vectors are carried in extrinsic coordinates as dense
//! matrices. The per-manifold modules ([`gl`], [`orthogonal`], [`spd`],
//! [`stiefel`], [`grassmann`]) implement exponential and logarithm maps,
//! geodesics and distances; [`manifold`] dispatches over them uniformly, and
//! [`interp`] builds interpolation and extrapolation of manifold-valued data
//! on top of that contract.

// `!(x > y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gl;
pub mod grassmann;
pub mod interp;
pub mod kernels;
pub mod manifold;
pub mod orthogonal;
#[cfg(feature = "random")]
pub mod random;
pub mod spd;
pub mod stiefel;
pub mod tol;

pub use error::{Error, Result};
pub use manifold::{ManifoldKind, ManifoldPoint, MetricTag, TangentVector};

/// Real dense matrix; the carrier for every point and tangent vector.
pub type DenseMatrix = nalgebra::DMatrix<f64>;
