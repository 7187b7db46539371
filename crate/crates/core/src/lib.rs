//! Competitive learning Riemannian quantization.
//!
//! Online optimal quantization of probability measures on Riemannian
//! manifolds (Euclidean space, the circle, the 2-sphere, the hyperbolic
//! half-plane and SPD matrices), with Voronoi clustering, discrete
//! Wasserstein comparison of the resulting summaries, and an air-traffic
//! pipeline that quantizes fields of local velocity covariances.
//!
//! The core types are generic over a [`Real`] scalar; the aliases at the
//! crate root fix it to `f64`, which is what the CLI uses.

// `!(x > 0)` comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod curvature;
pub mod error;
pub mod linalg;
pub mod manifold;
pub mod quantization;
pub mod sampling;
pub mod scalar;
pub mod spd;
pub mod traffic;
pub mod transport;

pub use error::{Error, Result};
pub use manifold::{distance, exp_map, inner, log_map, ManifoldId, ManifoldPoint, TangentVector};
pub use scalar::Real;

pub type Point = ManifoldPoint<f64>;
pub type Tangent = TangentVector<f64>;
pub type Spd = spd::SpdMatrix<f64>;
pub type Matrix = linalg::SquareMatrix<f64>;
