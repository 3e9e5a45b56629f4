//! Curves, convex hulls and the mean-width norm in `R^n`.
//!
//! Convex bodies are given by their support function; curves are
//! polylines. The crate checks lower bounds on the length of a curve whose
//! convex hull contains a given body, and searches for short such curves.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bodies;
pub mod constants;
pub mod curves;
pub mod directions;
pub mod error;
pub mod grassmann;
pub mod inequalities;
pub mod io;
pub mod linalg;
pub mod optimizer;
pub mod report;
pub mod rng;
pub mod stats;
pub mod steiner;

pub use bodies::{ConvexBody, SphereQuadrature};
pub use curves::Polyline;
pub use error::{Error, Result};
pub use grassmann::PlaneFrame;
pub use optimizer::{OptResult, OptimizerConfig};
pub use report::VerificationReport;
pub use steiner::QuermassFit;
