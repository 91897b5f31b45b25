//! Curvature-aware generalization bounds on constant-curvature spaces.
//!
//! The crate is organized around five pieces:
//!
//! * [`spaceform`] — geometry primitives for the sphere / Euclidean /
//!   hyperbolic model spaces: distances, ball volumes, uniform samplers and
//!   high-dimensional ambient embeddings.
//! * [`bounds`] — covering-number, Rademacher-complexity and generalization
//!   bounds parameterized by curvature, plus Euclidean baselines and the
//!   improvement metric.
//! * [`estimate`] — intrinsic geometry of an arbitrary point cloud: TwoNN
//!   dimension, k-NN graph geodesics and effective curvature.
//! * [`lipnet`] — a spectrally-normalized one-hidden-layer network used to
//!   measure empirical generalization gaps.
//! * [`harness`] — experiment orchestration, config files, CSV/JSON results
//!   and plot-data emission. The `geobound` binary is a thin wrapper over it.

pub mod bounds;
pub mod error;
pub mod estimate;
pub mod harness;
pub mod lipnet;
pub mod quad;
pub mod spaceform;

pub use error::{Error, Result};
