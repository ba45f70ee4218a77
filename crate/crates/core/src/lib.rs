//! Importance-sampling streaming algorithms that stay correct when the
//! stream is chosen adaptively by an adversary watching the outputs.
//!
//! * [`linalg`]: Gram maintenance, online leverage / ridge / L1 sensitivities
//!   and the spectral-approximation oracle.
//! * [`sampler`]: online sensitivity row sampling with regression and
//!   low-rank endpoints.
//! * [`coreset`]: merge-and-reduce trees over sensitivity-sampling coresets
//!   for k-median / k-means.
//! * [`graph`]: cut sparsification by strong-connectivity sampling, plus exact
//!   min-cut and connectivity oracles.
//! * [`adversary`]: the two-player game runner, attack streams and the
//!   non-robust baselines.

pub mod adversary;
pub mod coreset;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
