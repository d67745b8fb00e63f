//! Rate analysis and simulation of clustered network MIMO downlinks.
//!
//! Base stations form a homogeneous PPP, are grouped into disjoint hexagonal
//! cooperation clusters, and serve users with zero-forcing beams over the
//! stacked cluster channel. The [`analytic`] module evaluates the per-BS
//! ergodic sum rate through Gamma moment matching and the PPP probability
//! generating functional; [`montecarlo`] simulates the same system from
//! first principles.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod beamforming;
pub mod channel;
pub mod config;
pub mod error;
pub mod gamma_matching;
pub mod geometry;
pub mod montecarlo;
pub mod quadrature;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
