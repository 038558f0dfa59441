//! Simulation and numerical analysis of position-dependent continuous-time
//! random walks with heavy-tailed jumps and waiting times, and of their
//! scaling limits obtained by hitting-time subordination.

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod kernels;
pub mod quad;
pub mod rng;
pub mod semigroup;
pub mod stable;
pub mod subordination;
pub mod walk;

pub use error::{Error, Result};
