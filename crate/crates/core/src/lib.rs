//! Locating Hopf bifurcations of parameterized dynamical systems through the
//! Griewank–Reddien extended system, and steering them with a trust-region
//! optimizer over model parameters.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod control;
pub mod error;
pub mod hopf;
pub mod linalg;
pub mod models;
pub mod stability;
pub mod steady;
pub mod system;
pub mod timeint;

pub use error::{Error, Result};
pub use system::{Controls, DynamicalSystem};
