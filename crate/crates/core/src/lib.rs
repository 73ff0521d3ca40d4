//! Upper bounds, numerical estimates and Monte Carlo checks for the
//! injective norm of random tensors.
//!
//! The injective norm of an order-`p` tensor `T` is the largest value of
//! `|<T, x_1 ⊗ ... ⊗ x_p>|` over unit vectors `x_i`. This crate provides
//! moment-method upper bounds (finite and large-dimension limits), samplers
//! for several random tensor ensembles, lower-bound estimators (alternating
//! maximization and noisy projected gradient ascent) and a Monte Carlo
//! harness that checks the deterministic moment inequalities.

// Domain checks are written `!(x > 0.0)` so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod ensembles;
pub mod error;
pub mod montecarlo;
pub mod optimize;
pub mod specialfn;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64;
