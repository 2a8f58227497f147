//! Numerical toolkit for discrete Hardy–Littlewood averages on `Z^d`.
//!
//! * [`lattice`]: sparse, dense-box and periodic functions on `Z^d`, `ℓ^p` norms, FFT.
//! * [`par`]: rayon fan-out with a sequential fallback.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bodies;
pub mod ergodic;
pub mod error;
pub mod experiments;
pub mod lattice;
pub mod multipliers;
pub mod operators;
pub mod output;
pub mod par;
pub mod runs;
pub mod variation;

pub use error::{Error, Result};
