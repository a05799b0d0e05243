//! Quantum and classical dynamical R-matrices, rank-one fusion and exchange
//! operators, trace functions, and residual checks of the identities they satisfy.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod fusion;
pub mod gauge;
pub mod liealg;
pub mod matrix;
pub mod rmatrix;
pub mod scalar;
pub mod series;
pub mod specfun;
pub mod suites;
pub mod tensorcore;
pub mod trace;
pub mod verify;

pub use error::{DynError, Result};
pub use matrix::Matrix;
pub use scalar::{Rational, Scalar, C64};
