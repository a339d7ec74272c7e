//! Eigenvalue inclusion bounds for block-diagonally preconditioned multiple
//! saddle-point matrices.
//!
//! The pipeline is: a [`BlockSaddleSystem`] and a [`SchurChain`] of
//! approximate Schur complements give an [`IndicatorSet`]; the indicators
//! drive a family of three-term polynomials whose corner roots produce an
//! [`EigenvalueBounds`] union of two intervals. [`spectrum`] and [`minres`]
//! verify the result against exact eigenvalues and solver convergence.

pub mod bounds;
pub mod error;
pub mod indicators;
pub mod linalg;
pub mod minres;
pub mod mtx;
pub mod polynomials;
pub mod randgen;
pub mod saddle;
pub mod spectrum;
pub mod suite;

pub use bounds::{compute_bounds, EigenvalueBounds};
pub use error::{Error, Result};
pub use indicators::{compute_indicator_set, IndicatorSet};
pub use polynomials::GammaAssignment;
pub use saddle::{build_exact_schur_chain, build_inexact_chain, ApproxStrategy, BlockSaddleSystem, SchurChain};
