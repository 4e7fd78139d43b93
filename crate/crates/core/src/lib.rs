//! Lowest-order weak Galerkin finite element methods for second-order
//! elliptic problems on triangular, rectangular and box meshes.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod assembly;
pub mod cli;
pub mod element;
pub mod error;
pub mod expr;
pub mod mesh;
pub mod postprocess;
pub mod problem;
pub mod quadrature;
pub mod solver;
pub mod sparse;

pub use error::{Result, WgError};
