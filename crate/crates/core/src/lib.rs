//! Computational tools for meromorphic inner functions on the upper half-plane.
//!
//! The crate covers Blaschke products and singular factors, Clark measures,
//! exact Toeplitz kernels for rational symbols, argument-based diagnostics
//! of the Toeplitz order, Beurling–Malliavin densities and de Branges spaces.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bm;
pub mod clark;
pub mod debranges;
pub mod error;
pub mod grid;
pub mod inner;
pub mod io;
pub mod model;
pub mod numerics;
pub mod order;
pub mod par;
pub mod scenarios;

mod cser;

pub use error::{Error, Result};
pub use grid::GridFunction;
pub use inner::{arg_mif, blaschke_sum, darg_mif, eval_mif, MifDescriptor, ZeroGenerator, ZeroRule};
pub use par::Exec;
