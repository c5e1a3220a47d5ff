//! Numerical verification toolkit for explicit constructions in contact
//! geometry: model contact forms, the fiber-squeezing contact flow and its
//! scaling bound, torus-unwrapping embeddings, and Legendrian spheres.
//!
//! The crate is organized as a stack:
//!
//! * [`expr`] — the arithmetic expression language (parser, printer, exact
//!   forward-mode derivatives via [`dual`]);
//! * [`geometry`] — charts, scalar fields, k-forms, vector fields, smooth
//!   maps, and the exterior-calculus operations;
//! * [`contact`] — the model contact forms and pointwise solvers (Reeb,
//!   Moser, characteristic foliation);
//! * [`flows`] — the squeezing flow, its conformal integral, and the derived
//!   constants;
//! * [`embeddings`] — unwrapping maps and Legendrian embeddings;
//! * [`report`] / [`config`] / [`suites`] — batch verification front-end.

pub mod config;
pub mod contact;
pub mod dual;
pub mod embeddings;
pub mod error;
pub mod expr;
pub mod flows;
pub mod geometry;
pub mod report;
pub mod suites;

pub use error::{Error, Result};

/// Largest supported chart dimension.  Covers the dimension-7 contact charts
/// and the 9-dimensional target of the three-torus unwrapping.
pub const MAX_DIM: usize = 9;
