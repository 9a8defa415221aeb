//! Finite stages of the affine infinite Grassmannian.
//!
//! Stage `(n, p)` carries the labels `-n..=-1, 1..=p`. On each stage the
//! crate provides exact exterior algebra ([`exterior`]), the affine cone over
//! the Grassmannian with its transition maps ([`grassmann`]), the signed
//! symmetric-group action and divisibility quasi-order on monomials
//! ([`symmetry`]), degree-2 ideal membership certificates ([`ideals`]),
//! represented matroids ([`matroids`]) and the batch campaigns behind the
//! `verify` binary ([`campaign`]).

pub mod campaign;
pub mod error;
pub mod exterior;
pub mod grassmann;
pub mod ideals;
pub mod linalg;
pub mod matroids;
pub mod scalars;
pub mod symmetry;

pub use error::{Error, Result};
