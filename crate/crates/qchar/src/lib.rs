//! Exact symbolic q-characters for the Borel category O of quantum affine sl2.
//!
//! This crate computes, with no floating point and no tolerances:
//!
//! - truncated normalized q-character series and their stabilized limits,
//! - l-weights, their negative factorizations and partial orders,
//! - closed-form characters (fundamental, Kirillov-Reshetikhin, simple and
//!   asymptotic-standard) and the coefficient-exact decomposition of the
//!   standard character into simple characters,
//! - finite tensor products of evaluation modules with Drinfeld generator
//!   actions derived from the coproduct, and exact l-weight decompositions,
//! - the asymptotic standard module spanned by finite index subsets, its
//!   triangular loop-Cartan action and its eigenvector basis,
//! - PBW normal ordering in the negative half of the Borel algebra and the
//!   induced module used to locate l-weight vectors.
//!
//! Everything is exact: scalars live in Q(q) ([`qscalar`]), series
//! coefficients are checked integers, and every comparison is structural
//! equality. Truncations are explicit (window and degree cap) and any
//! operation that would need data outside its truncation is a hard error.

pub mod asymstd;
pub mod borelneg;
pub mod closedforms;
pub mod config;
pub mod error;
pub mod linalg;
pub mod lweight;
pub mod parse;
pub mod qscalar;
pub mod qseries;
pub mod report;
pub mod tensorsim;
pub mod ymonomial;

pub use error::{Error, Result};
pub use qscalar::{q_factorial, q_int, QLaurent, QScalar};
