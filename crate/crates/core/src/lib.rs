//! Exact-arithmetic toolkit for multi-prover bit commitments under the
//! non-signaling model.
//!
//! The crate builds commitment schemes as explicit probability tables,
//! decides the non-signaling and causality constraints of one-round,
//! two-round and tripartite systems, synthesizes non-signaling attacks on the
//! binding property by gluing distributions along maximal couplings, and
//! certifies optimal binding values with an exact rational simplex solver.
//!
//! Every probability is a [`Rational`]; no floating point is involved.

pub mod attacks;
pub mod coupling;
pub mod error;
pub mod json;
pub mod lp;
pub mod nonsig;
pub mod rational;
pub mod schemes;
pub mod table;

pub use error::{Error, Result};
pub use rational::Rational;
pub use table::{Alphabet, CondTable, Conditioned, Event};
