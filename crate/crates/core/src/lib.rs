//! Equation systems over direct powers of finite relational structures.
//!
//! The crate decides when a direct power of a finite graph, partial order or
//! matroid is equationally Noetherian, produces counterexample families that
//! can be checked independently, and compresses staircase-presented infinite
//! systems over a direct power into equivalent finite ones.

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod noetherian;
pub mod power;
pub mod signatures;
pub mod solver;
pub mod wrap;

pub use error::{Error, Result};
