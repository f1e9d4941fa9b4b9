//! Computing with definable sets over decidable atom theories.
//!
//! Sets, relations, automata and monoids are given by first-order formulas
//! over pure equality atoms or over the densely ordered rationals. Both
//! theories admit quantifier elimination, so every construction here stays
//! definable and every question about it is decidable.

pub mod automata;
pub mod defset;
pub mod error;
pub mod fixpoint;
pub mod fixtures;
pub mod monoid;
pub mod syntax;
pub mod theory;

pub use error::{Error, Result};
