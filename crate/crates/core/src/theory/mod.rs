//! Formulas over equality atoms and densely ordered atoms: syntax,
//! quantifier elimination, decision, evaluation and complete types.

mod atom;
pub mod cube;
mod formula;
pub mod parse;
mod qe;
mod types;

pub use atom::{Atom, TheoryConfig, TheoryKind};
pub use formula::{Formula, Term, Var};
pub use parse::{parse_formula, parse_template, parse_theory};
pub use qe::{
    canonical, decide, eliminate_quantifiers, equivalent, evaluate, find_model, implies, is_sat, is_valid, qe_calls,
    to_dnf, DecideMode,
};
pub use types::enumerate_complete_types;
