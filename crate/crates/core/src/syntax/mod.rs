//! Text formats for theories, definable sets, relations, automata and
//! promonoids.

pub mod format;
pub mod lexer;
