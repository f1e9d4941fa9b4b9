//! Ready-made example objects, read from the bundled fixture files.

use crate::automata::{Automaton, RegisterAutomaton};
use crate::syntax::format::{parse_automaton, parse_register_automaton};

/// Some letter occurs twice (nondeterministic).
pub const REPEAT_NFA: &str = include_str!("../fixtures/repeat_nfa.aut");
/// The first letter occurs again (deterministic).
pub const FIRST_REPEATS_DFA: &str = include_str!("../fixtures/first_repeats_dfa.aut");
/// Password-protected access control with one register.
pub const ACCESS_CONTROL: &str = include_str!("../fixtures/access_control.ra");

pub fn repeat_nfa() -> Automaton {
    parse_automaton(REPEAT_NFA, None).expect("bundled fixture parses")
}

pub fn first_repeats_dfa() -> Automaton {
    parse_automaton(FIRST_REPEATS_DFA, None).expect("bundled fixture parses")
}

pub fn access_control() -> RegisterAutomaton {
    parse_register_automaton(ACCESS_CONTROL, None).expect("bundled fixture parses")
}
