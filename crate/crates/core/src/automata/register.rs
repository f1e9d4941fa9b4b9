//! Register automata with a finite control and `k` atom registers, compiled
//! to definable automata over `S × (A ⊔ {⊥})^k`.
//!
//! A register may hold the reserved value `bot`, which differs from every
//! atom. Each control state is split by the set of registers holding `bot`:
//! the variant `START` has all registers set, `START_bot1` has register 1
//! erased, and so on.

use std::collections::BTreeMap;

use super::{terms, Automaton, Edge};
use crate::defset::{DefSet, Tag, Variant};
use crate::error::{Error, Result};
use crate::theory::{canonical, Formula, Term, TheoryConfig, Var};

/// Name of the erased register value in guards.
pub const BOTTOM: &str = "bot";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaEdge {
    pub from: String,
    pub to: String,
    pub letter: Tag,
    pub letter_vars: Vec<Var>,
    /// Over the letter variables, `r1..rk`, `r1'..rk'` and `bot`.
    pub guard: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterAutomaton {
    pub theory: TheoryConfig,
    pub alphabet: DefSet,
    pub registers: usize,
    pub control: Vec<String>,
    /// Initial control states with a constraint on `r1..rk`.
    pub initial: Vec<(String, Formula)>,
    pub final_states: Vec<(String, Formula)>,
    pub edges: Vec<RaEdge>,
}

pub fn register(i: usize) -> Var {
    Var::new(&format!("r{}", i + 1))
}

pub fn next_register(i: usize) -> Var {
    Var::new(&format!("r{}'", i + 1))
}

/// Variant name of control state `label` with the registers in `erased` at `bot`.
pub fn split_tag(label: &str, erased: &[usize]) -> Tag {
    if erased.is_empty() {
        Tag::name(label)
    } else {
        let idx: Vec<String> = erased.iter().map(|i| (i + 1).to_string()).collect();
        Tag::name(&format!("{label}_bot{}", idx.join("_")))
    }
}

impl RegisterAutomaton {
    pub fn check(&self) -> Result<()> {
        let known = |s: &str| self.control.iter().any(|c| c == s);
        let regs: Vec<Var> = (0..self.registers).map(register).collect();
        let nexts: Vec<Var> = (0..self.registers).map(next_register).collect();
        let bot = Var::new(BOTTOM);
        for (label, phi) in self.initial.iter().chain(&self.final_states) {
            if !known(label) {
                return Err(Error::RegisterAutomaton(format!("unknown control state {label}")));
            }
            if let Some(v) = phi.free_vars().into_iter().find(|v| !regs.contains(v) && *v != bot) {
                return Err(Error::RegisterAutomaton(format!("{label}: stray variable {v}")));
            }
        }
        for e in &self.edges {
            for s in [&e.from, &e.to] {
                if !known(s) {
                    return Err(Error::RegisterAutomaton(format!("unknown control state {s}")));
                }
            }
            let arity = self
                .alphabet
                .arity(&e.letter)
                .ok_or_else(|| Error::UnknownTag(e.letter.to_string()))?;
            if arity != e.letter_vars.len() {
                return Err(Error::ArityMismatch {
                    tag: e.letter.to_string(),
                    expected: arity,
                    got: e.letter_vars.len(),
                });
            }
            if let Some(v) = e
                .guard
                .free_vars()
                .into_iter()
                .find(|v| !e.letter_vars.contains(v) && !regs.contains(v) && !nexts.contains(v) && *v != bot)
            {
                return Err(Error::RegisterAutomaton(format!(
                    "edge {} -> {}: stray variable {v}",
                    e.from, e.to
                )));
            }
        }
        Ok(())
    }

    fn patterns(&self) -> Vec<Vec<usize>> {
        (0..1usize << self.registers)
            .map(|mask| (0..self.registers).filter(|i| mask & (1 << i) != 0).collect())
            .collect()
    }

    /// Terms for the registers under an erasure pattern, the present ones
    /// taken from `coords` in order.
    fn register_terms(&self, erased: &[usize], coords: &[Term]) -> Vec<Term> {
        let mut it = coords.iter();
        (0..self.registers)
            .map(|i| {
                if erased.contains(&i) {
                    Term::Var(Var::new(BOTTOM))
                } else {
                    it.next().expect("one coordinate per present register").clone()
                }
            })
            .collect()
    }

    pub fn compile(&self) -> Result<Automaton> {
        self.check()?;
        let k = self.registers;
        let patterns = self.patterns();
        let theory = self.theory.merge(self.alphabet.theory())?;
        let mut variants = Vec::new();
        for label in &self.control {
            for p in &patterns {
                variants.push(Variant::new(split_tag(label, p), k - p.len(), Formula::True));
            }
        }
        let states = DefSet::new(theory.clone(), variants)?;
        let regs: Vec<Var> = (0..k).map(register).collect();
        let nexts: Vec<Var> = (0..k).map(next_register).collect();

        let subset = |spec: &[(String, Formula)]| {
            let mut by_tag: BTreeMap<Tag, Vec<Formula>> = BTreeMap::new();
            for (label, phi) in spec {
                for p in &patterns {
                    let coords = terms(&Var::coords(k - p.len()));
                    let map: BTreeMap<Var, Term> = regs.iter().cloned().zip(self.register_terms(p, &coords)).collect();
                    let f = erase_bottom(&phi.substitute(&map));
                    by_tag.entry(split_tag(label, p)).or_default().push(f);
                }
            }
            states.map_constraints(|v| Formula::or(by_tag.get(&v.tag).cloned().unwrap_or_default()))
        };
        let initial = subset(&self.initial);
        let final_states = subset(&self.final_states);

        let mut edges = Vec::new();
        for e in &self.edges {
            let a = e.letter_vars.len();
            for p in &patterns {
                for q in &patterns {
                    let (m, n) = (k - p.len(), k - q.len());
                    let xs = terms(&Var::coords(a + m + n));
                    let mut map: BTreeMap<Var, Term> =
                        e.letter_vars.iter().cloned().zip(xs[..a].iter().cloned()).collect();
                    map.extend(regs.iter().cloned().zip(self.register_terms(p, &xs[a..a + m])));
                    map.extend(nexts.iter().cloned().zip(self.register_terms(q, &xs[a + m..])));
                    let f = canonical(&erase_bottom(&e.guard.substitute(&map)), &theory);
                    if f != Formula::False {
                        edges.push(Edge {
                            letter: e.letter.clone(),
                            from: split_tag(&e.from, p),
                            to: split_tag(&e.to, q),
                            formula: f,
                        });
                    }
                }
            }
        }
        let a = Automaton::from_edges(self.alphabet.clone(), states, initial, final_states, edges, false)?;
        let deterministic = a.validate().deterministic;
        Automaton::new(
            a.alphabet.clone(),
            a.states.clone(),
            a.initial.clone(),
            a.final_states.clone(),
            a.transition.clone(),
            deterministic,
        )
    }
}

/// Resolves every atomic formula mentioning `bot`: it equals itself and
/// nothing else, and is not ordered against anything.
fn erase_bottom(f: &Formula) -> Formula {
    let is_bot = |t: &Term| matches!(t, Term::Var(v) if v.name() == BOTTOM);
    match f {
        Formula::Eq(a, b) | Formula::Neq(a, b) if is_bot(a) || is_bot(b) => {
            let same = is_bot(a) && is_bot(b);
            let holds = if matches!(f, Formula::Eq(..)) { same } else { !same };
            if holds {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::Lt(a, b) if is_bot(a) || is_bot(b) => Formula::False,
        Formula::And(fs) => Formula::and(fs.iter().map(erase_bottom)),
        Formula::Or(fs) => Formula::or(fs.iter().map(erase_bottom)),
        Formula::Not(g) => Formula::not(erase_bottom(g)),
        Formula::Implies(a, b) => Formula::implies(erase_bottom(a), erase_bottom(b)),
        Formula::Exists(v, g) => Formula::exists(v.clone(), erase_bottom(g)),
        Formula::Forall(v, g) => Formula::forall(v.clone(), erase_bottom(g)),
        other => other.clone(),
    }
}
