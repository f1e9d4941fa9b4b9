//! Myhill–Nerode minimization by partition refinement on definable states.

use super::{terms, Automaton};
use crate::defset::{apply, DefRel, Quotient, QuotientSet};
use crate::error::{Error, Result};
use crate::theory::{Formula, Term, Var};

/// Result of [`Automaton::minimize`].
#[derive(Clone, Debug)]
pub struct Minimized {
    /// The reachable part, carrying the coarsest congruence as its state
    /// equivalence.
    pub automaton: Automaton,
    pub rounds: usize,
    pub reachable_orbits: usize,
    pub class_orbits: usize,
}

impl Automaton {
    pub fn minimize(&self, cap: usize) -> Result<Minimized> {
        self.require_deterministic()?;
        let reach = self.reachable_states(cap)?;
        let trimmed = Automaton::from_edges(
            self.alphabet.clone(),
            reach.clone(),
            self.initial.intersect(&reach)?,
            self.final_states.intersect(&reach)?,
            self.edges(),
            true,
        )?;
        let states = trimmed.states.clone();

        let mut parts = Vec::new();
        for a in states.variants() {
            for b in states.variants() {
                let xs = terms(&Var::coords(a.arity + b.arity));
                let fa = trimmed.final_states.contains_at(&a.tag, &xs[..a.arity]);
                let fb = trimmed.final_states.contains_at(&b.tag, &xs[a.arity..]);
                parts.push(((a.tag.clone(), b.tag.clone()), Formula::iff(fa, fb)));
            }
        }
        let mut eq = DefRel::new(states.clone(), states.clone(), parts)?;
        let edges = trimmed.edges();
        let mut rounds = 0;
        loop {
            let mut refined = Vec::new();
            for (a, b, cur) in eq.parts() {
                let (m, n) = (states.arity(a).unwrap(), states.arity(b).unwrap());
                let xs = terms(&Var::coords(m + n));
                let mut conj = vec![cur.clone()];
                for ea in edges.iter().filter(|e| &e.from == a) {
                    for eb in edges.iter().filter(|e| &e.from == b && e.letter == ea.letter) {
                        let l = trimmed.letter_arity(&ea.letter);
                        let lv = Var::fresh_vec(l);
                        let x2 = Var::fresh_vec(states.arity(&ea.to).unwrap());
                        let y2 = Var::fresh_vec(states.arity(&eb.to).unwrap());
                        let (lt, x2t, y2t) = (terms(&lv), terms(&x2), terms(&y2));
                        let step_a: Vec<Term> = [&lt[..], &xs[..m], &x2t[..]].concat();
                        let step_b: Vec<Term> = [&lt[..], &xs[m..], &y2t[..]].concat();
                        let both = Formula::and([apply(&ea.formula, &step_a), apply(&eb.formula, &step_b)]);
                        let after = eq.holds(&ea.to, &eb.to, &x2t, &y2t);
                        let vars: Vec<Var> = lv.into_iter().chain(x2).chain(y2).collect();
                        conj.push(Formula::forall_many(vars, Formula::implies(both, after)));
                    }
                }
                refined.push(((a.clone(), b.clone()), Formula::and(conj)));
            }
            let next = DefRel::new(states.clone(), states.clone(), refined)?;
            rounds += 1;
            if eq.is_subset(&next)? {
                break;
            }
            if rounds >= cap {
                return Err(Error::CapExceeded {
                    what: "partition refinement".into(),
                    iterations: cap,
                });
            }
            eq = next;
        }
        let reachable_orbits = states.count_orbits(true);
        let class_orbits = Quotient::trusted(QuotientSet::new(states, eq.clone())).count_orbits(true);
        let automaton = trimmed.with_state_eq(eq)?;
        Ok(Minimized {
            automaton,
            rounds,
            reachable_orbits,
            class_orbits,
        })
    }
}
