//! Definable automata: alphabet, states, initial and final subsets and a
//! transition relation from `Σ × S` to `S`, all given by formulas.

mod minimize;
mod register;

use std::collections::BTreeMap;
use std::fmt;

use crate::defset::{apply, DefRel, DefSet, Element, Tag, Variant};
use crate::error::{Error, Result};
use crate::fixpoint::reflexive_transitive_closure;
use crate::theory::{canonical, is_sat, Formula, Term, TheoryConfig, Var};

pub use minimize::Minimized;
pub use register::{RaEdge, RegisterAutomaton, BOTTOM};

/// A finite sequence of letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Element>);

impl Word {
    pub fn new(letters: Vec<Element>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Element] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).cloned().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("]")
    }
}

/// One transition constraint: letter variant, source and target state
/// variants, and a formula over the letter coordinates followed by the
/// source and then the target coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub letter: Tag,
    pub from: Tag,
    pub to: Tag,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    alphabet: DefSet,
    states: DefSet,
    initial: DefSet,
    final_states: DefSet,
    transition: DefRel,
    deterministic: bool,
    state_eq: Option<DefRel>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductOp {
    And,
    Xor,
}

/// Outcome of [`Automaton::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub violations: Vec<String>,
    pub deterministic: bool,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Automaton {
    pub fn new(
        alphabet: DefSet,
        states: DefSet,
        initial: DefSet,
        final_states: DefSet,
        transition: DefRel,
        deterministic: bool,
    ) -> Result<Self> {
        let theory = alphabet
            .theory()
            .merge(states.theory())?
            .merge(initial.theory())?
            .merge(final_states.theory())?
            .merge(transition.theory())?;
        if initial.shape() != states.shape() || final_states.shape() != states.shape() {
            return Err(Error::InvalidAutomaton(
                "initial and final sets must use the tags and arities of the states".into(),
            ));
        }
        let domain = alphabet.product(&states)?;
        if transition.domain().shape() != domain.shape() || transition.codomain().shape() != states.shape() {
            return Err(Error::InvalidAutomaton(
                "transition must relate alphabet × states to states".into(),
            ));
        }
        let alphabet = alphabet.with_theory(theory.clone());
        let states = states.with_theory(theory.clone());
        let transition = DefRel::new(
            domain.with_theory(theory.clone()),
            states.clone(),
            transition
                .parts()
                .map(|(a, b, f)| ((a.clone(), b.clone()), f.clone()))
                .collect::<Vec<_>>(),
        )?;
        Ok(Automaton {
            alphabet,
            states,
            initial: initial.with_theory(theory.clone()),
            final_states: final_states.with_theory(theory),
            transition,
            deterministic,
            state_eq: None,
        })
    }

    /// Builds the transition relation from edge constraints.
    pub fn from_edges(
        alphabet: DefSet,
        states: DefSet,
        initial: DefSet,
        final_states: DefSet,
        edges: Vec<Edge>,
        deterministic: bool,
    ) -> Result<Self> {
        let domain = alphabet.product(&states)?;
        let transition = DefRel::new(
            domain,
            states.clone(),
            edges
                .into_iter()
                .map(|e| ((Tag::pair(e.letter, e.from), e.to), e.formula))
                .collect::<Vec<_>>(),
        )?;
        Automaton::new(alphabet, states, initial, final_states, transition, deterministic)
    }

    pub fn theory(&self) -> &TheoryConfig {
        self.states.theory()
    }

    pub fn alphabet(&self) -> &DefSet {
        &self.alphabet
    }

    pub fn states(&self) -> &DefSet {
        &self.states
    }

    pub fn initial(&self) -> &DefSet {
        &self.initial
    }

    pub fn final_states(&self) -> &DefSet {
        &self.final_states
    }

    pub fn transition(&self) -> &DefRel {
        &self.transition
    }

    pub fn deterministic_flag(&self) -> bool {
        self.deterministic
    }

    /// The congruence on states produced by minimization, if any. States
    /// related by it are interchangeable.
    pub fn state_eq(&self) -> Option<&DefRel> {
        self.state_eq.as_ref()
    }

    pub fn with_state_eq(mut self, eq: DefRel) -> Result<Self> {
        if eq.domain().shape() != self.states.shape() || eq.codomain().shape() != self.states.shape() {
            return Err(Error::InvalidAutomaton(
                "state equivalence must relate states to states".into(),
            ));
        }
        self.state_eq = Some(eq);
        Ok(self)
    }

    pub fn with_final(&self, final_states: DefSet) -> Result<Self> {
        let mut a = Automaton::new(
            self.alphabet.clone(),
            self.states.clone(),
            self.initial.clone(),
            final_states,
            self.transition.clone(),
            self.deterministic,
        )?;
        a.state_eq = self.state_eq.clone();
        Ok(a)
    }

    /// Transition edges, one per nonempty part.
    pub fn edges(&self) -> Vec<Edge> {
        self.transition
            .parts()
            .map(|(from, to, f)| {
                let (letter, state) = from.split().expect("transition domain is a product");
                Edge {
                    letter: letter.clone(),
                    from: state.clone(),
                    to: to.clone(),
                    formula: f.clone(),
                }
            })
            .collect()
    }

    fn letter_arity(&self, t: &Tag) -> usize {
        self.alphabet.arity(t).expect("letter tag of the alphabet")
    }

    fn state_arity(&self, t: &Tag) -> usize {
        self.states.arity(t).expect("state tag")
    }

    /// Checks the structural invariants and whether the automaton is
    /// deterministic (a single initial point and a total, single-valued
    /// transition).
    pub fn validate(&self) -> Validation {
        let mut violations = Vec::new();
        for (what, sub) in [("initial", &self.initial), ("final", &self.final_states)] {
            let outside = sub.difference(&self.states).expect("same shape");
            if let Some(w) = outside.witness() {
                violations.push(format!("{what} set escapes the states, e.g. {w}"));
            }
        }
        let deterministic = self.has_single_initial() && self.transition.is_function();
        if self.deterministic && !deterministic {
            let why = if !self.has_single_initial() {
                "initial set is not a single point"
            } else if !self.transition.is_total() {
                "transition is not total"
            } else {
                "transition is not single-valued"
            };
            violations.push(format!("declared deterministic, but the {why}"));
        }
        Validation {
            violations,
            deterministic,
        }
    }

    fn has_single_initial(&self) -> bool {
        let Some(_) = self.initial.witness() else { return false };
        let theory = self.theory();
        for a in self.initial.variants() {
            for b in self.initial.variants() {
                let x = terms(&Var::fresh_vec(a.arity));
                let y = terms(&Var::fresh_vec(b.arity));
                let both = Formula::and([a.at(&x), b.at(&y)]);
                let same = if a.tag == b.tag {
                    Formula::tuple_eq(&x, &y)
                } else {
                    Formula::False
                };
                if !crate::theory::implies(&both, &same, theory) {
                    return false;
                }
            }
        }
        true
    }

    fn require_valid(&self) -> Result<()> {
        let v = self.validate();
        match v.violations.first() {
            Some(m) => Err(Error::InvalidAutomaton(m.clone())),
            None => Ok(()),
        }
    }

    fn require_deterministic(&self) -> Result<()> {
        let v = self.validate();
        if let Some(m) = v.violations.first() {
            return Err(Error::InvalidAutomaton(m.clone()));
        }
        if !v.deterministic {
            return Err(Error::NotDeterministic(
                "needs a single initial state and a functional transition".into(),
            ));
        }
        Ok(())
    }

    /// The relation on states performed by one concrete letter.
    pub fn letter_step(&self, letter: &Element) -> Result<DefRel> {
        if !self
            .alphabet
            .member(letter)
            .map_err(|e| Error::AlphabetMismatch(e.to_string()))?
        {
            return Err(Error::AlphabetMismatch(format!(
                "{letter} is not a letter of the alphabet"
            )));
        }
        let consts = letter.terms();
        let parts: Vec<_> = self
            .edges()
            .into_iter()
            .filter(|e| e.letter == letter.tag)
            .map(|e| {
                let m = self.state_arity(&e.from) + self.state_arity(&e.to);
                let args: Vec<Term> = consts.iter().cloned().chain(terms(&Var::coords(m))).collect();
                ((e.from, e.to), apply(&e.formula, &args))
            })
            .collect();
        DefRel::new(self.states.clone(), self.states.clone(), parts)
    }

    /// The states reachable after reading `w`.
    pub fn run(&self, w: &Word) -> Result<DefSet> {
        let mut current = self.initial.clone();
        for letter in w.letters() {
            current = self.letter_step(letter)?.image(&current)?;
        }
        Ok(current)
    }

    pub fn accepts(&self, w: &Word) -> Result<bool> {
        self.require_valid()?;
        Ok(!self.run(w)?.intersect(&self.final_states)?.is_empty())
    }

    /// `{(s, s') : ∃ℓ. δ(ℓ, s, s')}`.
    pub fn step_relation(&self) -> DefRel {
        let parts: Vec<_> = self
            .edges()
            .into_iter()
            .map(|e| {
                let l = self.letter_arity(&e.letter);
                let m = self.state_arity(&e.from) + self.state_arity(&e.to);
                let lv = Var::fresh_vec(l);
                let args: Vec<Term> = terms(&lv).into_iter().chain(terms(&Var::coords(m))).collect();
                let f = Formula::exists_many(lv, apply(&e.formula, &args));
                ((e.from, e.to), canonical(&f, self.theory()))
            })
            .collect();
        DefRel::new(self.states.clone(), self.states.clone(), parts).expect("state tags")
    }

    /// States reachable from the initial ones.
    pub fn reachable_states(&self, cap: usize) -> Result<DefSet> {
        let step = self.step_relation();
        let mut seen = self.initial.clone();
        for _ in 0..=cap {
            let next = seen.union(&step.image(&seen)?)?;
            if next.is_subset(&seen)? {
                return Ok(seen);
            }
            seen = next;
        }
        Err(Error::CapExceeded {
            what: "reachable states".into(),
            iterations: cap,
        })
    }

    /// Decides emptiness through the reflexive-transitive closure of the
    /// one-step relation on states.
    pub fn is_empty(&self, cap: usize) -> Result<bool> {
        self.require_valid()?;
        let star = reflexive_transitive_closure(&self.step_relation(), cap)?;
        let reach = star.image(&self.initial)?;
        Ok(reach.intersect(&self.final_states)?.is_empty())
    }

    /// A shortest accepted word, if any.
    pub fn witness(&self, cap: usize) -> Result<Option<Word>> {
        self.require_valid()?;
        let step = self.step_relation();
        let mut layers = vec![self.initial.clone()];
        let mut seen = self.initial.clone();
        loop {
            let last = layers.last().unwrap();
            let hit = last.intersect(&self.final_states)?;
            if let Some(target) = hit.witness() {
                return self.backtrack(&layers, target).map(Some);
            }
            if layers.len() > cap {
                return Err(Error::CapExceeded {
                    what: "witness search".into(),
                    iterations: cap,
                });
            }
            let next = step.image(last)?;
            let grown = seen.union(&next)?;
            if grown.is_subset(&seen)? {
                return Ok(None);
            }
            seen = grown;
            layers.push(next);
        }
    }

    fn backtrack(&self, layers: &[DefSet], mut target: Element) -> Result<Word> {
        let mut letters = Vec::new();
        for layer in layers[..layers.len() - 1].iter().rev() {
            let mut found = None;
            for e in self.edges().into_iter().filter(|e| e.to == target.tag) {
                let l = self.letter_arity(&e.letter);
                let m = self.state_arity(&e.from);
                let xs = terms(&Var::coords(l + m));
                let args: Vec<Term> = xs.iter().cloned().chain(target.terms()).collect();
                let f = Formula::and([apply(&e.formula, &args), layer.contains_at(&e.from, &xs[l..])]);
                let probe = DefSet::single(self.theory().clone(), Tag::name("probe"), l + m, f)?;
                if let Some(w) = probe.witness() {
                    let (lt, st) = w.tuple.split_at(l);
                    found = Some((
                        Element::new(e.letter.clone(), lt.to_vec()),
                        Element::new(e.from.clone(), st.to_vec()),
                    ));
                    break;
                }
            }
            let (letter, prev) = found.expect("every layer state has a predecessor in the previous layer");
            letters.push(letter);
            target = prev;
        }
        letters.reverse();
        Ok(Word(letters))
    }

    /// The accepted words of length `k`, as a subset of `Σ^k`.
    pub fn accepted_words_of_length(&self, k: usize) -> Result<DefSet> {
        self.require_valid()?;
        let theory = self.theory().clone();
        if k == 0 {
            let meets = !self.initial.intersect(&self.final_states)?.is_empty();
            return Ok(DefSet::unit(theory).map_constraints(|_| if meets { Formula::True } else { Formula::False }));
        }
        // (letter-sequence tag, state tag) -> (letter arity, formula over letters then state)
        let mut acc: BTreeMap<(Option<Tag>, Tag), (usize, Formula)> = BTreeMap::new();
        for v in self.initial.variants() {
            if v.constraint != Formula::False {
                acc.insert((None, v.tag.clone()), (0, v.constraint.clone()));
            }
        }
        let edges = self.edges();
        for _ in 0..k {
            let mut next: BTreeMap<(Option<Tag>, Tag), (usize, Vec<Formula>)> = BTreeMap::new();
            for ((seq, st), (la, f)) in &acc {
                for e in edges.iter().filter(|e| &e.from == st) {
                    let a = self.letter_arity(&e.letter);
                    let m = self.state_arity(&e.from);
                    let n = self.state_arity(&e.to);
                    let out = terms(&Var::coords(la + a + n));
                    let sv = Var::fresh_vec(m);
                    let st_t = terms(&sv);
                    let old_args: Vec<Term> = out[..*la].iter().cloned().chain(st_t.iter().cloned()).collect();
                    let edge_args: Vec<Term> = out[*la..la + a]
                        .iter()
                        .cloned()
                        .chain(st_t.iter().cloned())
                        .chain(out[la + a..].iter().cloned())
                        .collect();
                    let body =
                        Formula::exists_many(sv, Formula::and([apply(f, &old_args), apply(&e.formula, &edge_args)]));
                    let tag = match seq {
                        None => e.letter.clone(),
                        Some(t) => Tag::pair(t.clone(), e.letter.clone()),
                    };
                    next.entry((Some(tag), e.to.clone()))
                        .or_insert_with(|| (la + a, Vec::new()))
                        .1
                        .push(body);
                }
            }
            acc = next
                .into_iter()
                .map(|(key, (la, fs))| (key, (la, canonical(&Formula::or(fs), &theory))))
                .filter(|(_, (_, f))| *f != Formula::False)
                .collect();
        }
        let mut words: BTreeMap<Tag, Vec<Formula>> = BTreeMap::new();
        for ((seq, st), (la, f)) in &acc {
            let m = self.state_arity(st);
            let sv = Var::fresh_vec(m);
            let st_t = terms(&sv);
            let args: Vec<Term> = terms(&Var::coords(*la))
                .into_iter()
                .chain(st_t.iter().cloned())
                .collect();
            let body = Formula::exists_many(
                sv,
                Formula::and([apply(f, &args), self.final_states.contains_at(st, &st_t)]),
            );
            words.entry(seq.clone().unwrap()).or_default().push(body);
        }
        let mut sigma_k = self.alphabet.clone();
        for _ in 1..k {
            sigma_k = sigma_k.product(&self.alphabet)?;
        }
        Ok(sigma_k.map_constraints(|v| {
            Formula::and([
                v.constraint.clone(),
                Formula::or(words.get(&v.tag).cloned().unwrap_or_default()),
            ])
        }))
    }

    /// Adds a rejecting sink state when the transition is not total.
    pub fn totalize(&self) -> Result<Automaton> {
        if self.transition.is_total() {
            return Ok(self.clone());
        }
        let mut name = String::from("sink");
        while self.states.variant(&Tag::name(&name)).is_some() {
            name.push('_');
        }
        let sink = Tag::name(&name);
        let theory = self.theory().clone();
        let mut variants = self.states.variants().to_vec();
        variants.push(Variant::new(sink.clone(), 0, Formula::True));
        let states = DefSet::new(theory.clone(), variants)?;
        let extend = |s: &DefSet| {
            let mut vs = s.variants().to_vec();
            vs.push(Variant::new(sink.clone(), 0, Formula::False));
            DefSet::new(theory.clone(), vs)
        };
        let initial = extend(&self.initial)?;
        let final_states = extend(&self.final_states)?;
        let mut edges = self.edges();
        let support = self.transition.support();
        for lv in self.alphabet.variants() {
            edges.push(Edge {
                letter: lv.tag.clone(),
                from: sink.clone(),
                to: sink.clone(),
                formula: lv.constraint.clone(),
            });
            for sv in self.states.variants() {
                let pair = Tag::pair(lv.tag.clone(), sv.tag.clone());
                let stuck = Formula::and([
                    Formula::not(support.constraint(&pair)),
                    lv.constraint.clone(),
                    sv.at(&terms(&Var::coords(lv.arity + sv.arity))[lv.arity..]),
                ]);
                if is_sat(&stuck, &theory) {
                    edges.push(Edge {
                        letter: lv.tag.clone(),
                        from: sv.tag.clone(),
                        to: sink.clone(),
                        formula: stuck,
                    });
                }
            }
        }
        Automaton::from_edges(
            self.alphabet.clone(),
            states,
            initial,
            final_states,
            edges,
            self.deterministic,
        )
    }

    /// Synchronous product of two deterministic automata over one alphabet.
    pub fn product(&self, other: &Automaton, op: ProductOp) -> Result<Automaton> {
        if self.alphabet.shape() != other.alphabet.shape() || !self.alphabet.set_eq(&other.alphabet)? {
            return Err(Error::AlphabetMismatch("product needs identical alphabets".into()));
        }
        self.require_deterministic()?;
        other.require_deterministic()?;
        let a = self.totalize()?;
        let b = other.totalize()?;
        let states = a.states.product(&b.states)?;
        let initial = a.initial.product(&b.initial)?;
        let final_states = states.map_constraints(|v| {
            let (p, q) = v.tag.split().unwrap();
            let m = a.state_arity(p);
            let xs = terms(&Var::coords(v.arity));
            let fa = a.final_states.contains_at(p, &xs[..m]);
            let fb = b.final_states.contains_at(q, &xs[m..]);
            let c = match op {
                ProductOp::And => Formula::and([fa, fb]),
                ProductOp::Xor => Formula::not(Formula::iff(fa, fb)),
            };
            Formula::and([v.constraint.clone(), c])
        });
        let mut edges = Vec::new();
        for ea in a.edges() {
            for eb in b.edges().into_iter().filter(|e| e.letter == ea.letter) {
                let l = a.letter_arity(&ea.letter);
                let (p, q) = (a.state_arity(&ea.from), b.state_arity(&eb.from));
                let (p2, q2) = (a.state_arity(&ea.to), b.state_arity(&eb.to));
                let xs = terms(&Var::coords(l + p + q + p2 + q2));
                let letter = &xs[..l];
                let (src_a, rest) = xs[l..].split_at(p);
                let (src_b, rest) = rest.split_at(q);
                let (dst_a, dst_b) = rest.split_at(p2);
                let fa: Vec<Term> = [letter, src_a, dst_a].concat();
                let fb: Vec<Term> = [letter, src_b, dst_b].concat();
                edges.push(Edge {
                    letter: ea.letter.clone(),
                    from: Tag::pair(ea.from.clone(), eb.from.clone()),
                    to: Tag::pair(ea.to.clone(), eb.to.clone()),
                    formula: Formula::and([apply(&ea.formula, &fa), apply(&eb.formula, &fb)]),
                });
            }
        }
        Automaton::from_edges(a.alphabet.clone(), states, initial, final_states, edges, true)
    }

    /// Same language, decided by emptiness of the symmetric-difference product.
    pub fn language_equiv(&self, other: &Automaton, cap: usize) -> Result<bool> {
        self.product(other, ProductOp::Xor)?.is_empty(cap)
    }

    /// Number of orbits of the state space, or of its classes after
    /// minimization.
    pub fn state_orbits(&self) -> usize {
        match &self.state_eq {
            Some(eq) => {
                crate::defset::Quotient::trusted(crate::defset::QuotientSet::new(self.states.clone(), eq.clone()))
                    .count_orbits(true)
            }
            None => self.states.count_orbits(true),
        }
    }
}

pub fn combine_automata(op: ProductOp, a: &Automaton, b: &Automaton) -> Result<Automaton> {
    a.product(b, op)
}

pub(crate) fn terms(vars: &[Var]) -> Vec<Term> {
    vars.iter().map(Term::from).collect()
}
