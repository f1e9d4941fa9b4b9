//! Promonoids: monoid objects among definable relations. The
//! multiplication is a relation `μ ⊆ (M × M) × M` and the unit a subset of
//! `M`. Words act on subsets of the carrier by right multiplication.

use crate::automata::{Automaton, Edge, Word};
use crate::defset::{DefRel, DefSet, Element, Tag};
use crate::error::{Error, Result};
use crate::theory::{equivalent, find_model, Formula, Term, TheoryConfig, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Promonoid {
    carrier: DefSet,
    mult: DefRel,
    unit: DefSet,
}

/// Verdict on one monoid law; on failure, a tuple where the two sides differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawCheck {
    pub holds: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawReport {
    pub associativity: LawCheck,
    /// `η·m = m`
    pub left_unit: LawCheck,
    /// `m·η = m`
    pub right_unit: LawCheck,
}

impl LawReport {
    pub fn all_hold(&self) -> bool {
        self.associativity.holds && self.left_unit.holds && self.right_unit.holds
    }

    pub fn first_failure(&self) -> Option<&'static str> {
        [
            ("associativity", &self.associativity),
            ("left unit", &self.left_unit),
            ("right unit", &self.right_unit),
        ]
        .into_iter()
        .find(|(_, c)| !c.holds)
        .map(|(n, _)| n)
    }
}

fn terms(vars: &[Var]) -> Vec<Term> {
    vars.iter().map(Term::from).collect()
}

impl Promonoid {
    pub fn new(carrier: DefSet, mult: DefRel, unit: DefSet) -> Result<Self> {
        let square = carrier.product(&carrier)?;
        if mult.domain().shape() != square.shape() || mult.codomain().shape() != carrier.shape() {
            return Err(Error::shape("multiplication must relate carrier × carrier to carrier"));
        }
        if unit.shape() != carrier.shape() {
            return Err(Error::shape("unit must be a subset of the carrier"));
        }
        let theory = carrier.theory().merge(mult.theory())?.merge(unit.theory())?;
        let carrier = carrier.with_theory(theory.clone());
        let unit = unit.intersect(&carrier)?;
        Ok(Promonoid { carrier, mult, unit })
    }

    pub fn theory(&self) -> &TheoryConfig {
        self.carrier.theory()
    }

    pub fn carrier(&self) -> &DefSet {
        &self.carrier
    }

    pub fn mult(&self) -> &DefRel {
        &self.mult
    }

    pub fn unit(&self) -> &DefSet {
        &self.unit
    }

    fn arity(&self, t: &Tag) -> usize {
        self.carrier.arity(t).expect("carrier tag")
    }

    /// `μ(x, y ↦ z)`.
    fn mu(&self, a: &Tag, x: &[Term], b: &Tag, y: &[Term], c: &Tag, z: &[Term]) -> Formula {
        let xy: Vec<Term> = x.iter().chain(y).cloned().collect();
        self.mult.holds(&Tag::pair(a.clone(), b.clone()), c, &xy, z)
    }

    /// `{z : ∃x ∈ xs, y ∈ ys. μ(x, y ↦ z)}`.
    pub fn multiply(&self, xs: &DefSet, ys: &DefSet) -> Result<DefSet> {
        self.mult.image(&xs.product(ys)?)
    }

    pub fn check_laws(&self) -> LawReport {
        let tags: Vec<Tag> = self.carrier.tags().cloned().collect();
        let theory = self.theory();
        let mut assoc = LawCheck {
            holds: true,
            witness: None,
        };
        'outer: for a in &tags {
            for b in &tags {
                for c in &tags {
                    for d in &tags {
                        let x = terms(&Var::fresh_vec(self.arity(a)));
                        let y = terms(&Var::fresh_vec(self.arity(b)));
                        let z = terms(&Var::fresh_vec(self.arity(c)));
                        let w = terms(&Var::fresh_vec(self.arity(d)));
                        let lhs = Formula::or(tags.iter().map(|e| {
                            let u = Var::fresh_vec(self.arity(e));
                            let ut = terms(&u);
                            Formula::exists_many(
                                u,
                                Formula::and([self.mu(a, &x, b, &y, e, &ut), self.mu(e, &ut, c, &z, d, &w)]),
                            )
                        }));
                        let rhs = Formula::or(tags.iter().map(|f| {
                            let v = Var::fresh_vec(self.arity(f));
                            let vt = terms(&v);
                            Formula::exists_many(
                                v,
                                Formula::and([self.mu(b, &y, c, &z, f, &vt), self.mu(a, &x, f, &vt, d, &w)]),
                            )
                        }));
                        if !equivalent(&lhs, &rhs, theory) {
                            let diff = Formula::not(Formula::iff(lhs, rhs));
                            let shown = describe(&diff, theory, &[(a, &x), (b, &y), (c, &z), (d, &w)]);
                            assoc = LawCheck {
                                holds: false,
                                witness: Some(shown),
                            };
                            break 'outer;
                        }
                    }
                }
            }
        }
        let left_unit = self.unit_law(true);
        let right_unit = self.unit_law(false);
        LawReport {
            associativity: assoc,
            left_unit,
            right_unit,
        }
    }

    fn unit_law(&self, left: bool) -> LawCheck {
        let tags: Vec<Tag> = self.carrier.tags().cloned().collect();
        let theory = self.theory();
        for a in &tags {
            for d in &tags {
                let x = terms(&Var::fresh_vec(self.arity(a)));
                let w = terms(&Var::fresh_vec(self.arity(d)));
                let acted = Formula::or(tags.iter().map(|e| {
                    let u = Var::fresh_vec(self.arity(e));
                    let ut = terms(&u);
                    let m = if left {
                        self.mu(e, &ut, a, &x, d, &w)
                    } else {
                        self.mu(a, &x, e, &ut, d, &w)
                    };
                    Formula::exists_many(u, Formula::and([self.unit.contains_at(e, &ut), m]))
                }));
                let same = if a == d {
                    Formula::and([self.carrier.contains_at(a, &x), Formula::tuple_eq(&x, &w)])
                } else {
                    Formula::False
                };
                if !equivalent(&acted, &same, theory) {
                    let diff = Formula::not(Formula::iff(acted, same));
                    return LawCheck {
                        holds: false,
                        witness: Some(describe(&diff, theory, &[(a, &x), (d, &w)])),
                    };
                }
            }
        }
        LawCheck {
            holds: true,
            witness: None,
        }
    }
}

/// Renders a model of `diff` as tagged tuples.
fn describe(diff: &Formula, theory: &TheoryConfig, parts: &[(&Tag, &[Term])]) -> String {
    let Some(model) = find_model(diff, theory, &[]) else {
        return String::from("?");
    };
    let mut used: Vec<_> = model.values().cloned().collect();
    let shown: Vec<String> = parts
        .iter()
        .map(|(tag, ts)| {
            let atoms = ts
                .iter()
                .map(|t| match t {
                    Term::Var(v) => model.get(v).cloned().unwrap_or_else(|| {
                        let a = theory.fresh_atom(&used);
                        used.push(a.clone());
                        a
                    }),
                    Term::Const(a) => a.clone(),
                })
                .collect();
            Element::new((*tag).clone(), atoms).to_string()
        })
        .collect();
    shown.join(" ")
}

/// A language recognizer: a promonoid, a relational letter map into it and
/// an accepting subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recognizer {
    promonoid: Promonoid,
    alphabet: DefSet,
    letters: DefRel,
    accepting: DefSet,
}

impl Recognizer {
    pub fn new(promonoid: Promonoid, alphabet: DefSet, letters: DefRel, accepting: DefSet) -> Result<Self> {
        if letters.domain().shape() != alphabet.shape() || letters.codomain().shape() != promonoid.carrier.shape() {
            return Err(Error::shape("letter map must relate the alphabet to the carrier"));
        }
        if accepting.shape() != promonoid.carrier.shape() {
            return Err(Error::shape("accepting set must be a subset of the carrier"));
        }
        let accepting = accepting.intersect(&promonoid.carrier)?;
        Ok(Recognizer {
            promonoid,
            alphabet,
            letters,
            accepting,
        })
    }

    pub fn promonoid(&self) -> &Promonoid {
        &self.promonoid
    }

    pub fn alphabet(&self) -> &DefSet {
        &self.alphabet
    }

    pub fn letters(&self) -> &DefRel {
        &self.letters
    }

    pub fn accepting(&self) -> &DefSet {
        &self.accepting
    }

    /// `h(ℓ)` as a subset of the carrier.
    pub fn letter_image(&self, letter: &Element) -> Result<DefSet> {
        if !self
            .alphabet
            .member(letter)
            .map_err(|e| Error::AlphabetMismatch(e.to_string()))?
        {
            return Err(Error::AlphabetMismatch(format!(
                "{letter} is not a letter of the alphabet"
            )));
        }
        self.letters.image(&self.alphabet.singleton(letter)?)
    }

    /// The subset of the carrier a word is sent to: the unit, multiplied on
    /// the right by each letter's image in turn.
    pub fn word_image(&self, w: &Word) -> Result<DefSet> {
        let mut current = self.promonoid.unit.clone();
        for letter in w.letters() {
            current = self.promonoid.multiply(&current, &self.letter_image(letter)?)?;
        }
        Ok(current)
    }

    pub fn recognizes(&self, w: &Word) -> Result<bool> {
        Ok(!self.word_image(w)?.intersect(&self.accepting)?.is_empty())
    }

    /// The automaton with the carrier as states, the unit as initial states
    /// and right multiplication by letter images as transitions.
    pub fn to_nfa(&self) -> Result<Automaton> {
        let report = self.promonoid.check_laws();
        if let Some(law) = report.first_failure() {
            return Err(Error::LawFailure(format!("{law} does not hold")));
        }
        let p = &self.promonoid;
        let mut edges = Vec::new();
        for lv in self.alphabet.variants() {
            for m in p.carrier.variants() {
                for out in p.carrier.variants() {
                    let xs = terms(&Var::coords(lv.arity + m.arity + out.arity));
                    let (letter, rest) = xs.split_at(lv.arity);
                    let (src, dst) = rest.split_at(m.arity);
                    let body = Formula::or(p.carrier.variants().iter().map(|n| {
                        let nv = Var::fresh_vec(n.arity);
                        let nt = terms(&nv);
                        Formula::exists_many(
                            nv,
                            Formula::and([
                                self.letters.holds(&lv.tag, &n.tag, letter, &nt),
                                p.mu(&m.tag, src, &n.tag, &nt, &out.tag, dst),
                            ]),
                        )
                    }));
                    edges.push(Edge {
                        letter: lv.tag.clone(),
                        from: m.tag.clone(),
                        to: out.tag.clone(),
                        formula: crate::theory::canonical(&body, p.theory()),
                    });
                }
            }
        }
        Automaton::from_edges(
            self.alphabet.clone(),
            p.carrier.clone(),
            p.unit.clone(),
            self.accepting.clone(),
            edges,
            false,
        )
    }
}

/// Binary relations on `s` under composition, with the diagonal as unit.
pub fn relation_promonoid(s: &DefSet) -> Result<Promonoid> {
    let carrier = s.product(s)?;
    let mut parts = Vec::new();
    for a in s.variants() {
        for b in s.variants() {
            for d in s.variants() {
                // ((a, b), (b, d)) ↦ (a, d)
                let (ka, kb, kd) = (a.arity, b.arity, d.arity);
                let xs = terms(&Var::coords(ka + kb + kb + kd + ka + kd));
                let (left_a, rest) = xs.split_at(ka);
                let (left_b, rest) = rest.split_at(kb);
                let (right_b, rest) = rest.split_at(kb);
                let (right_d, rest) = rest.split_at(kd);
                let (out_a, out_d) = rest.split_at(ka);
                let f = Formula::and([
                    Formula::tuple_eq(left_b, right_b),
                    Formula::tuple_eq(out_a, left_a),
                    Formula::tuple_eq(out_d, right_d),
                ]);
                let ab = Tag::pair(a.tag.clone(), b.tag.clone());
                let bd = Tag::pair(b.tag.clone(), d.tag.clone());
                parts.push(((Tag::pair(ab, bd), Tag::pair(a.tag.clone(), d.tag.clone())), f));
            }
        }
    }
    let mult = DefRel::new(carrier.product(&carrier)?, carrier.clone(), parts)?;
    let unit = carrier.map_constraints(|v| {
        let (a, b) = v.tag.split().unwrap();
        if a == b {
            let xs = terms(&Var::coords(v.arity));
            let k = v.arity / 2;
            Formula::and([v.constraint.clone(), Formula::tuple_eq(&xs[..k], &xs[k..])])
        } else {
            Formula::False
        }
    });
    Promonoid::new(carrier, mult, unit)
}

/// The recognizer of an automaton's language inside the relation promonoid
/// of its states: a letter goes to its transition relation, and a pair of
/// states is accepting when it joins an initial to a final state.
pub fn from_nfa(a: &Automaton) -> Result<Recognizer> {
    let v = a.validate();
    if let Some(m) = v.violations.first() {
        return Err(Error::InvalidAutomaton(m.clone()));
    }
    let p = relation_promonoid(a.states())?;
    let parts: Vec<_> = a
        .edges()
        .into_iter()
        .map(|e| ((e.letter, Tag::pair(e.from, e.to)), e.formula))
        .collect();
    let letters = DefRel::new(a.alphabet().clone(), p.carrier.clone(), parts)?;
    let accepting = a.initial().product(a.final_states())?;
    Recognizer::new(p, a.alphabet().clone(), letters, accepting)
}
