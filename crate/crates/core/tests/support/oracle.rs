//! Reference semantics by exhaustive search.
//!
//! Nothing in here calls the decision procedure. A quantifier ranges over a
//! finite candidate set that realizes every one-variable extension of the
//! current assignment, and configurations of machines are explored over
//! small atom pools, identified up to automorphisms fixing the constants.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use atomata_core::automata::{Automaton, Edge, RegisterAutomaton, Word, BOTTOM};
use atomata_core::defset::{DefRel, DefSet, Element, Tag};
use atomata_core::theory::{Atom, Formula, Term, TheoryKind, Var};
use num_bigint::BigInt;
use num_rational::BigRational;

pub type Env = BTreeMap<Var, Atom>;

fn rat(a: &Atom) -> &BigRational {
    a.as_rational().expect("order atoms are rationals")
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn value(t: &Term, env: &Env) -> Atom {
    match t {
        Term::Var(v) => env.get(v).unwrap_or_else(|| panic!("unbound variable {v}")).clone(),
        Term::Const(a) => a.clone(),
    }
}

/// A name not among `used`; never clashes with `@digits` or declared names.
fn fresh_name(used: &BTreeSet<Atom>) -> Atom {
    (1..)
        .map(|n| Atom::name(&format!("#{n}")))
        .find(|a| !used.contains(a))
        .unwrap()
}

/// Candidate values for a new variable: one per one-point type over `vals`.
fn candidates(kind: TheoryKind, vals: &BTreeSet<Atom>) -> Vec<Atom> {
    match kind {
        TheoryKind::Equality => {
            let mut out: Vec<Atom> = vals.iter().cloned().collect();
            out.push(fresh_name(vals));
            out
        }
        TheoryKind::DenseOrder => {
            let qs: Vec<&BigRational> = vals.iter().map(rat).collect();
            let (Some(lo), Some(hi)) = (qs.first(), qs.last()) else {
                return vec![Atom::Rat(int(0))];
            };
            let mut out = vec![Atom::Rat(*lo - int(1))];
            for w in qs.windows(2) {
                out.push(Atom::Rat(w[0].clone()));
                out.push(Atom::Rat((w[0] + w[1]) / int(2)));
            }
            out.push(Atom::Rat((*hi).clone()));
            out.push(Atom::Rat(*hi + int(1)));
            out
        }
    }
}

pub fn eval(phi: &Formula, env: &Env, kind: TheoryKind) -> bool {
    let fixed = phi.constants();
    walk(phi, &mut env.clone(), kind, &fixed)
}

fn walk(phi: &Formula, env: &mut Env, kind: TheoryKind, fixed: &BTreeSet<Atom>) -> bool {
    match phi {
        Formula::True => true,
        Formula::False => false,
        Formula::Eq(a, b) => value(a, env) == value(b, env),
        Formula::Neq(a, b) => value(a, env) != value(b, env),
        Formula::Lt(a, b) => rat(&value(a, env)) < rat(&value(b, env)),
        Formula::And(fs) => fs.iter().all(|f| walk(f, env, kind, fixed)),
        Formula::Or(fs) => fs.iter().any(|f| walk(f, env, kind, fixed)),
        Formula::Not(f) => !walk(f, env, kind, fixed),
        Formula::Implies(a, b) => !walk(a, env, kind, fixed) || walk(b, env, kind, fixed),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let want = matches!(phi, Formula::Exists(..));
            let vals: BTreeSet<Atom> = env.values().chain(fixed).cloned().collect();
            let saved = env.get(v).cloned();
            let mut found = !want;
            for c in candidates(kind, &vals) {
                env.insert(v.clone(), c);
                if walk(body, env, kind, fixed) == want {
                    found = want;
                    break;
                }
            }
            match saved {
                Some(a) => env.insert(v.clone(), a),
                None => env.remove(v),
            };
            found
        }
        Formula::Rel(r, _) => panic!("relation symbol {r} has no meaning here"),
    }
}

pub fn coords_env(t: &[Atom]) -> Env {
    Var::coords(t.len()).into_iter().zip(t.iter().cloned()).collect()
}

pub fn member(s: &DefSet, tag: &Tag, t: &[Atom]) -> bool {
    match s.variant(tag) {
        Some(v) => v.arity == t.len() && eval(&v.constraint, &coords_env(t), s.theory().kind()),
        None => false,
    }
}

pub fn member_elem(s: &DefSet, e: &Element) -> bool {
    member(s, &e.tag, &e.tuple)
}

/// `n` sample atoms avoiding `constants`: fresh names, or the integers
/// `0..n` for the order.
pub fn sample(kind: TheoryKind, n: usize, constants: &BTreeSet<Atom>) -> Vec<Atom> {
    match kind {
        TheoryKind::Equality => (1..)
            .map(|i: usize| Atom::name(&i.to_string()))
            .filter(|a| !constants.contains(a))
            .take(n)
            .collect(),
        TheoryKind::DenseOrder => (0..n as i64).map(|i| Atom::Rat(int(i))).collect(),
    }
}

/// Every map from `vars` into `atoms`.
pub fn assignments(vars: &[Var], atoms: &[Atom]) -> Vec<Env> {
    let mut out = vec![Env::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|env| {
                atoms.iter().map(move |a| {
                    let mut e = env.clone();
                    e.insert(v.clone(), a.clone());
                    e
                })
            })
            .collect();
    }
    out
}

pub fn tuples(atoms: &[Atom], k: usize) -> Vec<Vec<Atom>> {
    let vars = Var::coords(k);
    assignments(&vars, atoms)
        .into_iter()
        .map(|env| vars.iter().map(|v| env[v].clone()).collect())
        .collect()
}

/// Orbits of `A^k` counted as distinct equality or order patterns among
/// all `k`-tuples over `k` sample atoms.
pub fn pattern_orbits(kind: TheoryKind, k: usize) -> usize {
    let atoms = sample(kind, k, &BTreeSet::new());
    let patterns: BTreeSet<Vec<usize>> = tuples(&atoms, k)
        .iter()
        .map(|t| {
            let mut seen: Vec<&Atom> = t.iter().collect();
            seen.sort();
            seen.dedup();
            match kind {
                // first position holding the same atom
                TheoryKind::Equality => t.iter().map(|a| t.iter().position(|b| b == a).unwrap()).collect(),
                // dense rank
                TheoryKind::DenseOrder => t.iter().map(|a| seen.iter().position(|b| *b == a).unwrap()).collect(),
            }
        })
        .collect();
    patterns.len()
}

/// Atom pools and relabelling relative to a finite set of fixed atoms.
#[derive(Clone, Debug)]
pub struct Frame {
    kind: TheoryKind,
    fixed: Vec<Atom>,
}

impl Frame {
    pub fn new(kind: TheoryKind, fixed: impl IntoIterator<Item = Atom>) -> Self {
        let mut fixed: Vec<Atom> = fixed.into_iter().collect();
        fixed.sort();
        fixed.dedup();
        Frame { kind, fixed }
    }

    /// A canonical representative of the orbit of `t` under automorphisms
    /// fixing the fixed atoms.
    pub fn canon(&self, t: &[Atom]) -> Vec<Atom> {
        match self.kind {
            TheoryKind::Equality => {
                // the i-th loose atom becomes the i-th name of a fixed sequence
                let spare: Vec<Atom> = (1..)
                    .map(|n| Atom::name(&format!("~{n}")))
                    .filter(|a| !self.fixed.contains(a))
                    .take(t.len())
                    .collect();
                let mut names: Vec<&Atom> = Vec::new();
                t.iter()
                    .map(|a| {
                        if self.fixed.contains(a) {
                            return a.clone();
                        }
                        let i = names.iter().position(|b| *b == a).unwrap_or_else(|| {
                            names.push(a);
                            names.len() - 1
                        });
                        spare[i].clone()
                    })
                    .collect()
            }
            TheoryKind::DenseOrder => {
                let fixed: Vec<&BigRational> = self.fixed.iter().map(rat).collect();
                let gap = |q: &BigRational| fixed.iter().filter(|f| **f < q).count();
                let mut loose: Vec<&BigRational> = t.iter().filter(|a| !self.fixed.contains(a)).map(rat).collect();
                loose.sort();
                loose.dedup();
                t.iter()
                    .map(|a| {
                        if self.fixed.contains(a) {
                            return a.clone();
                        }
                        let q = rat(a);
                        let g = gap(q);
                        let same: Vec<&&BigRational> = loose.iter().filter(|p| gap(p) == g).collect();
                        let j = same.iter().position(|p| **p == q).unwrap() as i64 + 1;
                        let r = same.len() as i64;
                        let v = if fixed.is_empty() {
                            int(j)
                        } else if g == 0 {
                            fixed[0] - int(r + 1 - j)
                        } else if g == fixed.len() {
                            fixed[g - 1] + int(j)
                        } else {
                            fixed[g - 1] + (fixed[g] - fixed[g - 1]) * int(j) / int(r + 1)
                        };
                        Atom::Rat(v)
                    })
                    .collect()
            }
        }
    }

    /// `m`-tuples realizing every type of an `m`-tuple over `current` and
    /// the fixed atoms, built one coordinate at a time.
    pub fn extensions(&self, current: &[Atom], m: usize) -> Vec<Vec<Atom>> {
        let base: BTreeSet<Atom> = current.iter().chain(&self.fixed).cloned().collect();
        let mut out = vec![Vec::new()];
        for _ in 0..m {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<Atom>| {
                    let mut seen = base.clone();
                    seen.extend(prefix.iter().cloned());
                    candidates(self.kind, &seen).into_iter().map(move |a| {
                        let mut t = prefix.clone();
                        t.push(a);
                        t
                    })
                })
                .collect();
        }
        out
    }
}

/// Breadth-first search over configurations.
pub fn search<S: Ord + Clone>(
    starts: impl IntoIterator<Item = S>,
    mut succ: impl FnMut(&S) -> Vec<S>,
    mut goal: impl FnMut(&S) -> bool,
) -> bool {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for s in starts {
        if seen.insert(s.clone()) {
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        if goal(&s) {
            return true;
        }
        for t in succ(&s) {
            if seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
    }
    false
}

fn set_constants(s: &DefSet) -> BTreeSet<Atom> {
    s.variants().iter().flat_map(|v| v.constraint.constants()).collect()
}

/// Graph search for `b` from `a` along `r`, zero steps allowed.
pub fn reachable(r: &DefRel, a: &Element, b: &Element) -> bool {
    Reach::from(r, a, false).contains(b)
}

/// Graph search for `b` from `a` along `r` with at least one step.
pub fn reachable_plus(r: &DefRel, a: &Element, b: &Element) -> bool {
    Reach::from(r, a, true).contains(b)
}

/// Everything reachable from one element, up to automorphisms fixing it.
pub struct Reach {
    frame: Frame,
    seen: BTreeSet<Config>,
}

impl Reach {
    pub fn from(r: &DefRel, a: &Element, nonempty: bool) -> Self {
        let dom = r.domain();
        let kind = dom.theory().kind();
        let mut fixed = set_constants(dom);
        fixed.extend(r.parts().flat_map(|(_, _, f)| f.constants()));
        // the reachable set is closed under automorphisms fixing `a`, so a
        // target is found through its canonical form
        fixed.extend(a.tuple.iter().cloned());
        let frame = Frame::new(kind, fixed);
        let parts: Vec<(Tag, Tag, Formula)> = r.parts().map(|(x, y, f)| (x.clone(), y.clone(), f.clone())).collect();
        let succ = |(tag, t): &Config| {
            let mut out = Vec::new();
            for (_, to, f) in parts.iter().filter(|p| &p.0 == tag) {
                let n = dom.arity(to).unwrap();
                for t2 in frame.extensions(t, n) {
                    let all: Vec<Atom> = t.iter().chain(&t2).cloned().collect();
                    if member(dom, to, &t2) && eval(f, &coords_env(&all), kind) {
                        out.push((to.clone(), frame.canon(&t2)));
                    }
                }
            }
            out
        };
        let start = (a.tag.clone(), a.tuple.clone());
        let starts = if nonempty { succ(&start) } else { vec![start] };
        let mut seen = BTreeSet::new();
        search(
            starts,
            |c| {
                seen.insert(c.clone());
                succ(c)
            },
            |_| false,
        );
        Reach { frame, seen }
    }

    pub fn contains(&self, b: &Element) -> bool {
        self.seen.contains(&(b.tag.clone(), self.frame.canon(&b.tuple)))
    }
}

/// An automaton read as plain data and run by instantiation.
pub struct Machine {
    kind: TheoryKind,
    alphabet: DefSet,
    states: DefSet,
    initial: DefSet,
    finals: DefSet,
    edges: Vec<Edge>,
    constants: BTreeSet<Atom>,
}

type Config = (Tag, Vec<Atom>);

impl Machine {
    pub fn of(a: &Automaton) -> Self {
        let edges = a.edges();
        let mut constants: BTreeSet<Atom> = a.theory().constant_atoms().into_iter().collect();
        for s in [a.alphabet(), a.states(), a.initial(), a.final_states()] {
            constants.extend(set_constants(s));
        }
        constants.extend(edges.iter().flat_map(|e| e.formula.constants()));
        Machine {
            kind: a.theory().kind(),
            alphabet: a.alphabet().clone(),
            states: a.states().clone(),
            initial: a.initial().clone(),
            finals: a.final_states().clone(),
            edges,
            constants,
        }
    }

    fn starts(&self, frame: &Frame) -> Vec<Config> {
        let mut out = Vec::new();
        for v in self.states.variants() {
            for t in frame.extensions(&[], v.arity) {
                if member(&self.states, &v.tag, &t) && member(&self.initial, &v.tag, &t) {
                    out.push((v.tag.clone(), frame.canon(&t)));
                }
            }
        }
        out
    }

    fn is_final(&self, (q, t): &Config) -> bool {
        member(&self.finals, q, t)
    }

    /// Successors of a configuration; with `letter == None` any letter.
    fn step(&self, frame: &Frame, (q, t): &Config, letter: Option<&Element>) -> Vec<Config> {
        let mut out = Vec::new();
        for e in self.edges.iter().filter(|e| &e.from == q) {
            if letter.is_some_and(|l| l.tag != e.letter) {
                continue;
            }
            let la = self.alphabet.arity(&e.letter).unwrap();
            let n = self.states.arity(&e.to).unwrap();
            let fresh = if letter.is_some() { n } else { la + n };
            for ext in frame.extensions(t, fresh) {
                let (lt, t2) = match letter {
                    Some(l) => (l.tuple.clone(), ext),
                    None => (ext[..la].to_vec(), ext[la..].to_vec()),
                };
                if !member(&self.alphabet, &e.letter, &lt) || !member(&self.states, &e.to, &t2) {
                    continue;
                }
                let all: Vec<Atom> = lt.iter().chain(t).chain(&t2).cloned().collect();
                if eval(&e.formula, &coords_env(&all), self.kind) {
                    out.push((e.to.clone(), frame.canon(&t2)));
                }
            }
        }
        out
    }

    pub fn accepts(&self, w: &Word) -> bool {
        let mut fixed = self.constants.clone();
        for l in w.letters() {
            fixed.extend(l.tuple.iter().cloned());
        }
        let frame = Frame::new(self.kind, fixed);
        let letters = w.letters();
        if letters.iter().any(|l| !member_elem(&self.alphabet, l)) {
            return false;
        }
        search(
            self.starts(&frame).into_iter().map(|c| (0usize, c)),
            |(i, c)| match letters.get(*i) {
                Some(l) => self.step(&frame, c, Some(l)).into_iter().map(|d| (i + 1, d)).collect(),
                None => Vec::new(),
            },
            |(i, c)| *i == letters.len() && self.is_final(c),
        )
    }

    pub fn is_empty(&self) -> bool {
        let frame = Frame::new(self.kind, self.constants.clone());
        !search(
            self.starts(&frame),
            |c| self.step(&frame, c, None),
            |c| self.is_final(c),
        )
    }
}

/// Words of length `0..=max_len` over one-atom letters of a single tag.
pub fn words(tag: &Tag, atoms: &[Atom], max_len: usize) -> Vec<Word> {
    (0..=max_len)
        .flat_map(|k| tuples(atoms, k))
        .map(|t| Word::new(t.into_iter().map(|a| Element::new(tag.clone(), vec![a])).collect()))
        .collect()
}

/// A register machine over equality atoms run on explicit valuations. An
/// erased register holds an atom that occurs nowhere else.
pub struct RegisterMachine<'a> {
    ra: &'a RegisterAutomaton,
}

impl<'a> RegisterMachine<'a> {
    pub fn of(ra: &'a RegisterAutomaton) -> Self {
        assert_eq!(ra.theory.kind(), TheoryKind::Equality);
        RegisterMachine { ra }
    }

    fn env(&self, bot: &Atom, regs: &[Atom], next: &[Atom]) -> Env {
        let mut env: Env = BTreeMap::new();
        env.insert(Var::new(BOTTOM), bot.clone());
        for (i, a) in regs.iter().enumerate() {
            env.insert(Var::new(&format!("r{}", i + 1)), a.clone());
        }
        for (i, a) in next.iter().enumerate() {
            env.insert(Var::new(&format!("r{}'", i + 1)), a.clone());
        }
        env
    }

    pub fn accepts(&self, w: &Word) -> bool {
        let k = self.ra.registers;
        let bot = Atom::name("~bot");
        let mut pool: BTreeSet<Atom> = self.ra.theory.constant_atoms().into_iter().collect();
        for e in &self.ra.edges {
            pool.extend(e.guard.constants());
        }
        for (_, phi) in self.ra.initial.iter().chain(&self.ra.final_states) {
            pool.extend(phi.constants());
        }
        for l in w.letters() {
            pool.extend(l.tuple.iter().cloned());
        }
        pool.insert(bot.clone());
        let fresh = |i: usize| Atom::name(&format!("~fresh{i}"));
        let values = |extra: Atom| -> Vec<Atom> { pool.iter().cloned().chain([extra]).collect() };

        let mut current: BTreeSet<(String, Vec<Atom>)> = BTreeSet::new();
        for (label, phi) in &self.ra.initial {
            for regs in tuples(&values(fresh(0)), k) {
                if eval(phi, &self.env(&bot, &regs, &[]), TheoryKind::Equality) {
                    current.insert((label.clone(), regs));
                }
            }
        }
        for (step, letter) in w.letters().iter().enumerate() {
            let mut next = BTreeSet::new();
            for (label, regs) in &current {
                for e in self
                    .ra
                    .edges
                    .iter()
                    .filter(|e| &e.from == label && e.letter == letter.tag)
                {
                    for after in tuples(&values(fresh(step + 1)), k) {
                        let mut env = self.env(&bot, regs, &after);
                        for (v, a) in e.letter_vars.iter().zip(&letter.tuple) {
                            env.insert(v.clone(), a.clone());
                        }
                        if eval(&e.guard, &env, TheoryKind::Equality) {
                            next.insert((e.to.clone(), after));
                        }
                    }
                }
            }
            current = next;
        }
        current.iter().any(|(label, regs)| {
            self.ra
                .final_states
                .iter()
                .any(|(l, phi)| l == label && eval(phi, &self.env(&bot, regs, &[]), TheoryKind::Equality))
        })
    }
}
