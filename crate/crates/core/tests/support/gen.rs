//! Seeded random formulas, relations and automata for cross-checking.

use atomata_core::automata::{Automaton, Edge};
use atomata_core::defset::{DefRel, DefSet, Tag, Variant};
use atomata_core::theory::{Atom, Formula, Term, TheoryConfig, TheoryKind, Var};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn kind_of(i: u64) -> TheoryKind {
    if i.is_multiple_of(2) {
        TheoryKind::Equality
    } else {
        TheoryKind::DenseOrder
    }
}

/// A theory of the given kind, sometimes with one declared constant `@c`.
pub fn theory(rng: &mut Rng8, kind: TheoryKind) -> TheoryConfig {
    let base = TheoryConfig::new(kind);
    if rng.gen_bool(0.5) {
        return base;
    }
    match kind {
        TheoryKind::Equality => base.with_constant("c", None).unwrap(),
        TheoryKind::DenseOrder => base.with_constant("c", Some(Atom::int(rng.gen_range(-1..=1)))).unwrap(),
    }
}

/// Declared constants plus one literal of the theory.
pub fn constant_terms(cfg: &TheoryConfig) -> Vec<Term> {
    let mut out: Vec<Term> = cfg.constant_atoms().into_iter().map(Term::Const).collect();
    out.push(Term::Const(match cfg.kind() {
        TheoryKind::Equality => Atom::name("7"),
        TheoryKind::DenseOrder => Atom::ratio(1, 2),
    }));
    out
}

fn term(rng: &mut Rng8, vars: &[Var], consts: &[Term]) -> Term {
    if vars.is_empty() || rng.gen_bool(0.15) {
        consts.choose(rng).unwrap().clone()
    } else {
        Term::Var(vars.choose(rng).unwrap().clone())
    }
}

fn atomic(rng: &mut Rng8, kind: TheoryKind, vars: &[Var], consts: &[Term]) -> Formula {
    let (a, b) = (term(rng, vars, consts), term(rng, vars, consts));
    let ops = if kind == TheoryKind::DenseOrder { 4 } else { 2 };
    match rng.gen_range(0..ops + 1) {
        0 => Formula::eq(a, b),
        1 => Formula::neq(a, b),
        n if n == ops => {
            if rng.gen_bool(0.5) {
                Formula::True
            } else {
                Formula::False
            }
        }
        _ => Formula::lt(a, b),
    }
}

/// A quantifier-free formula over `vars` with about `size` atoms.
pub fn qf(rng: &mut Rng8, cfg: &TheoryConfig, vars: &[Var], size: usize) -> Formula {
    let consts = constant_terms(cfg);
    qf_with(rng, cfg.kind(), vars, &consts, size)
}

fn qf_with(rng: &mut Rng8, kind: TheoryKind, vars: &[Var], consts: &[Term], size: usize) -> Formula {
    if size <= 1 {
        return atomic(rng, kind, vars, consts);
    }
    let left = rng.gen_range(1..size);
    let a = qf_with(rng, kind, vars, consts, left);
    let b = qf_with(rng, kind, vars, consts, size - left);
    match rng.gen_range(0..4) {
        0 => Formula::Or(vec![a, b]),
        1 => Formula::Not(Box::new(Formula::And(vec![a, b]))),
        2 => Formula::Implies(Box::new(a), Box::new(b)),
        _ => Formula::And(vec![a, b]),
    }
}

/// A formula whose free variables come from `free` and whose quantifier
/// depth is at most `depth`.
pub fn formula(rng: &mut Rng8, cfg: &TheoryConfig, free: &[Var], depth: usize, size: usize) -> Formula {
    let consts = constant_terms(cfg);
    let mut scope = free.to_vec();
    nested(rng, cfg.kind(), &mut scope, &consts, depth, size, 0)
}

fn nested(
    rng: &mut Rng8,
    kind: TheoryKind,
    scope: &mut Vec<Var>,
    consts: &[Term],
    depth: usize,
    size: usize,
    level: usize,
) -> Formula {
    if depth > 0 && rng.gen_bool(0.4) {
        let v = Var::new(&format!("z{}", level + 1));
        scope.push(v.clone());
        let body = nested(rng, kind, scope, consts, depth - 1, size.max(2), level + 1);
        scope.pop();
        return if rng.gen_bool(0.5) {
            Formula::Exists(v, Box::new(body))
        } else {
            Formula::Forall(v, Box::new(body))
        };
    }
    if size <= 1 {
        return atomic(rng, kind, scope, consts);
    }
    let left = rng.gen_range(1..size);
    let a = nested(rng, kind, scope, consts, depth, left, level);
    let b = nested(rng, kind, scope, consts, depth, size - left, level);
    match rng.gen_range(0..4) {
        0 => Formula::Or(vec![a, b]),
        1 => Formula::Not(Box::new(a)),
        2 => Formula::Implies(Box::new(a), Box::new(b)),
        _ => Formula::And(vec![a, b]),
    }
}

/// A set with one to three variants of arity at most `max_arity`.
pub fn defset(rng: &mut Rng8, cfg: &TheoryConfig, names: &[&str], max_arity: usize) -> DefSet {
    let n = rng.gen_range(1..=names.len());
    let variants = names[..n]
        .iter()
        .map(|name| {
            let k = rng.gen_range(0..=max_arity);
            let c = if k > 0 && rng.gen_bool(0.3) {
                qf(rng, cfg, &Var::coords(k), 2)
            } else {
                Formula::True
            };
            Variant::new(Tag::name(name), k, c)
        })
        .collect();
    DefSet::new(cfg.clone(), variants).unwrap()
}

/// A relation on a set of small tuples.
pub fn relation(rng: &mut Rng8, cfg: &TheoryConfig) -> DefRel {
    let dom = defset(rng, cfg, &["p", "q"], 2);
    let mut parts = Vec::new();
    for a in dom.variants() {
        for b in dom.variants() {
            if rng.gen_bool(0.75) {
                let size = rng.gen_range(1..=3);
                parts.push((
                    (a.tag.clone(), b.tag.clone()),
                    qf(rng, cfg, &Var::coords(a.arity + b.arity), size),
                ));
            }
        }
    }
    DefRel::new(dom.clone(), dom, parts).unwrap()
}

/// A subset of `s` cut out by random constraints, each variant kept with
/// probability `keep`.
pub fn subset(rng: &mut Rng8, s: &DefSet, keep: f64) -> DefSet {
    let cfg = s.theory().clone();
    s.map_constraints(|v| {
        if !rng.gen_bool(keep) {
            Formula::False
        } else if v.arity > 0 && rng.gen_bool(0.6) {
            Formula::and([v.constraint.clone(), qf(rng, &cfg, &Var::coords(v.arity), 2)])
        } else {
            v.constraint.clone()
        }
    })
}

/// A small nondeterministic automaton; every transition uses at most four
/// coordinates.
pub fn automaton(rng: &mut Rng8, cfg: &TheoryConfig) -> Automaton {
    automaton_with(rng, cfg, 2)
}

pub fn automaton_with(rng: &mut Rng8, cfg: &TheoryConfig, state_arity: usize) -> Automaton {
    let alphabet = defset(rng, cfg, &["a", "b"], 1);
    let states = defset(rng, cfg, &["s", "t", "u"], state_arity);
    let initial = subset(rng, &states, 0.6);
    let finals = subset(rng, &states, 0.6);
    let mut edges = Vec::new();
    for l in alphabet.variants() {
        for p in states.variants() {
            for q in states.variants() {
                let k = l.arity + p.arity + q.arity;
                if k <= 4 && rng.gen_bool(0.45) {
                    let size = rng.gen_range(1..=3);
                    edges.push(Edge {
                        letter: l.tag.clone(),
                        from: p.tag.clone(),
                        to: q.tag.clone(),
                        formula: qf(rng, cfg, &Var::coords(k), size),
                    });
                }
            }
        }
    }
    Automaton::from_edges(alphabet, states, initial, finals, edges, false).unwrap()
}
