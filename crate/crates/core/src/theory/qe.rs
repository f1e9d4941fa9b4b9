//! Quantifier elimination and the decision procedure.
//!
//! Formulas are compiled bottom-up into disjunctions of normalized cubes.
//! An existential is eliminated cube by cube: an equality partner is
//! substituted, otherwise disequalities are dropped (the domain is infinite)
//! and, for the order, every lower bound is paired with every upper bound
//! (density, no endpoints). Universals go through double negation.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use super::atom::{Atom, TheoryConfig, TheoryKind};
use super::cube::{Dnf, Lit};
use super::formula::{Formula, Term, Var};
use crate::error::{Error, Result};

static ELIMINATIONS: AtomicU64 = AtomicU64::new(0);

/// Number of single-variable quantifier eliminations performed so far by
/// this process.
pub fn qe_calls() -> u64 {
    ELIMINATIONS.load(Ordering::Relaxed)
}

/// Compiles a relation-free formula to a quantifier-free disjunctive form.
pub fn to_dnf(phi: &Formula, kind: TheoryKind) -> Dnf {
    match phi {
        Formula::True => Dnf::top(),
        Formula::False => Dnf::bottom(),
        Formula::Eq(a, b) => Dnf::lit(Lit::eq(a.clone(), b.clone()), kind),
        Formula::Neq(a, b) => Dnf::lit(Lit::neq(a.clone(), b.clone()), kind),
        Formula::Lt(a, b) => Dnf::lit(Lit::Lt(a.clone(), b.clone()), kind),
        Formula::And(fs) => {
            let mut acc = Dnf::top();
            // cheap conjuncts first keeps intermediate products small
            let mut parts: Vec<Dnf> = fs.iter().map(|f| to_dnf(f, kind)).collect();
            parts.sort_by_key(|d| d.cubes().len());
            for d in parts {
                acc = acc.and(&d, kind);
                if acc.is_bottom() {
                    break;
                }
            }
            acc
        }
        Formula::Or(fs) => fs.iter().fold(Dnf::bottom(), |acc, f| acc.or(to_dnf(f, kind))),
        Formula::Not(f) => to_dnf(f, kind).negate(kind),
        Formula::Implies(a, b) => to_dnf(a, kind).negate(kind).or(to_dnf(b, kind)),
        Formula::Exists(v, body) => {
            ELIMINATIONS.fetch_add(1, Ordering::Relaxed);
            to_dnf(body, kind).exists(v, kind)
        }
        Formula::Forall(v, body) => {
            ELIMINATIONS.fetch_add(1, Ordering::Relaxed);
            to_dnf(body, kind).negate(kind).exists(v, kind).negate(kind)
        }
        Formula::Rel(r, _) => panic!("relation symbol {r} must be substituted before elimination"),
    }
}

/// An equivalent quantifier-free formula, in disjunctive normal form.
pub fn eliminate_quantifiers(phi: &Formula, cfg: &TheoryConfig) -> Formula {
    to_dnf(phi, cfg.kind()).to_formula()
}

/// Round-trips a formula through the normal form.
pub fn canonical(phi: &Formula, cfg: &TheoryConfig) -> Formula {
    eliminate_quantifiers(phi, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecideMode {
    Sat,
    Valid,
}

/// Satisfiability (some assignment of the free variables) or validity (all
/// assignments) in the canonical countable model.
pub fn decide(phi: &Formula, mode: DecideMode, cfg: &TheoryConfig) -> bool {
    match mode {
        DecideMode::Sat => !to_dnf(phi, cfg.kind()).is_bottom(),
        DecideMode::Valid => to_dnf(phi, cfg.kind()).negate(cfg.kind()).is_bottom(),
    }
}

pub fn is_sat(phi: &Formula, cfg: &TheoryConfig) -> bool {
    decide(phi, DecideMode::Sat, cfg)
}

pub fn is_valid(phi: &Formula, cfg: &TheoryConfig) -> bool {
    decide(phi, DecideMode::Valid, cfg)
}

pub fn implies(a: &Formula, b: &Formula, cfg: &TheoryConfig) -> bool {
    let k = cfg.kind();
    to_dnf(a, k).entails(&to_dnf(b, k), k)
}

pub fn equivalent(a: &Formula, b: &Formula, cfg: &TheoryConfig) -> bool {
    let k = cfg.kind();
    to_dnf(a, k).equivalent(&to_dnf(b, k), k)
}

/// A satisfying assignment of the free variables, if any.
pub fn find_model(phi: &Formula, cfg: &TheoryConfig, avoid: &[Atom]) -> Option<BTreeMap<Var, Atom>> {
    let d = to_dnf(phi, cfg.kind());
    let cube = d.cubes().first()?;
    let mut m = cube.model(cfg, avoid);
    // variables the cube does not constrain still need a value
    let mut used: Vec<Atom> = avoid.to_vec();
    used.extend(m.values().cloned());
    used.extend(phi.constants());
    for v in phi.free_vars() {
        if let Entry::Vacant(slot) = m.entry(v) {
            let a = cfg.fresh_atom(&used);
            used.push(a.clone());
            slot.insert(a);
        }
    }
    Some(m)
}

/// Truth of `phi` under `env`, which must bind every free variable.
pub fn evaluate(phi: &Formula, env: &BTreeMap<Var, Atom>, cfg: &TheoryConfig) -> Result<bool> {
    if let Some(missing) = phi.free_vars().into_iter().find(|v| !env.contains_key(v)) {
        return Err(Error::MissingBinding(missing.to_string()));
    }
    let residue = to_dnf(phi, cfg.kind());
    let lookup = |t: &Term| match t {
        Term::Var(v) => env.get(v).cloned(),
        Term::Const(a) => Some(a.clone()),
    };
    Ok(residue.eval(&lookup).expect("residue only mentions free variables"))
}
