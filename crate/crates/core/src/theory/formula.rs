use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use super::atom::Atom;

static FRESH: AtomicU64 = AtomicU64::new(0);

/// A first-order variable. Names starting with `_` are reserved for
/// machine-generated variables and cannot be written in source text.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn fresh() -> Self {
        let n = FRESH.fetch_add(1, Ordering::Relaxed);
        Var(Arc::from(format!("_{n}").as_str()))
    }

    /// `x1 .. xk`, the coordinate variables of a k-tuple.
    pub fn coord(i: usize) -> Self {
        Var(Arc::from(format!("x{}", i + 1).as_str()))
    }

    pub fn coords(k: usize) -> Vec<Var> {
        (0..k).map(Var::coord).collect()
    }

    pub fn fresh_vec(k: usize) -> Vec<Var> {
        (0..k).map(|_| Var::fresh()).collect()
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_generated(&self) -> bool {
        self.0.starts_with('_')
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Const(Atom),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Var::new(name))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&Atom> {
        match self {
            Term::Const(a) => Some(a),
            Term::Var(_) => None,
        }
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Self {
        Term::Var(v)
    }
}

impl From<&Var> for Term {
    fn from(v: &Var) -> Self {
        Term::Var(v.clone())
    }
}

impl From<Atom> for Term {
    fn from(a: Atom) -> Self {
        Term::Const(a)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => v.fmt(f),
            Term::Const(a) => a.fmt(f),
        }
    }
}

/// First-order formulas over one atom sort.
///
/// `Rel` is a placeholder for relation symbols in fixed-point templates; it
/// must be substituted away before quantifier elimination.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Neq(Term, Term),
    Lt(Term, Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
    Rel(Arc<str>, Vec<Term>),
}

impl Formula {
    pub fn eq(a: impl Into<Term>, b: impl Into<Term>) -> Self {
        Formula::Eq(a.into(), b.into())
    }

    pub fn neq(a: impl Into<Term>, b: impl Into<Term>) -> Self {
        Formula::Neq(a.into(), b.into())
    }

    pub fn lt(a: impl Into<Term>, b: impl Into<Term>) -> Self {
        Formula::Lt(a.into(), b.into())
    }

    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and([Formula::implies(a.clone(), b.clone()), Formula::implies(b, a)])
    }

    /// `∃v. body`; dropped when `v` is not free in `body`.
    pub fn exists(v: Var, body: Formula) -> Self {
        if body.free_vars().contains(&v) {
            Formula::Exists(v, Box::new(body))
        } else {
            body
        }
    }

    pub fn forall(v: Var, body: Formula) -> Self {
        if body.free_vars().contains(&v) {
            Formula::Forall(v, Box::new(body))
        } else {
            body
        }
    }

    pub fn exists_many(vars: impl IntoIterator<Item = Var>, body: Formula) -> Self {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter().rev().fold(body, |acc, v| Formula::exists(v, acc))
    }

    pub fn forall_many(vars: impl IntoIterator<Item = Var>, body: Formula) -> Self {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter().rev().fold(body, |acc, v| Formula::forall(v, acc))
    }

    /// Pointwise equality of two equally long term lists.
    pub fn tuple_eq(a: &[Term], b: &[Term]) -> Self {
        debug_assert_eq!(a.len(), b.len());
        Formula::and(a.iter().zip(b).map(|(x, y)| Formula::Eq(x.clone(), y.clone())))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut term = |t: &Term, bound: &Vec<Var>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::Neq(a, b) | Formula::Lt(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Rel(_, args) => args.iter().for_each(|t| term(t, bound)),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().for_each(|f| f.collect_free(bound, out));
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn constants(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| {
            if let Term::Const(a) = t {
                out.insert(a.clone());
            }
        });
        out
    }

    fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::Neq(a, b) | Formula::Lt(a, b) => {
                f(a);
                f(b);
            }
            Formula::Rel(_, args) => args.iter().for_each(&mut *f),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.visit_terms(f)),
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit_terms(f),
            Formula::Implies(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
        }
    }

    pub fn mentions_lt(&self) -> bool {
        match self {
            Formula::Lt(..) => true,
            Formula::True | Formula::False | Formula::Eq(..) | Formula::Neq(..) | Formula::Rel(..) => false,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::mentions_lt),
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.mentions_lt(),
            Formula::Implies(a, b) => a.mentions_lt() || b.mentions_lt(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => false,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Not(g) => g.is_quantifier_free(),
            Formula::Implies(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            _ => true,
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Exists(_, g) | Formula::Forall(_, g) => 1 + g.quantifier_depth(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::quantifier_depth).max().unwrap_or(0),
            Formula::Not(g) => g.quantifier_depth(),
            Formula::Implies(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            _ => 0,
        }
    }

    /// Capture-avoiding substitution of free variables.
    pub fn substitute(&self, map: &BTreeMap<Var, Term>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        let st = |t: &Term| match t {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
        };
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Eq(a, b) => Formula::Eq(st(a), st(b)),
            Formula::Neq(a, b) => Formula::Neq(st(a), st(b)),
            Formula::Lt(a, b) => Formula::Lt(st(a), st(b)),
            Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(st).collect()),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.substitute(map)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.substitute(map)).collect()),
            Formula::Not(f) => Formula::Not(Box::new(f.substitute(map))),
            Formula::Implies(a, b) => Formula::Implies(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let mut inner = map.clone();
                inner.remove(v);
                let captures = inner.values().any(|t| matches!(t, Term::Var(w) if w == v));
                let (v2, body2) = if captures {
                    let fresh = Var::fresh();
                    inner.insert(v.clone(), Term::Var(fresh.clone()));
                    (fresh, body.substitute(&inner))
                } else {
                    (v.clone(), body.substitute(&inner))
                };
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(v2, Box::new(body2))
                } else {
                    Formula::Forall(v2, Box::new(body2))
                }
            }
        }
    }

    /// Substitutes `vars[i] := terms[i]`.
    pub fn instantiate(&self, vars: &[Var], terms: &[Term]) -> Formula {
        debug_assert_eq!(vars.len(), terms.len());
        let map: BTreeMap<Var, Term> = vars.iter().cloned().zip(terms.iter().cloned()).collect();
        self.substitute(&map)
    }

    /// Replaces every `Rel(name, args)` via the callback.
    pub fn replace_relations(&self, f: &mut impl FnMut(&str, &[Term]) -> Option<Formula>) -> Formula {
        match self {
            Formula::Rel(name, args) => f(name, args).unwrap_or_else(|| self.clone()),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.replace_relations(f)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.replace_relations(f)).collect()),
            Formula::Not(g) => Formula::Not(Box::new(g.replace_relations(f))),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(a.replace_relations(f)), Box::new(b.replace_relations(f)))
            }
            Formula::Exists(v, g) => Formula::Exists(v.clone(), Box::new(g.replace_relations(f))),
            Formula::Forall(v, g) => Formula::Forall(v.clone(), Box::new(g.replace_relations(f))),
            other => other.clone(),
        }
    }

    /// Renames binders so that no variable is bound twice on a path and no
    /// binder shadows a free variable of the whole formula.
    pub fn alpha_normalize(&self) -> Formula {
        let free = self.free_vars();
        let mut counter = 0usize;
        self.alpha(&mut Vec::new(), &free, &mut counter)
    }

    fn alpha(&self, bound: &mut Vec<Var>, free: &BTreeSet<Var>, counter: &mut usize) -> Formula {
        match self {
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let clash = |w: &Var, bound: &Vec<Var>| bound.contains(w) || free.contains(w);
                let (nv, nbody) = if clash(v, bound) {
                    let renamed = loop {
                        *counter += 1;
                        let cand = Var::new(&format!("{}_{}", v.name(), counter));
                        let occurs = body.free_vars().contains(&cand);
                        if !clash(&cand, bound) && !occurs {
                            break cand;
                        }
                    };
                    let mut m = BTreeMap::new();
                    m.insert(v.clone(), Term::Var(renamed.clone()));
                    (renamed, body.substitute(&m))
                } else {
                    (v.clone(), (**body).clone())
                };
                bound.push(nv.clone());
                let out = nbody.alpha(bound, free, counter);
                bound.pop();
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(nv, Box::new(out))
                } else {
                    Formula::Forall(nv, Box::new(out))
                }
            }
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.alpha(bound, free, counter)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.alpha(bound, free, counter)).collect()),
            Formula::Not(f) => Formula::Not(Box::new(f.alpha(bound, free, counter))),
            Formula::Implies(a, b) => Formula::Implies(
                Box::new(a.alpha(bound, free, counter)),
                Box::new(b.alpha(bound, free, counter)),
            ),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Neq(a, b) => write!(f, "(!= {a} {b})"),
            Formula::Lt(a, b) => write!(f, "(< {a} {b})"),
            Formula::And(fs) | Formula::Or(fs) => {
                let op = if matches!(self, Formula::And(_)) { "and" } else { "or" };
                write!(f, "({op}")?;
                for g in fs {
                    write!(f, " {g}")?;
                }
                f.write_str(")")
            }
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::Implies(a, b) => write!(f, "(=> {a} {b})"),
            Formula::Exists(v, g) => write!(f, "(exists ({v}) {g})"),
            Formula::Forall(v, g) => write!(f, "(forall ({v}) {g})"),
            Formula::Rel(r, args) => {
                write!(f, "({r}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
