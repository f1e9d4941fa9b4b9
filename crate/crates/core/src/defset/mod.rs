//! Definable sets: finite tagged unions of formula-constrained atom tuples.

mod quotient;
mod relation;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::theory::{
    canonical, enumerate_complete_types, evaluate, implies, is_sat, Atom, Formula, Term, TheoryConfig, Var,
};

pub use quotient::{Quotient, QuotientSet};
pub use relation::{relate, DefRel, RelArg, RelOut, RelateOp};

/// Label of one summand of a disjoint union. Products pair the labels of
/// their factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Name(Arc<str>),
    Pair(Arc<Tag>, Arc<Tag>),
}

impl Tag {
    pub fn name(s: &str) -> Tag {
        Tag::Name(Arc::from(s))
    }

    pub fn pair(a: Tag, b: Tag) -> Tag {
        Tag::Pair(Arc::new(a), Arc::new(b))
    }

    pub fn split(&self) -> Option<(&Tag, &Tag)> {
        match self {
            Tag::Pair(a, b) => Some((a, b)),
            Tag::Name(_) => None,
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Name(n) => f.write_str(n),
            Tag::Pair(a, b) => write!(f, "<{a},{b}>"),
        }
    }
}

/// `constraint` speaks about the coordinates `x1..x{arity}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Variant {
    pub tag: Tag,
    pub arity: usize,
    pub constraint: Formula,
}

impl Variant {
    pub fn new(tag: Tag, arity: usize, constraint: Formula) -> Self {
        Variant { tag, arity, constraint }
    }

    /// The constraint with its coordinates replaced by `args`.
    pub fn at(&self, args: &[Term]) -> Formula {
        apply(&self.constraint, args)
    }
}

/// Substitutes `x1..xk := args`.
pub fn apply(constraint: &Formula, args: &[Term]) -> Formula {
    constraint.instantiate(&Var::coords(args.len()), args)
}

pub(crate) fn terms(vars: &[Var]) -> Vec<Term> {
    vars.iter().map(Term::from).collect()
}

/// A concrete point of a definable set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub tag: Tag,
    pub tuple: Vec<Atom>,
}

impl Element {
    pub fn new(tag: Tag, tuple: Vec<Atom>) -> Self {
        Element { tag, tuple }
    }

    pub fn terms(&self) -> Vec<Term> {
        self.tuple.iter().cloned().map(Term::Const).collect()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.tag)?;
        for (i, a) in self.tuple.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersect,
    Complement,
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareMode {
    Empty,
    Subset,
    Equal,
}

/// A finite disjoint union of definable subsets of `A^k`, one per tag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DefSet {
    theory: TheoryConfig,
    variants: Vec<Variant>,
}

impl DefSet {
    pub fn new(theory: TheoryConfig, variants: Vec<Variant>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &variants {
            if !seen.insert(v.tag.clone()) {
                return Err(Error::shape(format!("duplicate tag {}", v.tag)));
            }
            let coords: BTreeSet<Var> = Var::coords(v.arity).into_iter().collect();
            if let Some(stray) = v.constraint.free_vars().into_iter().find(|x| !coords.contains(x)) {
                return Err(Error::shape(format!(
                    "constraint of {} mentions {stray}, outside x1..x{}",
                    v.tag, v.arity
                )));
            }
        }
        Ok(DefSet { theory, variants })
    }

    /// One variant.
    pub fn single(theory: TheoryConfig, tag: Tag, arity: usize, constraint: Formula) -> Result<Self> {
        DefSet::new(theory, vec![Variant::new(tag, arity, constraint)])
    }

    /// `A^k` under a single tag.
    pub fn power(theory: TheoryConfig, tag: &str, arity: usize) -> Self {
        DefSet {
            theory,
            variants: vec![Variant::new(Tag::name(tag), arity, Formula::True)],
        }
    }

    /// The one-point set.
    pub fn unit(theory: TheoryConfig) -> Self {
        DefSet::power(theory, "one", 0)
    }

    pub fn theory(&self) -> &TheoryConfig {
        &self.theory
    }

    pub fn variants(&self) -> &[Variant] {
        &self.variants
    }

    pub fn variant(&self, tag: &Tag) -> Option<&Variant> {
        self.variants.iter().find(|v| &v.tag == tag)
    }

    pub fn tags(&self) -> impl Iterator<Item = &Tag> {
        self.variants.iter().map(|v| &v.tag)
    }

    pub fn arity(&self, tag: &Tag) -> Option<usize> {
        self.variant(tag).map(|v| v.arity)
    }

    /// Tags and arities, ignoring constraints.
    pub fn shape(&self) -> BTreeMap<Tag, usize> {
        self.variants.iter().map(|v| (v.tag.clone(), v.arity)).collect()
    }

    /// Constraint of `tag`, `false` when the tag is absent.
    pub fn constraint(&self, tag: &Tag) -> Formula {
        self.variant(tag).map_or(Formula::False, |v| v.constraint.clone())
    }

    /// Membership of the tuple `args` in variant `tag`, as a formula.
    pub fn contains_at(&self, tag: &Tag, args: &[Term]) -> Formula {
        match self.variant(tag) {
            Some(v) if v.arity == args.len() => v.at(args),
            _ => Formula::False,
        }
    }

    pub fn with_theory(mut self, theory: TheoryConfig) -> Self {
        self.theory = theory;
        self
    }

    /// Same shape, new constraints.
    pub fn map_constraints(&self, mut f: impl FnMut(&Variant) -> Formula) -> DefSet {
        let variants = self
            .variants
            .iter()
            .map(|v| {
                let c = canonical(&f(v), &self.theory);
                Variant::new(v.tag.clone(), v.arity, c)
            })
            .collect();
        DefSet {
            theory: self.theory.clone(),
            variants,
        }
    }

    pub fn empty_like(&self) -> DefSet {
        self.map_constraints(|_| Formula::False)
    }

    pub fn full_like(&self) -> DefSet {
        self.map_constraints(|_| Formula::True)
    }

    /// The singleton `{e}` inside this set's shape.
    pub fn singleton(&self, e: &Element) -> Result<DefSet> {
        self.check_element(e)?;
        Ok(self.map_constraints(|v| {
            if v.tag == e.tag {
                Formula::tuple_eq(&terms(&Var::coords(v.arity)), &e.terms())
            } else {
                Formula::False
            }
        }))
    }

    fn check_element(&self, e: &Element) -> Result<&Variant> {
        let v = self
            .variant(&e.tag)
            .ok_or_else(|| Error::UnknownTag(e.tag.to_string()))?;
        if v.arity != e.tuple.len() {
            return Err(Error::ArityMismatch {
                tag: e.tag.to_string(),
                expected: v.arity,
                got: e.tuple.len(),
            });
        }
        Ok(v)
    }

    pub fn member(&self, e: &Element) -> Result<bool> {
        let v = self.check_element(e)?;
        let env: BTreeMap<Var, Atom> = Var::coords(v.arity).into_iter().zip(e.tuple.iter().cloned()).collect();
        evaluate(&v.constraint, &env, &self.theory)
    }

    fn same_shape(&self, other: &DefSet, what: &str) -> Result<TheoryConfig> {
        let theory = self.theory.merge(&other.theory)?;
        if self.shape() != other.shape() {
            return Err(Error::shape(format!(
                "{what} needs identical tags and arities: {} vs {}",
                shape_text(self),
                shape_text(other)
            )));
        }
        Ok(theory)
    }

    pub fn union(&self, other: &DefSet) -> Result<DefSet> {
        let theory = self.same_shape(other, "union")?;
        Ok(self
            .map_constraints(|v| Formula::or([v.constraint.clone(), other.constraint(&v.tag)]))
            .with_theory(theory))
    }

    pub fn intersect(&self, other: &DefSet) -> Result<DefSet> {
        let theory = self.same_shape(other, "intersection")?;
        Ok(self
            .map_constraints(|v| Formula::and([v.constraint.clone(), other.constraint(&v.tag)]))
            .with_theory(theory))
    }

    /// Complement inside `A^k` for every tag.
    pub fn complement(&self) -> DefSet {
        self.map_constraints(|v| Formula::not(v.constraint.clone()))
    }

    pub fn difference(&self, other: &DefSet) -> Result<DefSet> {
        self.intersect(&other.complement())
    }

    pub fn product(&self, other: &DefSet) -> Result<DefSet> {
        let theory = self.theory.merge(&other.theory)?;
        let mut variants = Vec::new();
        for a in &self.variants {
            for b in &other.variants {
                let m = a.arity;
                let right: Vec<Term> = terms(&Var::coords(m + b.arity)[m..]);
                let c = Formula::and([a.constraint.clone(), b.at(&right)]);
                variants.push(Variant::new(
                    Tag::pair(a.tag.clone(), b.tag.clone()),
                    m + b.arity,
                    canonical(&c, &theory),
                ));
            }
        }
        Ok(DefSet { theory, variants })
    }

    pub fn is_empty(&self) -> bool {
        self.variants.iter().all(|v| !is_sat(&v.constraint, &self.theory))
    }

    pub fn is_subset(&self, other: &DefSet) -> Result<bool> {
        let theory = self.same_shape(other, "inclusion")?;
        Ok(self
            .variants
            .iter()
            .all(|v| implies(&v.constraint, &other.constraint(&v.tag), &theory)))
    }

    pub fn set_eq(&self, other: &DefSet) -> Result<bool> {
        Ok(self.is_subset(other)? && other.is_subset(self)?)
    }

    /// Number of orbits under the automorphisms of the atoms; with
    /// `with_constants`, under those fixing every declared constant.
    pub fn count_orbits(&self, with_constants: bool) -> usize {
        let mut cache: BTreeMap<usize, Vec<Formula>> = BTreeMap::new();
        self.variants
            .iter()
            .map(|v| {
                let types = cache
                    .entry(v.arity)
                    .or_insert_with(|| enumerate_complete_types(v.arity, &self.theory, with_constants));
                types
                    .iter()
                    .filter(|t| is_sat(&Formula::and([(*t).clone(), v.constraint.clone()]), &self.theory))
                    .count()
            })
            .sum()
    }

    /// Some member of the set, if it is nonempty.
    pub fn witness(&self) -> Option<Element> {
        for v in &self.variants {
            if let Some(m) = crate::theory::find_model(&v.constraint, &self.theory, &[]) {
                let mut used: Vec<Atom> = m.values().cloned().collect();
                let tuple = Var::coords(v.arity)
                    .into_iter()
                    .map(|x| match m.get(&x) {
                        Some(a) => a.clone(),
                        None => {
                            let a = self.theory.fresh_atom(&used);
                            used.push(a.clone());
                            a
                        }
                    })
                    .collect();
                return Some(Element::new(v.tag.clone(), tuple));
            }
        }
        None
    }
}

fn shape_text(s: &DefSet) -> String {
    let parts: Vec<String> = s.variants.iter().map(|v| format!("{}/{}", v.tag, v.arity)).collect();
    format!("{{{}}}", parts.join(" "))
}

/// `op` applied to `s` (and `t` for the binary operations).
pub fn combine(op: SetOp, s: &DefSet, t: Option<&DefSet>) -> Result<DefSet> {
    let need = || t.ok_or_else(|| Error::shape("binary set operation needs two operands"));
    match op {
        SetOp::Union => s.union(need()?),
        SetOp::Intersect => s.intersect(need()?),
        SetOp::Product => s.product(need()?),
        SetOp::Complement => match t {
            None => Ok(s.complement()),
            Some(_) => Err(Error::shape("complement takes one operand")),
        },
    }
}

pub fn compare(mode: CompareMode, s: &DefSet, t: Option<&DefSet>) -> Result<bool> {
    match (mode, t) {
        (CompareMode::Empty, None) => Ok(s.is_empty()),
        (CompareMode::Subset, Some(t)) => s.is_subset(t),
        (CompareMode::Equal, Some(t)) => s.set_eq(t),
        (CompareMode::Empty, Some(_)) => Err(Error::shape("emptiness takes one operand")),
        (_, None) => Err(Error::shape("comparison needs two operands")),
    }
}
