//! Definable relations between two definable sets.
//!
//! A relation stores one constraint per (domain tag, codomain tag) pair over
//! the coordinates `x1..x{m+n}`: the first `m` belong to the domain variant,
//! the remaining `n` to the codomain variant. Missing pairs are empty.

use std::collections::BTreeMap;

use super::{terms, DefSet, Element, Tag, Variant};
use crate::error::{Error, Result};
use crate::theory::{canonical, evaluate, implies, is_sat, Atom, Formula, Term, TheoryConfig, Var};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DefRel {
    domain: DefSet,
    codomain: DefSet,
    parts: BTreeMap<(Tag, Tag), Formula>,
}

impl DefRel {
    /// Builds a relation; every part is cut down to domain × codomain and
    /// unsatisfiable parts are dropped.
    pub fn new(
        domain: DefSet,
        codomain: DefSet,
        parts: impl IntoIterator<Item = ((Tag, Tag), Formula)>,
    ) -> Result<Self> {
        let theory = domain.theory().merge(codomain.theory())?;
        let mut out: BTreeMap<(Tag, Tag), Formula> = BTreeMap::new();
        for ((from, to), f) in parts {
            let dv = domain
                .variant(&from)
                .ok_or_else(|| Error::UnknownTag(from.to_string()))?;
            let cv = codomain.variant(&to).ok_or_else(|| Error::UnknownTag(to.to_string()))?;
            let (m, n) = (dv.arity, cv.arity);
            let coords = Var::coords(m + n);
            if let Some(stray) = f.free_vars().into_iter().find(|x| !coords.contains(x)) {
                return Err(Error::shape(format!(
                    "relation part {from} -> {to} mentions {stray}, outside x1..x{}",
                    m + n
                )));
            }
            let xs = terms(&coords);
            let prev = out.remove(&(from.clone(), to.clone())).unwrap_or(Formula::False);
            let c = Formula::and([Formula::or([prev, f]), dv.constraint.clone(), cv.at(&xs[m..])]);
            out.insert((from, to), c);
        }
        let parts = out
            .into_iter()
            .map(|(k, f)| (k, canonical(&f, &theory)))
            .filter(|(_, f)| *f != Formula::False && is_sat(f, &theory))
            .collect();
        Ok(DefRel {
            domain: domain.with_theory(theory.clone()),
            codomain: codomain.with_theory(theory),
            parts,
        })
    }

    pub fn empty(domain: DefSet, codomain: DefSet) -> Result<Self> {
        DefRel::new(domain, codomain, [])
    }

    /// Everything in domain × codomain.
    pub fn full(domain: DefSet, codomain: DefSet) -> Result<Self> {
        let parts: Vec<((Tag, Tag), Formula)> = domain
            .tags()
            .flat_map(|a| codomain.tags().map(move |b| ((a.clone(), b.clone()), Formula::True)))
            .collect();
        DefRel::new(domain, codomain, parts)
    }

    /// The diagonal of `set`.
    pub fn identity(set: &DefSet) -> DefRel {
        let parts = set.variants().iter().map(|v| {
            let xs = terms(&Var::coords(2 * v.arity));
            (
                (v.tag.clone(), v.tag.clone()),
                Formula::tuple_eq(&xs[..v.arity], &xs[v.arity..]),
            )
        });
        DefRel::new(set.clone(), set.clone(), parts.collect::<Vec<_>>()).expect("diagonal is well-shaped")
    }

    /// Reads a relation off a set whose tags are pairs `<from,to>`.
    pub fn from_carrier(domain: DefSet, codomain: DefSet, carrier: &DefSet) -> Result<Self> {
        let mut parts = Vec::new();
        for v in carrier.variants() {
            let (a, b) = v
                .tag
                .split()
                .ok_or_else(|| Error::shape(format!("carrier tag {} is not a pair", v.tag)))?;
            let expect = domain.arity(a).unwrap_or(0) + codomain.arity(b).unwrap_or(0);
            if expect != v.arity {
                return Err(Error::ArityMismatch {
                    tag: v.tag.to_string(),
                    expected: expect,
                    got: v.arity,
                });
            }
            parts.push(((a.clone(), b.clone()), v.constraint.clone()));
        }
        DefRel::new(domain, codomain, parts)
    }

    pub fn domain(&self) -> &DefSet {
        &self.domain
    }

    pub fn codomain(&self) -> &DefSet {
        &self.codomain
    }

    pub fn theory(&self) -> &TheoryConfig {
        self.domain.theory()
    }

    pub fn parts(&self) -> impl Iterator<Item = (&Tag, &Tag, &Formula)> {
        self.parts.iter().map(|((a, b), f)| (a, b, f))
    }

    pub fn part(&self, from: &Tag, to: &Tag) -> Formula {
        self.parts
            .get(&(from.clone(), to.clone()))
            .cloned()
            .unwrap_or(Formula::False)
    }

    /// The relation as a subset of domain × codomain.
    pub fn carrier(&self) -> DefSet {
        let variants = self
            .domain
            .variants()
            .iter()
            .flat_map(|a| {
                self.codomain.variants().iter().map(move |b| {
                    Variant::new(
                        Tag::pair(a.tag.clone(), b.tag.clone()),
                        a.arity + b.arity,
                        self.part(&a.tag, &b.tag),
                    )
                })
            })
            .collect();
        DefSet::new(self.theory().clone(), variants).expect("carrier is well-shaped")
    }

    /// `R(from xs, to ys)` as a formula.
    pub fn holds(&self, from: &Tag, to: &Tag, xs: &[Term], ys: &[Term]) -> Formula {
        match self.parts.get(&(from.clone(), to.clone())) {
            Some(f) => {
                let args: Vec<Term> = xs.iter().chain(ys).cloned().collect();
                super::apply(f, &args)
            }
            None => Formula::False,
        }
    }

    pub fn contains(&self, a: &Element, b: &Element) -> Result<bool> {
        let m = self
            .domain
            .arity(&a.tag)
            .ok_or_else(|| Error::UnknownTag(a.tag.to_string()))?;
        let n = self
            .codomain
            .arity(&b.tag)
            .ok_or_else(|| Error::UnknownTag(b.tag.to_string()))?;
        if m != a.tuple.len() || n != b.tuple.len() {
            return Err(Error::shape("element arity does not match the relation"));
        }
        let f = self.part(&a.tag, &b.tag);
        let env: BTreeMap<Var, Atom> = Var::coords(m + n)
            .into_iter()
            .zip(a.tuple.iter().chain(&b.tuple).cloned())
            .collect();
        evaluate(&f, &env, self.theory())
    }

    fn same_ends(&self, other: &DefRel, what: &str) -> Result<()> {
        if self.domain.shape() != other.domain.shape() || self.codomain.shape() != other.codomain.shape() {
            return Err(Error::shape(format!("{what} needs relations between the same sets")));
        }
        Ok(())
    }

    pub fn union(&self, other: &DefRel) -> Result<DefRel> {
        self.same_ends(other, "union")?;
        let parts: Vec<_> = self
            .parts
            .iter()
            .chain(other.parts.iter())
            .map(|(k, f)| (k.clone(), f.clone()))
            .collect();
        DefRel::new(self.domain.clone(), self.codomain.clone(), parts)
    }

    pub fn intersect(&self, other: &DefRel) -> Result<DefRel> {
        self.same_ends(other, "intersection")?;
        let parts: Vec<_> = self
            .parts
            .iter()
            .map(|(k, f)| (k.clone(), Formula::and([f.clone(), other.part(&k.0, &k.1)])))
            .collect();
        DefRel::new(self.domain.clone(), self.codomain.clone(), parts)
    }

    pub fn is_subset(&self, other: &DefRel) -> Result<bool> {
        self.same_ends(other, "inclusion")?;
        let theory = self.theory().merge(other.theory())?;
        Ok(self
            .parts
            .iter()
            .all(|(k, f)| implies(f, &other.part(&k.0, &k.1), &theory)))
    }

    pub fn rel_eq(&self, other: &DefRel) -> Result<bool> {
        Ok(self.is_subset(other)? && other.is_subset(self)?)
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The converse relation.
    pub fn transpose(&self) -> DefRel {
        let parts: Vec<_> = self
            .parts
            .iter()
            .map(|((a, b), f)| {
                let m = self.domain.arity(a).unwrap();
                let n = self.codomain.arity(b).unwrap();
                let xs = terms(&Var::coords(m + n));
                // new coordinates: (b-part, a-part)
                let mut args: Vec<Term> = xs[n..].to_vec();
                args.extend_from_slice(&xs[..n]);
                ((b.clone(), a.clone()), super::apply(f, &args))
            })
            .collect();
        DefRel::new(self.codomain.clone(), self.domain.clone(), parts).expect("transpose keeps shapes")
    }

    /// Relational composite `self ; other` (first `self`, then `other`).
    pub fn compose(&self, other: &DefRel) -> Result<DefRel> {
        if self.codomain.shape() != other.domain.shape() {
            return Err(Error::shape("composition needs matching middle sets"));
        }
        let theory = self.theory().merge(other.theory())?;
        let mut parts: BTreeMap<(Tag, Tag), Vec<Formula>> = BTreeMap::new();
        for ((a, b), f) in &self.parts {
            for ((b2, c), g) in &other.parts {
                if b != b2 {
                    continue;
                }
                let m = self.domain.arity(a).unwrap();
                let k = self.codomain.arity(b).unwrap();
                let n = other.codomain.arity(c).unwrap();
                let outer = terms(&Var::coords(m + n));
                let mid = Var::fresh_vec(k);
                let mid_t = terms(&mid);
                let left: Vec<Term> = outer[..m].iter().chain(&mid_t).cloned().collect();
                let right: Vec<Term> = mid_t.iter().chain(&outer[m..]).cloned().collect();
                let body = Formula::exists_many(mid, Formula::and([super::apply(f, &left), super::apply(g, &right)]));
                parts
                    .entry((a.clone(), c.clone()))
                    .or_default()
                    .push(canonical(&body, &theory));
            }
        }
        DefRel::new(
            self.domain.clone(),
            other.codomain.clone(),
            parts
                .into_iter()
                .map(|(k, fs)| (k, Formula::or(fs)))
                .collect::<Vec<_>>(),
        )
    }

    /// `{y : ∃x ∈ s. R(x, y)}`.
    pub fn image(&self, s: &DefSet) -> Result<DefSet> {
        if s.shape() != self.domain.shape() {
            return Err(Error::shape("image needs a subset of the relation's domain"));
        }
        let theory = self.theory().merge(s.theory())?;
        let mut acc: BTreeMap<Tag, Vec<Formula>> = BTreeMap::new();
        for ((a, b), f) in &self.parts {
            let m = self.domain.arity(a).unwrap();
            let n = self.codomain.arity(b).unwrap();
            let xs = Var::fresh_vec(m);
            let xt = terms(&xs);
            let ys = terms(&Var::coords(n));
            let args: Vec<Term> = xt.iter().chain(&ys).cloned().collect();
            let body = Formula::exists_many(xs, Formula::and([s.contains_at(a, &xt), super::apply(f, &args)]));
            acc.entry(b.clone()).or_default().push(canonical(&body, &theory));
        }
        Ok(self
            .codomain
            .map_constraints(|v| Formula::or(acc.get(&v.tag).cloned().unwrap_or_default()))
            .with_theory(theory))
    }

    /// `{x : ∃y ∈ s. R(x, y)}`.
    pub fn preimage(&self, s: &DefSet) -> Result<DefSet> {
        if s.shape() != self.codomain.shape() {
            return Err(Error::shape("preimage needs a subset of the relation's codomain"));
        }
        let theory = self.theory().merge(s.theory())?;
        let mut acc: BTreeMap<Tag, Vec<Formula>> = BTreeMap::new();
        for ((a, b), f) in &self.parts {
            let m = self.domain.arity(a).unwrap();
            let n = self.codomain.arity(b).unwrap();
            let ys = Var::fresh_vec(n);
            let yt = terms(&ys);
            let xs = terms(&Var::coords(m));
            let args: Vec<Term> = xs.iter().chain(&yt).cloned().collect();
            let body = Formula::exists_many(ys, Formula::and([s.contains_at(b, &yt), super::apply(f, &args)]));
            acc.entry(a.clone()).or_default().push(canonical(&body, &theory));
        }
        Ok(self
            .domain
            .map_constraints(|v| Formula::or(acc.get(&v.tag).cloned().unwrap_or_default()))
            .with_theory(theory))
    }

    /// Points of the domain with at least one image.
    pub fn support(&self) -> DefSet {
        self.preimage(&self.codomain)
            .expect("codomain has the codomain's shape")
    }

    /// Total on the domain and single-valued.
    pub fn is_function(&self) -> bool {
        self.is_total() && self.is_single_valued()
    }

    pub fn is_total(&self) -> bool {
        self.domain.is_subset(&self.support()).expect("same shape")
    }

    pub fn is_single_valued(&self) -> bool {
        let theory = self.theory();
        for ((a, b1), f1) in &self.parts {
            for ((a2, b2), f2) in &self.parts {
                if a != a2 || b1 > b2 {
                    continue;
                }
                let m = self.domain.arity(a).unwrap();
                let n1 = self.codomain.arity(b1).unwrap();
                let n2 = self.codomain.arity(b2).unwrap();
                let xs = terms(&Var::fresh_vec(m));
                let y1 = terms(&Var::fresh_vec(n1));
                let y2 = terms(&Var::fresh_vec(n2));
                let both = Formula::and([
                    super::apply(f1, &[xs.clone(), y1.clone()].concat()),
                    super::apply(f2, &[xs, y2.clone()].concat()),
                ]);
                let same = if b1 == b2 {
                    Formula::tuple_eq(&y1, &y2)
                } else {
                    Formula::False
                };
                if !implies(&both, &same, theory) {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelateOp {
    Image,
    Preimage,
    Compose,
}

#[derive(Clone, Debug)]
pub enum RelArg<'a> {
    Set(&'a DefSet),
    Rel(&'a DefRel),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelOut {
    Set(DefSet),
    Rel(DefRel),
}

pub fn relate(op: RelateOp, r: &DefRel, arg: RelArg<'_>) -> Result<RelOut> {
    match (op, arg) {
        (RelateOp::Image, RelArg::Set(s)) => r.image(s).map(RelOut::Set),
        (RelateOp::Preimage, RelArg::Set(s)) => r.preimage(s).map(RelOut::Set),
        (RelateOp::Compose, RelArg::Rel(q)) => r.compose(q).map(RelOut::Rel),
        _ => Err(Error::shape("image/preimage take a set, composition takes a relation")),
    }
}
