//! Quotients of definable sets by definable equivalence relations. Classes
//! are handled through arbitrary representatives.

use super::{terms, DefRel, DefSet, Element};
use crate::error::{Error, Result};
use crate::theory::{enumerate_complete_types, implies, is_sat, Formula, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientSet {
    pub base: DefSet,
    pub eq: DefRel,
}

impl QuotientSet {
    pub fn new(base: DefSet, eq: DefRel) -> Self {
        QuotientSet { base, eq }
    }

    /// Reflexivity, symmetry and transitivity, in that order; the first
    /// failing law is reported.
    pub fn check(&self) -> Result<()> {
        let base = &self.base;
        let eq = &self.eq;
        if eq.domain().shape() != base.shape() || eq.codomain().shape() != base.shape() {
            return Err(Error::shape("equivalence must relate the base set to itself"));
        }
        let theory = base.theory();
        for v in base.variants() {
            let x = terms(&Var::fresh_vec(v.arity));
            if !implies(&v.at(&x), &eq.holds(&v.tag, &v.tag, &x, &x), theory) {
                return Err(Error::NotEquivalence(format!("reflexivity on {}", v.tag)));
            }
        }
        for (a, b, _) in eq.parts() {
            let x = terms(&Var::fresh_vec(base.arity(a).unwrap()));
            let y = terms(&Var::fresh_vec(base.arity(b).unwrap()));
            if !implies(&eq.holds(a, b, &x, &y), &eq.holds(b, a, &y, &x), theory) {
                return Err(Error::NotEquivalence(format!("symmetry on {a} ~ {b}")));
            }
        }
        for (a, b, _) in eq.parts() {
            for (b2, c, _) in eq.parts() {
                if b != b2 {
                    continue;
                }
                let x = terms(&Var::fresh_vec(base.arity(a).unwrap()));
                let y = terms(&Var::fresh_vec(base.arity(b).unwrap()));
                let z = terms(&Var::fresh_vec(base.arity(c).unwrap()));
                let premise = Formula::and([eq.holds(a, b, &x, &y), eq.holds(b, c, &y, &z)]);
                if !implies(&premise, &eq.holds(a, c, &x, &z), theory) {
                    return Err(Error::NotEquivalence(format!("transitivity on {a} ~ {b} ~ {c}")));
                }
            }
        }
        Ok(())
    }
}

/// A checked quotient.
#[derive(Clone, Debug)]
pub struct Quotient {
    set: QuotientSet,
}

impl Quotient {
    pub fn new(q: QuotientSet) -> Result<Self> {
        q.check()?;
        Ok(Quotient { set: q })
    }

    /// Like [`Quotient::new`] without re-deciding the equivalence laws.
    pub(crate) fn trusted(q: QuotientSet) -> Self {
        Quotient { set: q }
    }

    pub fn base(&self) -> &DefSet {
        &self.set.base
    }

    pub fn relation(&self) -> &DefRel {
        &self.set.eq
    }

    pub fn class_member(&self, e: &Element) -> Result<bool> {
        self.set.base.member(e)
    }

    pub fn class_equal(&self, e: &Element, f: &Element) -> Result<bool> {
        self.set.eq.contains(e, f)
    }

    /// Orbits of the set of classes: base orbits glued whenever some member
    /// of one is equivalent to some member of the other.
    pub fn count_orbits(&self, with_constants: bool) -> usize {
        let base = &self.set.base;
        let theory = base.theory();
        let mut orbits: Vec<(usize, Formula)> = Vec::new();
        for (i, v) in base.variants().iter().enumerate() {
            for t in enumerate_complete_types(v.arity, theory, with_constants) {
                let f = Formula::and([t, v.constraint.clone()]);
                if is_sat(&f, theory) {
                    orbits.push((i, f));
                }
            }
        }
        let mut parent: Vec<usize> = (0..orbits.len()).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            p[i] = r;
            r
        }
        for i in 0..orbits.len() {
            for j in i + 1..orbits.len() {
                if find(&mut parent, i) == find(&mut parent, j) {
                    continue;
                }
                let (vi, fi) = &orbits[i];
                let (vj, fj) = &orbits[j];
                let a = &base.variants()[*vi];
                let b = &base.variants()[*vj];
                let x = terms(&Var::fresh_vec(a.arity));
                let y = terms(&Var::fresh_vec(b.arity));
                let glue = Formula::and([
                    super::apply(fi, &x),
                    super::apply(fj, &y),
                    self.set.eq.holds(&a.tag, &b.tag, &x, &y),
                ]);
                if is_sat(&glue, theory) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri] = rj;
                }
            }
        }
        (0..orbits.len()).filter(|&i| find(&mut parent, i) == i).count()
    }
}
