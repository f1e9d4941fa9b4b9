//! Quantifier-free normal forms: literals, conjunctive cubes and their
//! disjunctions, with a complete satisfiability check for conjunctions of
//! literals in both atom theories.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::One;

use super::atom::{Atom, TheoryConfig, TheoryKind};
use super::formula::{Formula, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lit {
    /// Oriented so that the left term is the smaller one.
    Eq(Term, Term),
    Neq(Term, Term),
    Lt(Term, Term),
}

impl Lit {
    pub fn eq(a: Term, b: Term) -> Lit {
        if a <= b {
            Lit::Eq(a, b)
        } else {
            Lit::Eq(b, a)
        }
    }

    pub fn neq(a: Term, b: Term) -> Lit {
        if a <= b {
            Lit::Neq(a, b)
        } else {
            Lit::Neq(b, a)
        }
    }

    fn terms(&self) -> (&Term, &Term) {
        match self {
            Lit::Eq(a, b) | Lit::Neq(a, b) | Lit::Lt(a, b) => (a, b),
        }
    }

    fn mentions(&self, v: &Var) -> bool {
        let (a, b) = self.terms();
        a.as_var() == Some(v) || b.as_var() == Some(v)
    }

    fn map(&self, f: impl Fn(&Term) -> Term) -> Lit {
        match self {
            Lit::Eq(a, b) => Lit::eq(f(a), f(b)),
            Lit::Neq(a, b) => Lit::neq(f(a), f(b)),
            Lit::Lt(a, b) => Lit::Lt(f(a), f(b)),
        }
    }

    /// The negation as a disjunction of literals.
    pub fn negate(&self, kind: TheoryKind) -> Vec<Lit> {
        match self {
            Lit::Eq(a, b) => vec![Lit::neq(a.clone(), b.clone())],
            Lit::Neq(a, b) => vec![Lit::eq(a.clone(), b.clone())],
            Lit::Lt(a, b) => {
                debug_assert_eq!(kind, TheoryKind::DenseOrder);
                vec![Lit::Lt(b.clone(), a.clone()), Lit::eq(a.clone(), b.clone())]
            }
        }
    }

    /// Truth value when both sides are constants.
    fn ground_value(&self) -> Option<bool> {
        let (a, b) = self.terms();
        let (a, b) = (a.as_const()?, b.as_const()?);
        Some(match self {
            Lit::Eq(..) => a == b,
            Lit::Neq(..) => a != b,
            Lit::Lt(..) => atom_lt(a, b),
        })
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            Lit::Eq(a, b) => Formula::Eq(a.clone(), b.clone()),
            Lit::Neq(a, b) => Formula::Neq(a.clone(), b.clone()),
            Lit::Lt(a, b) => Formula::Lt(a.clone(), b.clone()),
        }
    }

    pub fn eval(&self, env: &dyn Fn(&Term) -> Option<Atom>) -> Option<bool> {
        let (a, b) = self.terms();
        let (a, b) = (env(a)?, env(b)?);
        Some(match self {
            Lit::Eq(..) => a == b,
            Lit::Neq(..) => a != b,
            Lit::Lt(..) => atom_lt(&a, &b),
        })
    }
}

fn atom_lt(a: &Atom, b: &Atom) -> bool {
    match (a, b) {
        (Atom::Rat(x), Atom::Rat(y)) => x < y,
        _ => false,
    }
}

/// A satisfiable conjunction of literals in normal form: equalities are
/// oriented towards a class representative (a constant if the class has
/// one), every other literal mentions representatives only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Cube(Vec<Lit>);

impl Cube {
    pub fn top() -> Self {
        Cube(Vec::new())
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn is_top(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for l in &self.0 {
            let (a, b) = l.terms();
            out.extend(a.as_var().cloned());
            out.extend(b.as_var().cloned());
        }
        out
    }

    fn subsumes(&self, other: &Cube) -> bool {
        // sorted-subset test
        let mut it = other.0.iter();
        'outer: for l in &self.0 {
            for m in it.by_ref() {
                if m == l {
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }

    /// Normalizes an arbitrary conjunction; `None` when unsatisfiable.
    pub fn normalize(lits: Vec<Lit>, kind: TheoryKind) -> Option<Cube> {
        let mut uf = UnionFind::default();
        let mut rest = Vec::new();
        for l in lits {
            match l.ground_value() {
                Some(true) => continue,
                Some(false) => return None,
                None => {}
            }
            match &l {
                Lit::Eq(a, b) => {
                    if !uf.union(a, b) {
                        return None;
                    }
                }
                _ => rest.push(l),
            }
        }
        let mut out: BTreeSet<Lit> = BTreeSet::new();
        for (member, rep) in uf.bindings() {
            if member != rep {
                out.insert(Lit::eq(member, rep));
            }
        }
        for l in rest {
            let m = l.map(|t| uf.rep(t.clone()));
            match m.ground_value() {
                Some(true) => continue,
                Some(false) => return None,
                None => {}
            }
            let (a, b) = m.terms();
            if a == b {
                // x != x and x < x
                return None;
            }
            out.insert(m);
        }
        if kind == TheoryKind::DenseOrder {
            // drop disequalities implied by a strict comparison
            let lts: BTreeSet<(Term, Term)> = out
                .iter()
                .filter_map(|l| match l {
                    Lit::Lt(a, b) => Some((a.clone(), b.clone())),
                    _ => None,
                })
                .collect();
            out.retain(|l| match l {
                Lit::Neq(a, b) => !(lts.contains(&(a.clone(), b.clone())) || lts.contains(&(b.clone(), a.clone()))),
                _ => true,
            });
            if has_strict_cycle(&out) {
                return None;
            }
        }
        Some(Cube(out.into_iter().collect()))
    }

    /// `∃v. self`, assuming `self` is normalized.
    pub fn eliminate(&self, v: &Var, kind: TheoryKind) -> Option<Cube> {
        if !self.0.iter().any(|l| l.mentions(v)) {
            return Some(self.clone());
        }
        let vt = Term::Var(v.clone());
        // v equal to some other term: substitute it away
        let partner = self.0.iter().find_map(|l| match l {
            Lit::Eq(a, b) if *a == vt => Some(b.clone()),
            Lit::Eq(a, b) if *b == vt => Some(a.clone()),
            _ => None,
        });
        if let Some(p) = partner {
            let lits = self
                .0
                .iter()
                .map(|l| l.map(|t| if *t == vt { p.clone() } else { t.clone() }))
                .collect();
            return Cube::normalize(lits, kind);
        }
        let mut lits = Vec::new();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for l in &self.0 {
            if !l.mentions(v) {
                lits.push(l.clone());
                continue;
            }
            match l {
                // infinitely many witnesses remain available
                Lit::Neq(..) => {}
                Lit::Lt(a, b) if *b == vt => lower.push(a.clone()),
                Lit::Lt(_, b) => upper.push(b.clone()),
                Lit::Eq(..) => unreachable!("handled above"),
            }
        }
        for lo in &lower {
            for hi in &upper {
                lits.push(Lit::Lt(lo.clone(), hi.clone()));
            }
        }
        Cube::normalize(lits, kind)
    }

    pub fn to_formula(&self) -> Formula {
        Formula::and(self.0.iter().map(Lit::to_formula))
    }

    /// Evaluates under an assignment of all variables.
    pub fn eval(&self, env: &dyn Fn(&Term) -> Option<Atom>) -> Option<bool> {
        for l in &self.0 {
            if !l.eval(env)? {
                return Some(false);
            }
        }
        Some(true)
    }

    /// A concrete satisfying assignment of this cube's variables. Fresh values
    /// avoid the declared constants of `cfg` and every atom in `avoid`.
    pub fn model(&self, cfg: &TheoryConfig, avoid: &[Atom]) -> BTreeMap<Var, Atom> {
        let vars = self.vars();
        let mut uf = UnionFind::default();
        for l in &self.0 {
            if let Lit::Eq(a, b) = l {
                uf.union(a, b);
            }
        }
        let mut used: Vec<Atom> = avoid.to_vec();
        for l in &self.0 {
            let (a, b) = l.terms();
            used.extend(a.as_const().cloned());
            used.extend(b.as_const().cloned());
        }
        let mut value: BTreeMap<Term, Atom> = BTreeMap::new();
        let reps: BTreeSet<Term> = vars.iter().map(|v| uf.rep(Term::Var(v.clone()))).collect();
        match cfg.kind() {
            TheoryKind::Equality => {
                for r in &reps {
                    let a = match r {
                        Term::Const(c) => c.clone(),
                        Term::Var(_) => {
                            let a = cfg.fresh_atom(&used);
                            used.push(a.clone());
                            a
                        }
                    };
                    value.insert(r.clone(), a);
                }
            }
            TheoryKind::DenseOrder => {
                order_model(self, &reps, cfg, &mut used, &mut value);
            }
        }
        vars.into_iter()
            .map(|v| {
                let r = uf.rep(Term::Var(v.clone()));
                let a = match &r {
                    Term::Const(c) => c.clone(),
                    Term::Var(_) => value[&r].clone(),
                };
                (v, a)
            })
            .collect()
    }
}

fn has_strict_cycle(lits: &BTreeSet<Lit>) -> bool {
    let mut succ: BTreeMap<Term, Vec<Term>> = BTreeMap::new();
    let mut consts: BTreeSet<Term> = BTreeSet::new();
    for l in lits {
        if let Lit::Lt(a, b) = l {
            succ.entry(a.clone()).or_default().push(b.clone());
            succ.entry(b.clone()).or_default();
            for t in [a, b] {
                if t.as_const().is_some() {
                    consts.insert(t.clone());
                }
            }
        }
    }
    let consts: Vec<Term> = consts.into_iter().collect();
    for (i, a) in consts.iter().enumerate() {
        for b in &consts[i + 1..] {
            let (x, y) = (a.as_const().unwrap(), b.as_const().unwrap());
            if atom_lt(x, y) {
                succ.get_mut(a).unwrap().push(b.clone());
            } else if atom_lt(y, x) {
                succ.get_mut(b).unwrap().push(a.clone());
            }
        }
    }
    // iterative DFS colouring
    let mut colour: BTreeMap<&Term, u8> = BTreeMap::new();
    for start in succ.keys() {
        if colour.get(start).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut stack: Vec<(&Term, usize)> = vec![(start, 0)];
        colour.insert(start, 1);
        while let Some((node, idx)) = stack.pop() {
            let next = &succ[node];
            if idx < next.len() {
                stack.push((node, idx + 1));
                let n = &next[idx];
                match colour.get(n).copied().unwrap_or(0) {
                    1 => return true,
                    0 => {
                        colour.insert(n, 1);
                        stack.push((n, 0));
                    }
                    _ => {}
                }
            } else {
                colour.insert(node, 2);
            }
        }
    }
    false
}

fn order_model(
    cube: &Cube,
    reps: &BTreeSet<Term>,
    cfg: &TheoryConfig,
    used: &mut Vec<Atom>,
    value: &mut BTreeMap<Term, Atom>,
) {
    let mut succ: BTreeMap<Term, Vec<Term>> = BTreeMap::new();
    let mut pred: BTreeMap<Term, Vec<Term>> = BTreeMap::new();
    for l in cube.lits() {
        if let Lit::Lt(a, b) = l {
            succ.entry(a.clone()).or_default().push(b.clone());
            pred.entry(b.clone()).or_default().push(a.clone());
        }
    }
    let rat = |a: &Atom| a.as_rational().cloned().unwrap();
    // least constant reachable upwards, for every node
    fn upper(
        t: &Term,
        succ: &BTreeMap<Term, Vec<Term>>,
        memo: &mut BTreeMap<Term, Option<BigRational>>,
    ) -> Option<BigRational> {
        if let Some(m) = memo.get(t) {
            return m.clone();
        }
        let mut best: Option<BigRational> = t.as_const().and_then(|a| a.as_rational().cloned());
        if t.as_var().is_some() {
            best = None;
            for s in succ.get(t).into_iter().flatten() {
                let u = match s.as_const() {
                    Some(c) => c.as_rational().cloned(),
                    None => upper(s, succ, memo),
                };
                best = match (best, u) {
                    (Some(x), Some(y)) => Some(if x < y { x } else { y }),
                    (x, None) => x,
                    (None, y) => y,
                };
            }
        }
        memo.insert(t.clone(), best.clone());
        best
    }
    let mut memo = BTreeMap::new();
    // topological order of variable representatives
    let var_reps: Vec<Term> = reps.iter().filter(|t| t.as_var().is_some()).cloned().collect();
    let mut indeg: BTreeMap<Term, usize> = var_reps.iter().map(|t| (t.clone(), 0)).collect();
    for t in &var_reps {
        for p in pred.get(t).into_iter().flatten() {
            if p.as_var().is_some() {
                *indeg.get_mut(t).unwrap() += 1;
            }
        }
    }
    let mut ready: Vec<Term> = indeg.iter().filter(|(_, d)| **d == 0).map(|(t, _)| t.clone()).collect();
    let mut taken: Vec<BigRational> = used.iter().filter_map(|a| a.as_rational().cloned()).collect();
    taken.extend(cfg.constant_atoms().iter().filter_map(|a| a.as_rational().cloned()));
    while let Some(t) = ready.pop() {
        let mut low: Option<BigRational> = None;
        for p in pred.get(&t).into_iter().flatten() {
            let pv = match p.as_const() {
                Some(c) => rat(c),
                None => rat(&value[p]),
            };
            low = Some(match low {
                Some(l) if l > pv => l,
                _ => pv,
            });
        }
        let high = upper(&t, &succ, &mut memo);
        let mut pick = match (&low, &high) {
            (None, None) => BigRational::from_integer(0.into()),
            (Some(l), None) => l + BigRational::one(),
            (None, Some(h)) => h - BigRational::one(),
            (Some(l), Some(h)) => (l + h) / BigRational::from_integer(2.into()),
        };
        // stay clear of values already in use
        while taken.contains(&pick) {
            pick = match &high {
                Some(h) => (&pick + h) / BigRational::from_integer(2.into()),
                None => pick + BigRational::one(),
            };
        }
        taken.push(pick.clone());
        let atom = Atom::Rat(pick);
        used.push(atom.clone());
        value.insert(t.clone(), atom);
        for s in succ.get(&t).into_iter().flatten() {
            if let Some(d) = indeg.get_mut(s) {
                *d -= 1;
                if *d == 0 {
                    ready.push(s.clone());
                }
            }
        }
    }
}

#[derive(Default)]
struct UnionFind {
    parent: BTreeMap<Term, Term>,
}

impl UnionFind {
    fn find(&mut self, t: &Term) -> Term {
        let mut cur = t.clone();
        while let Some(p) = self.parent.get(&cur) {
            if *p == cur {
                break;
            }
            cur = p.clone();
        }
        cur
    }

    fn rep(&self, t: Term) -> Term {
        let mut cur = t;
        while let Some(p) = self.parent.get(&cur) {
            if *p == cur {
                break;
            }
            cur = p.clone();
        }
        cur
    }

    /// Merges the classes; false if that identifies two distinct constants.
    fn union(&mut self, a: &Term, b: &Term) -> bool {
        for t in [a, b] {
            self.parent.entry(t.clone()).or_insert_with(|| t.clone());
        }
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return true;
        }
        if ra.as_const().is_some() && rb.as_const().is_some() {
            return false;
        }
        // constants first in Term order? Var < Const in the derived order, so
        // choose explicitly: constant wins, otherwise the smaller variable.
        let (root, child) = match (ra.as_const().is_some(), rb.as_const().is_some()) {
            (true, false) => (ra, rb),
            (false, true) => (rb, ra),
            _ if ra < rb => (ra, rb),
            _ => (rb, ra),
        };
        self.parent.insert(child, root);
        true
    }

    fn bindings(&self) -> Vec<(Term, Term)> {
        self.parent.keys().map(|t| (t.clone(), self.rep(t.clone()))).collect()
    }
}

/// A disjunction of normalized cubes. The empty disjunction is false; a
/// disjunction containing the empty cube is true.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Dnf(Vec<Cube>);

impl Dnf {
    pub fn bottom() -> Self {
        Dnf(Vec::new())
    }

    pub fn top() -> Self {
        Dnf(vec![Cube::top()])
    }

    pub fn lit(l: Lit, kind: TheoryKind) -> Self {
        match Cube::normalize(vec![l], kind) {
            Some(c) => Dnf(vec![c]),
            None => Dnf::bottom(),
        }
    }

    pub fn from_cubes(cubes: impl IntoIterator<Item = Cube>) -> Self {
        let mut d = Dnf(cubes.into_iter().collect());
        d.simplify();
        d
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.0
    }

    pub fn is_bottom(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_top(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_top()
    }

    fn simplify(&mut self) {
        self.0.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.cmp(b)));
        self.0.dedup();
        let mut kept: Vec<Cube> = Vec::with_capacity(self.0.len());
        for c in self.0.drain(..) {
            if !kept.iter().any(|k| k.subsumes(&c)) {
                kept.push(c);
            }
        }
        kept.sort();
        self.0 = kept;
    }

    pub fn or(mut self, other: Dnf) -> Dnf {
        self.0.extend(other.0);
        self.simplify();
        self
    }

    pub fn and(&self, other: &Dnf, kind: TheoryKind) -> Dnf {
        let mut out = Vec::new();
        for a in &self.0 {
            for b in &other.0 {
                let mut lits = a.0.clone();
                lits.extend(b.0.iter().cloned());
                if let Some(c) = Cube::normalize(lits, kind) {
                    out.push(c);
                }
            }
        }
        Dnf::from_cubes(out)
    }

    pub fn negate(&self, kind: TheoryKind) -> Dnf {
        let mut acc = vec![Cube::top()];
        for c in &self.0 {
            let mut next = Vec::new();
            for a in &acc {
                for l in &c.0 {
                    for nl in l.negate(kind) {
                        let mut lits = a.0.clone();
                        lits.push(nl);
                        if let Some(n) = Cube::normalize(lits, kind) {
                            next.push(n);
                        }
                    }
                }
            }
            let mut d = Dnf(next);
            d.simplify();
            acc = d.0;
            if acc.is_empty() {
                break;
            }
        }
        Dnf(acc)
    }

    pub fn exists(&self, v: &Var, kind: TheoryKind) -> Dnf {
        Dnf::from_cubes(self.0.iter().filter_map(|c| c.eliminate(v, kind)))
    }

    /// Does `self` entail `other`?
    pub fn entails(&self, other: &Dnf, kind: TheoryKind) -> bool {
        'cube: for c in &self.0 {
            if other.0.iter().any(|d| d.subsumes(c)) {
                continue;
            }
            let mut acc = vec![c.clone()];
            for d in &other.0 {
                let mut next = Vec::new();
                for a in &acc {
                    for l in &d.0 {
                        for nl in l.negate(kind) {
                            let mut lits = a.0.clone();
                            lits.push(nl);
                            if let Some(n) = Cube::normalize(lits, kind) {
                                next.push(n);
                            }
                        }
                    }
                }
                let mut nd = Dnf(next);
                nd.simplify();
                acc = nd.0;
                if acc.is_empty() {
                    continue 'cube;
                }
            }
            return false;
        }
        true
    }

    pub fn equivalent(&self, other: &Dnf, kind: TheoryKind) -> bool {
        self == other || (self.entails(other, kind) && other.entails(self, kind))
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.0.iter().flat_map(|c| c.vars()).collect()
    }

    pub fn to_formula(&self) -> Formula {
        Formula::or(self.0.iter().map(Cube::to_formula))
    }

    pub fn eval(&self, env: &dyn Fn(&Term) -> Option<Atom>) -> Option<bool> {
        for c in &self.0 {
            if c.eval(env)? {
                return Some(true);
            }
        }
        Some(false)
    }
}
