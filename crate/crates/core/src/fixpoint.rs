//! Fixed points over definable relations: transitive closure, the
//! predecessor-saturation reachability loop, and least fixed points of
//! positive formula templates computed stage by stage.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::defset::{DefRel, DefSet, Element, Tag};
use crate::error::{Error, Result};
use crate::theory::{canonical, equivalent, implies, Formula, Term, TheoryConfig, Var};

/// Iteration budget used when the caller does not choose one.
pub const DEFAULT_CAP: usize = 1000;

/// Least transitive relation containing `r`, together with the first `n`
/// such that `R ∪ R² ∪ … ∪ Rⁿ` already absorbs `Rⁿ⁺¹`.
pub fn transitive_closure(r: &DefRel, cap: usize) -> Result<(DefRel, usize)> {
    if r.domain().shape() != r.codomain().shape() {
        return Err(Error::shape("transitive closure needs a relation from a set to itself"));
    }
    let mut acc = r.clone();
    let mut power = r.clone();
    let mut n = 1;
    loop {
        power = power.compose(r)?;
        let next = acc.union(&power)?;
        if next.is_subset(&acc)? {
            return Ok((acc, n));
        }
        n += 1;
        if n > cap {
            return Err(Error::CapExceeded {
                what: "transitive closure".into(),
                iterations: cap,
            });
        }
        acc = next;
    }
}

/// Reflexive-transitive closure (identity joined to the transitive closure).
pub fn reflexive_transitive_closure(r: &DefRel, cap: usize) -> Result<DefRel> {
    let (t, _) = transitive_closure(r, cap)?;
    t.union(&DefRel::identity(r.domain()))
}

/// Is `b` reachable from `a` along `e`? Starting from `{b}`, predecessors
/// are added until `a` shows up or nothing changes.
pub fn reachable(e: &DefRel, a: &Element, b: &Element, cap: usize) -> Result<bool> {
    reachable_traced(e, a, b, cap).map(|(v, _)| v)
}

/// [`reachable`] plus the number of predecessor rounds performed.
pub fn reachable_traced(e: &DefRel, a: &Element, b: &Element, cap: usize) -> Result<(bool, usize)> {
    if e.domain().shape() != e.codomain().shape() {
        return Err(Error::shape("reachability needs a relation from a set to itself"));
    }
    let vertices = e.domain();
    // R' = ∅, R = {b}
    let mut previous: Option<DefSet> = None;
    let mut current = vertices.singleton(b)?;
    vertices.member(a)?;
    let mut rounds = 0;
    loop {
        if let Some(p) = &previous {
            if current.set_eq(p)? {
                return Ok((false, rounds));
            }
        }
        if current.member(a)? {
            return Ok((true, rounds));
        }
        if rounds >= cap {
            return Err(Error::CapExceeded {
                what: "reachability".into(),
                iterations: cap,
            });
        }
        let pred = e.preimage(&current)?;
        let next = current.union(&pred)?;
        previous = Some(current);
        current = next;
        rounds += 1;
    }
}

/// `μX[y1..yn]. body`, where `body` may apply `X` (positively) and the
/// names of parameter sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LfpSpec {
    pub placeholder: String,
    pub context: Vec<Var>,
    pub body: Formula,
}

impl LfpSpec {
    pub fn new(placeholder: &str, context: Vec<Var>, body: Formula) -> Result<Self> {
        let spec = LfpSpec {
            placeholder: placeholder.to_string(),
            context,
            body,
        };
        spec.check_positive()?;
        Ok(spec)
    }

    pub fn arity(&self) -> usize {
        self.context.len()
    }

    fn check_positive(&self) -> Result<()> {
        fn walk(f: &Formula, x: &str, positive: bool) -> Result<()> {
            match f {
                Formula::Rel(r, _) if r.as_ref() == x && !positive => Err(Error::Positivity(f.to_string())),
                Formula::And(fs) | Formula::Or(fs) => fs.iter().try_for_each(|g| walk(g, x, positive)),
                Formula::Not(g) => walk(g, x, !positive),
                Formula::Implies(a, b) => {
                    walk(a, x, !positive)?;
                    walk(b, x, positive)
                }
                Formula::Exists(_, g) | Formula::Forall(_, g) => walk(g, x, positive),
                _ => Ok(()),
            }
        }
        walk(&self.body, &self.placeholder, true)
    }
}

impl std::fmt::Display for LfpSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(mu {} (", self.placeholder)?;
        for (i, v) in self.context.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ") {})", self.body)
    }
}

/// The stages `X₀ ⊆ X₁ ⊆ …` as formulas over `x1..xn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageTrace {
    pub stages: Vec<Formula>,
    pub stabilized_at: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct LfpResult {
    /// The fixed point as a one-variant set over `A^n`, tagged by the
    /// placeholder name.
    pub relation: DefSet,
    pub trace: StageTrace,
}

impl LfpResult {
    /// Views an even-arity fixed point as a relation on `A^(n/2)`.
    pub fn as_relation(&self) -> Result<DefRel> {
        let v = &self.relation.variants()[0];
        if !v.arity.is_multiple_of(2) {
            return Err(Error::shape("fixed point has odd arity"));
        }
        let half = DefSet::power(self.relation.theory().clone(), &v.tag.to_string(), v.arity / 2);
        DefRel::new(
            half.clone(),
            half,
            [((v.tag.clone(), v.tag.clone()), v.constraint.clone())],
        )
    }
}

/// Stage iteration `X₀ = ⊥`, `Xᵢ₊₁ = body[X := Xᵢ]`, stopping at the first
/// `i` with `Xᵢ ≡ Xᵢ₊₁`. Parameters are substituted by their defining
/// formulas (a disjunction over the variants of matching arity); any other
/// free variable of the body is treated as a rigid parameter.
pub fn lfp(spec: &LfpSpec, params: &BTreeMap<String, DefSet>, theory: &TheoryConfig, cap: usize) -> Result<LfpResult> {
    spec.check_positive()?;
    let n = spec.arity();
    let coords = Var::coords(n);
    let mut theory = theory.clone();
    for p in params.values() {
        theory = theory.merge(p.theory())?;
    }
    let x_name: Arc<str> = Arc::from(spec.placeholder.as_str());
    // the body over x1..xn instead of the declared context names
    let ctx: BTreeMap<Var, Term> = spec
        .context
        .iter()
        .cloned()
        .zip(coords.iter().map(Term::from))
        .collect();
    let body = spec.body.substitute(&ctx);
    let body = body.replace_relations(&mut |name, args| {
        if name == x_name.as_ref() {
            return None;
        }
        let set = params.get(name)?;
        Some(Formula::or(
            set.variants()
                .iter()
                .filter(|v| v.arity == args.len())
                .map(|v| v.at(args)),
        ))
    });
    if let Some(unbound) = find_relation(&body, &x_name) {
        return Err(Error::shape(format!(
            "no parameter set bound to relation symbol {unbound}"
        )));
    }

    let mut stages = vec![Formula::False];
    let mut current = Formula::False;
    let mut i = 0;
    loop {
        let stage = current.clone();
        let unfolded = body
            .replace_relations(&mut |name, args| (name == x_name.as_ref()).then(|| crate::defset::apply(&stage, args)));
        let next = canonical(&unfolded, &theory);
        if equivalent(&current, &next, &theory) {
            let relation = DefSet::single(theory.clone(), Tag::name(&spec.placeholder), n, current)?;
            return Ok(LfpResult {
                relation,
                trace: StageTrace {
                    stages,
                    stabilized_at: Some(i),
                },
            });
        }
        debug_assert!(implies(&current, &next, &theory), "stages must ascend");
        if i + 1 > cap {
            return Err(Error::CapExceeded {
                what: "least fixed point".into(),
                iterations: cap,
            });
        }
        stages.push(next.clone());
        current = next;
        i += 1;
    }
}

fn find_relation(f: &Formula, except: &str) -> Option<String> {
    match f {
        Formula::Rel(r, _) if r.as_ref() != except => Some(r.to_string()),
        Formula::And(fs) | Formula::Or(fs) => fs.iter().find_map(|g| find_relation(g, except)),
        Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => find_relation(g, except),
        Formula::Implies(a, b) => find_relation(a, except).or_else(|| find_relation(b, except)),
        _ => None,
    }
}
