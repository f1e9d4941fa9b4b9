use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;

/// The two built-in atom structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoryKind {
    /// A countably infinite set with equality only.
    Equality,
    /// The rationals with their strict order (dense, no endpoints).
    DenseOrder,
}

impl TheoryKind {
    pub fn keyword(self) -> &'static str {
        match self {
            TheoryKind::Equality => "equality",
            TheoryKind::DenseOrder => "order",
        }
    }
}

/// A concrete atom. Under the equality theory atoms are opaque names; under
/// the order theory they are exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Name(Arc<str>),
    Rat(BigRational),
}

impl Atom {
    pub fn name(s: &str) -> Self {
        Atom::Name(Arc::from(s))
    }

    pub fn int(n: i64) -> Self {
        Atom::Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Atom::Rat(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// The atom written `@text` under the given theory.
    pub fn literal(kind: TheoryKind, text: &str) -> Option<Self> {
        match kind {
            TheoryKind::Equality => {
                if !text.is_empty() && text.chars().all(|c| c.is_ascii_digit()) {
                    Some(Atom::name(text))
                } else {
                    None
                }
            }
            TheoryKind::DenseOrder => parse_rational(text).map(Atom::Rat),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Atom::Rat(r) => Some(r),
            Atom::Name(_) => None,
        }
    }

    pub fn kind(&self) -> TheoryKind {
        match self {
            Atom::Name(_) => TheoryKind::Equality,
            Atom::Rat(_) => TheoryKind::DenseOrder,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Name(n) => write!(f, "@{n}"),
            Atom::Rat(r) if r.is_integer() => write!(f, "@{}", r.numer()),
            Atom::Rat(r) => write!(f, "@{}/{}", r.numer(), r.denom()),
        }
    }
}

fn parse_rational(text: &str) -> Option<BigRational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num).ok()?;
    let den = BigInt::from_str(den).ok()?;
    if den.is_zero() || den < BigInt::zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Which atom structure formulas are interpreted in, plus the finite set of
/// named constants that formulas may mention.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TheoryConfig {
    kind: TheoryKind,
    constants: Arc<BTreeMap<Arc<str>, Atom>>,
}

impl TheoryConfig {
    pub fn new(kind: TheoryKind) -> Self {
        TheoryConfig {
            kind,
            constants: Arc::new(BTreeMap::new()),
        }
    }

    pub fn equality() -> Self {
        Self::new(TheoryKind::Equality)
    }

    pub fn dense_order() -> Self {
        Self::new(TheoryKind::DenseOrder)
    }

    pub fn kind(&self) -> TheoryKind {
        self.kind
    }

    /// Declares `@name`. Equality constants denote themselves; order constants
    /// need a rational value.
    pub fn with_constant(mut self, name: &str, value: Option<Atom>) -> Result<Self, Error> {
        let atom = match (self.kind, value) {
            (TheoryKind::Equality, None) => Atom::name(name),
            (TheoryKind::Equality, Some(_)) => {
                return Err(Error::Signature(format!(
                    "equality constant @{name} cannot carry a value"
                )))
            }
            (TheoryKind::DenseOrder, Some(v @ Atom::Rat(_))) => v,
            (TheoryKind::DenseOrder, _) => {
                return Err(Error::Signature(format!(
                    "order constant @{name} needs a rational value (@{name}=p/q)"
                )))
            }
        };
        Arc::make_mut(&mut self.constants).insert(Arc::from(name), atom);
        Ok(self)
    }

    pub fn constants(&self) -> impl Iterator<Item = (&str, &Atom)> {
        self.constants.iter().map(|(k, v)| (k.as_ref(), v))
    }

    pub fn constant_atoms(&self) -> Vec<Atom> {
        let mut v: Vec<Atom> = self.constants.values().cloned().collect();
        v.sort();
        v.dedup();
        v
    }

    /// Resolves the text after `@`: a declared name or a literal of the
    /// theory's constant domain.
    pub fn resolve_constant(&self, text: &str) -> Result<Atom, Error> {
        if let Some(a) = self.constants.get(text) {
            return Ok(a.clone());
        }
        Atom::literal(self.kind, text).ok_or_else(|| Error::UndeclaredConstant(text.to_string()))
    }

    /// Same kind; constants are merged. Declared constants never conflict
    /// because names resolve to fixed atoms.
    pub fn compatible(&self, other: &TheoryConfig) -> bool {
        self.kind == other.kind
            && self
                .constants
                .iter()
                .all(|(k, v)| other.constants.get(k).is_none_or(|w| w == v))
    }

    pub fn merge(&self, other: &TheoryConfig) -> Result<TheoryConfig, Error> {
        if !self.compatible(other) {
            return Err(Error::TheoryMismatch(format!(
                "{} vs {}",
                self.header(),
                other.header()
            )));
        }
        let mut out = self.clone();
        for (k, v) in other.constants.iter() {
            Arc::make_mut(&mut out.constants).insert(k.clone(), v.clone());
        }
        Ok(out)
    }

    /// The header lines of every text format.
    pub fn header(&self) -> String {
        let mut s = format!("theory {}", self.kind.keyword());
        if !self.constants.is_empty() {
            s.push_str("\nconst");
            for (name, atom) in self.constants.iter() {
                match self.kind {
                    TheoryKind::Equality => s.push_str(&format!(" @{name}")),
                    TheoryKind::DenseOrder => s.push_str(&format!(" @{name}={}", &atom.to_string()[1..])),
                }
            }
        }
        s
    }

    /// An atom not among `used` and not a declared constant.
    pub fn fresh_atom(&self, used: &[Atom]) -> Atom {
        let taken = |a: &Atom| used.contains(a) || self.constants.values().any(|c| c == a);
        match self.kind {
            TheoryKind::Equality => {
                let mut n = 1u64;
                loop {
                    let a = Atom::name(&n.to_string());
                    if !taken(&a) {
                        return a;
                    }
                    n += 1;
                }
            }
            TheoryKind::DenseOrder => {
                let max = used
                    .iter()
                    .chain(self.constants.values())
                    .filter_map(Atom::as_rational)
                    .max()
                    .cloned();
                let next = match max {
                    Some(m) => m.floor() + BigRational::one(),
                    None => BigRational::zero(),
                };
                Atom::Rat(next)
            }
        }
    }
}

impl fmt::Display for TheoryConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.header())
    }
}
