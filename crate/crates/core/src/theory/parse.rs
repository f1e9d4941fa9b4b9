use super::atom::{Atom, TheoryConfig, TheoryKind};
use super::formula::{Formula, Term, Var};
use crate::error::{Error, Result};
use crate::syntax::lexer::{is_identifier, Cursor, Tok};

/// Parses one formula; the whole input must be consumed.
pub fn parse_formula(text: &str, cfg: &TheoryConfig) -> Result<Formula> {
    let mut cur = Cursor::new(text)?;
    let f = formula(&mut cur, cfg, &[])?;
    cur.finish()?;
    Ok(f.alpha_normalize())
}

/// Like [`parse_formula`], additionally admitting applications `(R t ...)`
/// of the given relation symbols with their arities.
pub fn parse_template(text: &str, cfg: &TheoryConfig, relations: &[(&str, usize)]) -> Result<Formula> {
    let mut cur = Cursor::new(text)?;
    let f = formula(&mut cur, cfg, relations)?;
    cur.finish()?;
    Ok(f.alpha_normalize())
}

/// Reads a formula from a token stream (alpha-normalization is left to the
/// caller so that enclosing structures can rename consistently).
pub fn formula(cur: &mut Cursor, cfg: &TheoryConfig, relations: &[(&str, usize)]) -> Result<Formula> {
    match cur.peek() {
        Some(Tok::Sym(s)) if s == "true" => {
            cur.bump();
            Ok(Formula::True)
        }
        Some(Tok::Sym(s)) if s == "false" => {
            cur.bump();
            Ok(Formula::False)
        }
        Some(Tok::LParen) => {
            cur.bump();
            let head = cur.sym()?;
            let f = match head.as_str() {
                "=" | "!=" | "<" | "<=" | ">" | ">=" => {
                    let a = term(cur, cfg)?;
                    let b = term(cur, cfg)?;
                    if head != "=" && head != "!=" && cfg.kind() != TheoryKind::DenseOrder {
                        return Err(Error::Signature(format!(
                            "`{head}` is only available in the order theory"
                        )));
                    }
                    match head.as_str() {
                        "=" => Formula::Eq(a, b),
                        "!=" => Formula::Neq(a, b),
                        "<" => Formula::Lt(a, b),
                        ">" => Formula::Lt(b, a),
                        "<=" => Formula::Or(vec![Formula::Lt(a.clone(), b.clone()), Formula::Eq(a, b)]),
                        _ => Formula::Or(vec![Formula::Lt(b.clone(), a.clone()), Formula::Eq(a, b)]),
                    }
                }
                "and" | "or" => {
                    let mut parts = Vec::new();
                    while cur.peek() != Some(&Tok::RParen) {
                        if cur.at_end() {
                            return Err(cur.error("unclosed connective"));
                        }
                        parts.push(formula(cur, cfg, relations)?);
                    }
                    match (head.as_str(), parts.len()) {
                        ("and", 0) => Formula::True,
                        ("or", 0) => Formula::False,
                        (_, 1) => parts.pop().unwrap(),
                        ("and", _) => Formula::And(parts),
                        _ => Formula::Or(parts),
                    }
                }
                "not" => Formula::Not(Box::new(formula(cur, cfg, relations)?)),
                "=>" => {
                    let a = formula(cur, cfg, relations)?;
                    let b = formula(cur, cfg, relations)?;
                    Formula::Implies(Box::new(a), Box::new(b))
                }
                "exists" | "forall" => {
                    cur.expect(Tok::LParen)?;
                    let mut vars = Vec::new();
                    while cur.peek() != Some(&Tok::RParen) {
                        vars.push(variable(cur)?);
                    }
                    cur.expect(Tok::RParen)?;
                    if vars.is_empty() {
                        return Err(cur.error("quantifier binds no variable"));
                    }
                    let body = formula(cur, cfg, relations)?;
                    vars.into_iter().rev().fold(body, |acc, v| {
                        if head == "exists" {
                            Formula::Exists(v, Box::new(acc))
                        } else {
                            Formula::Forall(v, Box::new(acc))
                        }
                    })
                }
                r => match relations.iter().find(|(name, _)| *name == r) {
                    Some((name, arity)) => {
                        let mut args = Vec::new();
                        while cur.peek() != Some(&Tok::RParen) {
                            if cur.at_end() {
                                return Err(cur.error("unclosed application"));
                            }
                            args.push(term(cur, cfg)?);
                        }
                        if args.len() != *arity {
                            return Err(cur.error(format!("{name} expects {arity} arguments, got {}", args.len())));
                        }
                        Formula::Rel((*name).into(), args)
                    }
                    None => return Err(cur.error(format!("unknown connective `{r}`"))),
                },
            };
            cur.expect(Tok::RParen)?;
            Ok(f)
        }
        Some(_) => Err(cur.error("expected a formula")),
        None => Err(cur.error("expected a formula, found end of input")),
    }
}

pub fn variable(cur: &mut Cursor) -> Result<Var> {
    let s = cur.sym()?;
    if is_identifier(&s) {
        Ok(Var::new(&s))
    } else {
        Err(cur.error(format!("`{s}` is not a variable name")))
    }
}

pub fn term(cur: &mut Cursor, cfg: &TheoryConfig) -> Result<Term> {
    let s = cur.sym()?;
    if let Some(c) = s.strip_prefix('@') {
        return Ok(Term::Const(atom_text(c, cfg).map_err(|e| match e {
            Error::UndeclaredConstant(_) => e,
            other => cur.error(other.to_string()),
        })?));
    }
    if is_identifier(&s) {
        Ok(Term::Var(Var::new(&s)))
    } else {
        Err(cur.error(format!("`{s}` is not a term")))
    }
}

fn atom_text(c: &str, cfg: &TheoryConfig) -> Result<Atom> {
    cfg.resolve_constant(c)
}

/// Reads `@...` as an atom.
pub fn atom(cur: &mut Cursor, cfg: &TheoryConfig) -> Result<Atom> {
    let s = cur.sym()?;
    match s.strip_prefix('@') {
        Some(c) => cfg.resolve_constant(c),
        None => Err(cur.error(format!("expected an atom `@..`, found `{s}`"))),
    }
}

/// `theory equality|order` followed by any number of `const @a ...` lines.
pub fn theory_header(cur: &mut Cursor) -> Result<TheoryConfig> {
    cur.keyword("theory")?;
    let kind = match cur.sym()?.as_str() {
        "equality" => TheoryKind::Equality,
        "order" => TheoryKind::DenseOrder,
        other => return Err(cur.error(format!("unknown theory `{other}`"))),
    };
    let mut cfg = TheoryConfig::new(kind);
    while cur.eat_keyword("const") {
        while let Some(s) = cur.peek_sym() {
            let Some(body) = s.strip_prefix('@') else { break };
            let (name, value) = match body.split_once('=') {
                Some((n, v)) => (n.to_string(), Some(v.to_string())),
                None => (body.to_string(), None),
            };
            let value = match value {
                Some(v) => Some(Atom::literal(kind, &v).ok_or_else(|| cur.error(format!("bad constant value `{v}`")))?),
                None => None,
            };
            if !is_identifier(&name) && Atom::literal(kind, &name).is_none() {
                return Err(cur.error(format!("bad constant name `@{name}`")));
            }
            cfg = cfg.with_constant(&name, value).map_err(|e| cur.error(e.to_string()))?;
            cur.bump();
        }
    }
    Ok(cfg)
}

pub fn parse_theory(text: &str) -> Result<TheoryConfig> {
    let mut cur = Cursor::new(text)?;
    let cfg = theory_header(&mut cur)?;
    cur.finish()?;
    Ok(cfg)
}
