//! Text formats for sets, relations, automata, register automata,
//! promonoids and recognizers, together with elements and words.
//!
//! Every object that can be printed can be read back. Blocks are enclosed in
//! braces; each entry names its variables explicitly, and printing always
//! uses the coordinates `x1, x2, ...`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::lexer::{is_identifier, Cursor, Tok};
use crate::automata::{Automaton, Edge, RaEdge, RegisterAutomaton, Word};
use crate::defset::{DefRel, DefSet, Element, Tag, Variant};
use crate::error::{Error, Result};
use crate::fixpoint::LfpSpec;
use crate::monoid::{Promonoid, Recognizer};
use crate::theory::parse::{atom, formula, theory_header, variable};
use crate::theory::{Formula, Term, TheoryConfig, Var};

// ---------------------------------------------------------------- pieces

pub fn tag(cur: &mut Cursor) -> Result<Tag> {
    if cur.eat(&Tok::LAngle) {
        let a = tag(cur)?;
        cur.expect(Tok::Comma)?;
        let b = tag(cur)?;
        cur.expect(Tok::RAngle)?;
        return Ok(Tag::pair(a, b));
    }
    let s = cur.sym()?;
    if is_identifier(&s) {
        Ok(Tag::name(&s))
    } else {
        Err(cur.error(format!("`{s}` is not a tag")))
    }
}

/// `(v1 v2 ...)` with distinct names.
pub fn var_list(cur: &mut Cursor) -> Result<Vec<Var>> {
    cur.expect(Tok::LParen)?;
    let mut vars = Vec::new();
    while !cur.eat(&Tok::RParen) {
        let v = variable(cur)?;
        if vars.contains(&v) {
            return Err(cur.error(format!("variable {v} listed twice")));
        }
        vars.push(v);
    }
    Ok(vars)
}

/// Reads a formula whose free variables must come from `groups` (in order)
/// and renames them to consecutive coordinates.
fn bound_formula(cur: &mut Cursor, cfg: &TheoryConfig, groups: &[&[Var]]) -> Result<Formula> {
    let f = formula(cur, cfg, &[])?;
    let all: Vec<Var> = groups.iter().flat_map(|g| g.iter().cloned()).collect();
    let mut seen = BTreeSet::new();
    for v in &all {
        if !seen.insert(v.clone()) {
            return Err(cur.error(format!("variable {v} is used for two coordinates")));
        }
    }
    if let Some(stray) = f.free_vars().into_iter().find(|v| !all.contains(v)) {
        return Err(cur.error(format!("free variable {stray} is not declared")));
    }
    let map: BTreeMap<Var, Term> = all
        .iter()
        .cloned()
        .zip(Var::coords(all.len()).iter().map(Term::from))
        .collect();
    Ok(f.substitute(&map).alpha_normalize())
}

fn coord_list(k: usize) -> String {
    let vs: Vec<String> = Var::coords(k).iter().map(|v| v.to_string()).collect();
    format!("({})", vs.join(" "))
}

fn coord_range(from: usize, k: usize) -> String {
    let vs: Vec<String> = (from..from + k).map(|i| Var::coord(i).to_string()).collect();
    format!("({})", vs.join(" "))
}

/// The file's own `theory` header, or the fallback.
fn header(cur: &mut Cursor, fallback: Option<&TheoryConfig>) -> Result<TheoryConfig> {
    if cur.peek_sym() == Some("theory") {
        let own = theory_header(cur)?;
        match fallback {
            Some(f) => own.merge(f),
            None => Ok(own),
        }
    } else {
        fallback.cloned().ok_or_else(|| cur.error("missing `theory` header"))
    }
}

/// `{ variant <tag> (<vars>) <formula> ... }`
pub fn set_body(cur: &mut Cursor, cfg: &TheoryConfig) -> Result<DefSet> {
    cur.expect(Tok::LBrace)?;
    let mut variants = Vec::new();
    while !cur.eat(&Tok::RBrace) {
        cur.keyword("variant")?;
        let t = tag(cur)?;
        let vars = var_list(cur)?;
        let f = bound_formula(cur, cfg, &[&vars])?;
        variants.push(Variant::new(t, vars.len(), f));
    }
    DefSet::new(cfg.clone(), variants).map_err(|e| cur.error(e.to_string()))
}

fn print_set_body(out: &mut String, s: &DefSet, indent: &str) {
    out.push_str("{\n");
    for v in s.variants() {
        let _ = writeln!(
            out,
            "{indent}  variant {} {} {}",
            v.tag,
            coord_list(v.arity),
            v.constraint
        );
    }
    let _ = write!(out, "{indent}}}");
}

/// `{ <tag> (<vars>) <formula> ... }` inside `shape`; absent tags are empty
/// and repeated tags are joined.
fn subset(cur: &mut Cursor, cfg: &TheoryConfig, shape: &DefSet) -> Result<DefSet> {
    cur.expect(Tok::LBrace)?;
    let mut parts: BTreeMap<Tag, Vec<Formula>> = BTreeMap::new();
    while !cur.eat(&Tok::RBrace) {
        let t = tag(cur)?;
        let arity = shape.arity(&t).ok_or_else(|| cur.error(format!("unknown tag {t}")))?;
        let vars = var_list(cur)?;
        if vars.len() != arity {
            return Err(cur.error(format!("{t} has arity {arity}, got {} variables", vars.len())));
        }
        let f = bound_formula(cur, cfg, &[&vars])?;
        parts.entry(t).or_default().push(f);
    }
    Ok(shape.map_constraints(|v| {
        Formula::and([
            v.constraint.clone(),
            Formula::or(parts.get(&v.tag).cloned().unwrap_or_default()),
        ])
    }))
}

fn print_subset(out: &mut String, s: &DefSet) {
    out.push('{');
    let mut any = false;
    for v in s.variants().iter().filter(|v| v.constraint != Formula::False) {
        let _ = write!(out, "\n  {} {} {}", v.tag, coord_list(v.arity), v.constraint);
        any = true;
    }
    out.push_str(if any { "\n}" } else { " }" });
}

/// An optional tag followed by a variable list; without a tag, `set` must
/// have exactly one variant.
fn tagged_vars(cur: &mut Cursor, set: &DefSet, what: &str) -> Result<(Tag, Vec<Var>)> {
    let t = if cur.peek() == Some(&Tok::LParen) {
        match set.variants() {
            [only] => only.tag.clone(),
            _ => return Err(cur.error(format!("{what} has several variants; name the tag"))),
        }
    } else {
        tag(cur)?
    };
    let arity = set
        .arity(&t)
        .ok_or_else(|| cur.error(format!("unknown {what} tag {t}")))?;
    let vars = var_list(cur)?;
    if vars.len() != arity {
        return Err(cur.error(format!("{t} has arity {arity}, got {} variables", vars.len())));
    }
    Ok((t, vars))
}

// ---------------------------------------------------------------- sets

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedSet {
    pub name: String,
    pub set: DefSet,
}

/// `[theory ...] set <name> { variant ... }`
pub fn parse_set(text: &str, fallback: Option<&TheoryConfig>) -> Result<NamedSet> {
    let mut cur = Cursor::new(text)?;
    let cfg = header(&mut cur, fallback)?;
    cur.keyword("set")?;
    let name = cur.sym()?;
    let set = set_body(&mut cur, &cfg)?;
    cur.finish()?;
    Ok(NamedSet { name, set })
}

pub fn print_set(name: &str, s: &DefSet) -> String {
    let mut out = format!("{}\nset {name} ", s.theory().header());
    print_set_body(&mut out, s, "");
    out.push('\n');
    out
}

// ---------------------------------------------------------------- relations

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedRel {
    pub name: String,
    pub rel: DefRel,
}

/// `[theory ...] rel <name> { domain {...} codomain {...} part <tag> (<vars>) <tag> (<vars>) <formula> ... }`
pub fn parse_rel(text: &str, fallback: Option<&TheoryConfig>) -> Result<NamedRel> {
    let mut cur = Cursor::new(text)?;
    let cfg = header(&mut cur, fallback)?;
    cur.keyword("rel")?;
    let name = cur.sym()?;
    cur.expect(Tok::LBrace)?;
    cur.keyword("domain")?;
    let domain = set_body(&mut cur, &cfg)?;
    cur.keyword("codomain")?;
    let codomain = set_body(&mut cur, &cfg)?;
    let mut parts = Vec::new();
    while !cur.eat(&Tok::RBrace) {
        cur.keyword("part")?;
        let (a, xs) = tagged_vars(&mut cur, &domain, "domain")?;
        let (b, ys) = tagged_vars(&mut cur, &codomain, "codomain")?;
        let f = bound_formula(&mut cur, &cfg, &[&xs, &ys])?;
        parts.push(((a, b), f));
    }
    cur.finish()?;
    let rel = DefRel::new(domain, codomain, parts).map_err(|e| cur.error(e.to_string()))?;
    Ok(NamedRel { name, rel })
}

pub fn print_rel(name: &str, r: &DefRel) -> String {
    let mut out = format!("{}\nrel {name} {{\n  domain ", r.theory().header());
    print_set_body(&mut out, r.domain(), "  ");
    out.push_str("\n  codomain ");
    print_set_body(&mut out, r.codomain(), "  ");
    out.push('\n');
    for (a, b, f) in r.parts() {
        let m = r.domain().arity(a).unwrap();
        let n = r.codomain().arity(b).unwrap();
        let _ = writeln!(out, "  part {a} {} {b} {} {f}", coord_list(m), coord_range(m, n));
    }
    out.push_str("}\n");
    out
}

/// Reads a relation from either a `rel` file or a one-variant `set` file of
/// even arity `2k`, the latter read as a relation on `A^k`.
pub fn parse_relation_or_set(text: &str, fallback: Option<&TheoryConfig>) -> Result<NamedRel> {
    let mut probe = Cursor::new(text)?;
    if probe.peek_sym() == Some("theory") {
        theory_header(&mut probe)?;
    }
    if probe.peek_sym() == Some("rel") {
        return parse_rel(text, fallback);
    }
    let NamedSet { name, set } = parse_set(text, fallback)?;
    let rel = relation_from_set(&set)?;
    Ok(NamedRel { name, rel })
}

/// A one-variant set of arity `2k` as a relation on the `k`-tuples with the same tag.
pub fn relation_from_set(set: &DefSet) -> Result<DefRel> {
    let [v] = set.variants() else {
        return Err(Error::shape("a set read as a relation must have exactly one variant"));
    };
    if v.arity % 2 != 0 {
        return Err(Error::shape("a set read as a relation must have even arity"));
    }
    let Tag::Name(n) = &v.tag else {
        return Err(Error::shape("a set read as a relation needs a plain tag"));
    };
    let half = DefSet::power(set.theory().clone(), n, v.arity / 2);
    DefRel::new(
        half.clone(),
        half,
        [((v.tag.clone(), v.tag.clone()), v.constraint.clone())],
    )
}

// ---------------------------------------------------------------- elements and words

/// `tag(@a,...)`, `tag` for a nullary variant, or a bare `@a` when `set`
/// has a single variant of arity one.
fn element_in(cur: &mut Cursor, cfg: &TheoryConfig, set: &DefSet) -> Result<Element> {
    if cur.peek_sym().is_some_and(|s| s.starts_with('@')) {
        let a = atom(cur, cfg)?;
        let unary: Vec<&Variant> = set.variants().iter().filter(|v| v.arity == 1).collect();
        return match unary.as_slice() {
            [v] => Ok(Element::new(v.tag.clone(), vec![a])),
            _ => Err(cur.error("a bare atom needs exactly one unary variant to belong to")),
        };
    }
    let t = tag(cur)?;
    let mut tuple = Vec::new();
    if cur.eat(&Tok::LParen) {
        while !cur.eat(&Tok::RParen) {
            if !tuple.is_empty() {
                cur.expect(Tok::Comma)?;
            }
            tuple.push(atom(cur, cfg)?);
        }
    }
    match set.arity(&t) {
        None => Err(Error::UnknownTag(t.to_string())),
        Some(k) if k != tuple.len() => Err(Error::ArityMismatch {
            tag: t.to_string(),
            expected: k,
            got: tuple.len(),
        }),
        Some(_) => Ok(Element::new(t, tuple)),
    }
}

pub fn parse_element(text: &str, set: &DefSet) -> Result<Element> {
    let mut cur = Cursor::new(text)?;
    let e = element_in(&mut cur, set.theory(), set)?;
    cur.finish()?;
    Ok(e)
}

/// `[l1, l2, ...]` over `alphabet`.
pub fn parse_word(text: &str, alphabet: &DefSet) -> Result<Word> {
    let mut cur = Cursor::new(text)?;
    cur.expect(Tok::LBracket)?;
    let mut letters = Vec::new();
    while !cur.eat(&Tok::RBracket) {
        if !letters.is_empty() {
            cur.expect(Tok::Comma)?;
        }
        letters.push(element_in(&mut cur, alphabet.theory(), alphabet)?);
    }
    cur.finish()?;
    Ok(Word::new(letters))
}

// ---------------------------------------------------------------- fixed points

/// `(mu X (y1 ... yn) <formula>)`; `params` lists further relation symbols.
pub fn parse_lfp(text: &str, cfg: &TheoryConfig, params: &[(&str, usize)]) -> Result<LfpSpec> {
    let mut cur = Cursor::new(text)?;
    cur.expect(Tok::LParen)?;
    cur.keyword("mu")?;
    let x = cur.sym()?;
    if !is_identifier(&x) {
        return Err(cur.error(format!("`{x}` is not a relation name")));
    }
    let context = var_list(&mut cur)?;
    let mut rels: Vec<(&str, usize)> = params.to_vec();
    rels.push((x.as_str(), context.len()));
    let body = formula(&mut cur, cfg, &rels)?;
    cur.expect(Tok::RParen)?;
    cur.finish()?;
    LfpSpec::new(&x, context, body)
}

// ---------------------------------------------------------------- automata

pub fn parse_automaton(text: &str, fallback: Option<&TheoryConfig>) -> Result<Automaton> {
    let mut cur = Cursor::new(text)?;
    let cfg = header(&mut cur, fallback)?;
    cur.keyword("alphabet")?;
    let alphabet = set_body(&mut cur, &cfg)?;
    cur.keyword("states")?;
    cur.expect(Tok::LBrace)?;
    let mut variants = Vec::new();
    while !cur.eat(&Tok::RBrace) {
        let t = tag(&mut cur)?;
        cur.expect(Tok::LParen)?;
        let k: usize = cur
            .sym()?
            .parse()
            .map_err(|_| cur.error("expected the arity of the state variant"))?;
        cur.expect(Tok::RParen)?;
        let c = if cur.eat_keyword("where") {
            bound_formula(&mut cur, &cfg, &[&Var::coords(k)])?
        } else {
            Formula::True
        };
        variants.push(Variant::new(t, k, c));
    }
    let states = DefSet::new(cfg.clone(), variants).map_err(|e| cur.error(e.to_string()))?;
    cur.keyword("initial")?;
    let initial = subset(&mut cur, &cfg, &states)?;
    cur.keyword("final")?;
    let final_states = subset(&mut cur, &cfg, &states)?;
    cur.keyword("delta")?;
    cur.expect(Tok::LBrace)?;
    let mut edges = Vec::new();
    while !cur.eat(&Tok::RBrace) {
        let from = tag(&mut cur)?;
        let to = match cur.bump() {
            Some(Tok::Sym(s)) if s == "->" => tag(&mut cur)?,
            _ => return Err(cur.error("expected `->`")),
        };
        cur.keyword("on")?;
        let (letter, lv) = tagged_vars(&mut cur, &alphabet, "letter")?;
        let sv = var_list(&mut cur)?;
        let nv = var_list(&mut cur)?;
        for (t, vs) in [(&from, &sv), (&to, &nv)] {
            match states.arity(t) {
                None => return Err(cur.error(format!("unknown state tag {t}"))),
                Some(k) if k != vs.len() => {
                    return Err(cur.error(format!("state {t} has arity {k}, got {} variables", vs.len())))
                }
                _ => {}
            }
        }
        let formula = bound_formula(&mut cur, &cfg, &[&lv, &sv, &nv])?;
        edges.push(Edge {
            letter,
            from,
            to,
            formula,
        });
    }
    cur.keyword("deterministic")?;
    let deterministic = match cur.sym()?.as_str() {
        "true" => true,
        "false" => false,
        _ => return Err(cur.error("expected `true` or `false`")),
    };
    let mut eq_parts = None;
    if cur.eat_keyword("equiv") {
        cur.expect(Tok::LBrace)?;
        let mut parts = Vec::new();
        while !cur.eat(&Tok::RBrace) {
            let (a, xs) = tagged_vars(&mut cur, &states, "state")?;
            let (b, ys) = tagged_vars(&mut cur, &states, "state")?;
            let f = bound_formula(&mut cur, &cfg, &[&xs, &ys])?;
            parts.push(((a, b), f));
        }
        eq_parts = Some(parts);
    }
    cur.finish()?;
    let a = Automaton::from_edges(alphabet, states.clone(), initial, final_states, edges, deterministic)
        .map_err(|e| cur.error(e.to_string()))?;
    match eq_parts {
        None => Ok(a),
        Some(parts) => {
            let eq = DefRel::new(a.states().clone(), a.states().clone(), parts)?;
            crate::defset::QuotientSet::new(a.states().clone(), eq.clone()).check()?;
            a.with_state_eq(eq)
        }
    }
}

pub fn print_automaton(a: &Automaton) -> String {
    let mut out = format!("{}\nalphabet ", a.theory().header());
    print_set_body(&mut out, a.alphabet(), "");
    out.push_str("\nstates {\n");
    for v in a.states().variants() {
        if v.constraint == Formula::True {
            let _ = writeln!(out, "  {}({})", v.tag, v.arity);
        } else {
            let _ = writeln!(out, "  {}({}) where {}", v.tag, v.arity, v.constraint);
        }
    }
    out.push_str("}\ninitial ");
    print_subset(&mut out, a.initial());
    out.push_str("\nfinal ");
    print_subset(&mut out, a.final_states());
    out.push_str("\ndelta {\n");
    for e in a.edges() {
        let l = a.alphabet().arity(&e.letter).unwrap();
        let m = a.states().arity(&e.from).unwrap();
        let n = a.states().arity(&e.to).unwrap();
        let _ = writeln!(
            out,
            "  {} -> {} on {} {} {} {} {}",
            e.from,
            e.to,
            e.letter,
            coord_list(l),
            coord_range(l, m),
            coord_range(l + m, n),
            e.formula
        );
    }
    let _ = writeln!(out, "}}\ndeterministic {}", a.deterministic_flag());
    if let Some(eq) = a.state_eq() {
        out.push_str("equiv {\n");
        for (x, y, f) in eq.parts() {
            let m = a.states().arity(x).unwrap();
            let n = a.states().arity(y).unwrap();
            let _ = writeln!(out, "  {x} {} {y} {} {f}", coord_list(m), coord_range(m, n));
        }
        out.push_str("}\n");
    }
    out
}

// ---------------------------------------------------------------- register automata

fn label_list(cur: &mut Cursor) -> Result<Vec<String>> {
    let mut out = Vec::new();
    while let Some(s) = cur.peek_sym() {
        if !is_identifier(s) || ["initial", "final", "edges"].contains(&s) {
            break;
        }
        out.push(s.to_string());
        cur.bump();
    }
    Ok(out)
}

fn register_subset(cur: &mut Cursor, cfg: &TheoryConfig) -> Result<Vec<(String, Formula)>> {
    cur.expect(Tok::LBrace)?;
    let mut out = Vec::new();
    while !cur.eat(&Tok::RBrace) {
        let label = cur.sym()?;
        let f = formula(cur, cfg, &[])?.alpha_normalize();
        out.push((label, f));
    }
    Ok(out)
}

/// Register automaton files: `alphabet {...}`, `registers k`, `control ...`,
/// `initial { <label> <formula> ... }`, `final {...}` and
/// `edges { <from> -> <to> on <letter> (<vars>) <guard> ... }`. Guards speak
/// about the letter variables, `r1..rk`, `r1'..rk'` and `bot`.
pub fn parse_register_automaton(text: &str, fallback: Option<&TheoryConfig>) -> Result<RegisterAutomaton> {
    let mut cur = Cursor::new(text)?;
    let cfg = header(&mut cur, fallback)?;
    cur.keyword("alphabet")?;
    let alphabet = set_body(&mut cur, &cfg)?;
    cur.keyword("registers")?;
    let registers: usize = cur
        .sym()?
        .parse()
        .map_err(|_| cur.error("expected the number of registers"))?;
    cur.keyword("control")?;
    let control = label_list(&mut cur)?;
    cur.keyword("initial")?;
    let initial = register_subset(&mut cur, &cfg)?;
    cur.keyword("final")?;
    let final_states = register_subset(&mut cur, &cfg)?;
    cur.keyword("edges")?;
    cur.expect(Tok::LBrace)?;
    let mut edges = Vec::new();
    while !cur.eat(&Tok::RBrace) {
        let from = cur.sym()?;
        match cur.bump() {
            Some(Tok::Sym(s)) if s == "->" => {}
            _ => return Err(cur.error("expected `->`")),
        }
        let to = cur.sym()?;
        cur.keyword("on")?;
        let (letter, letter_vars) = tagged_vars(&mut cur, &alphabet, "letter")?;
        let guard = formula(&mut cur, &cfg, &[])?.alpha_normalize();
        edges.push(RaEdge {
            from,
            to,
            letter,
            letter_vars,
            guard,
        });
    }
    cur.finish()?;
    let ra = RegisterAutomaton {
        theory: cfg,
        alphabet,
        registers,
        control,
        initial,
        final_states,
        edges,
    };
    ra.check()?;
    Ok(ra)
}

pub fn print_register_automaton(ra: &RegisterAutomaton) -> String {
    let mut out = format!("{}\nalphabet ", ra.theory.header());
    print_set_body(&mut out, &ra.alphabet, "");
    let _ = write!(out, "\nregisters {}\ncontrol {}\n", ra.registers, ra.control.join(" "));
    for (kw, spec) in [("initial", &ra.initial), ("final", &ra.final_states)] {
        let _ = writeln!(out, "{kw} {{");
        for (label, f) in spec {
            let _ = writeln!(out, "  {label} {f}");
        }
        out.push_str("}\n");
    }
    out.push_str("edges {\n");
    for e in &ra.edges {
        let vs: Vec<String> = e.letter_vars.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(
            out,
            "  {} -> {} on {} ({}) {}",
            e.from,
            e.to,
            e.letter,
            vs.join(" "),
            e.guard
        );
    }
    out.push_str("}\n");
    out
}

// ---------------------------------------------------------------- promonoids

fn promonoid_body(cur: &mut Cursor, cfg: &TheoryConfig) -> Result<Promonoid> {
    cur.keyword("carrier")?;
    let carrier = set_body(cur, cfg)?;
    cur.keyword("mult")?;
    cur.expect(Tok::LBrace)?;
    let mut parts = Vec::new();
    while !cur.eat(&Tok::RBrace) {
        let (a, xs) = tagged_vars(cur, &carrier, "carrier")?;
        let (b, ys) = tagged_vars(cur, &carrier, "carrier")?;
        let (c, zs) = tagged_vars(cur, &carrier, "carrier")?;
        let f = bound_formula(cur, cfg, &[&xs, &ys, &zs])?;
        parts.push(((Tag::pair(a, b), c), f));
    }
    let mult = DefRel::new(carrier.product(&carrier)?, carrier.clone(), parts).map_err(|e| cur.error(e.to_string()))?;
    cur.keyword("unit")?;
    let unit = subset(cur, cfg, &carrier)?;
    Promonoid::new(carrier, mult, unit)
}

pub fn parse_promonoid(text: &str, fallback: Option<&TheoryConfig>) -> Result<Promonoid> {
    let mut cur = Cursor::new(text)?;
    let cfg = header(&mut cur, fallback)?;
    let p = promonoid_body(&mut cur, &cfg)?;
    cur.finish()?;
    Ok(p)
}

fn print_promonoid_body(out: &mut String, p: &Promonoid) {
    out.push_str("carrier ");
    print_set_body(out, p.carrier(), "");
    out.push_str("\nmult {\n");
    for (ab, c, f) in p.mult().parts() {
        let (a, b) = ab.split().unwrap();
        let (ka, kb) = (p.carrier().arity(a).unwrap(), p.carrier().arity(b).unwrap());
        let kc = p.carrier().arity(c).unwrap();
        let _ = writeln!(
            out,
            "  {a} {} {b} {} {c} {} {f}",
            coord_list(ka),
            coord_range(ka, kb),
            coord_range(ka + kb, kc)
        );
    }
    out.push_str("}\nunit ");
    print_subset(out, p.unit());
    out.push('\n');
}

pub fn print_promonoid(p: &Promonoid) -> String {
    let mut out = format!("{}\n", p.theory().header());
    print_promonoid_body(&mut out, p);
    out
}

/// A promonoid followed by `alphabet {...}`, `letters { <letter> (<vars>) <elem> (<vars>) <formula> ... }`
/// and `accepting {...}`.
pub fn parse_recognizer(text: &str, fallback: Option<&TheoryConfig>) -> Result<Recognizer> {
    let mut cur = Cursor::new(text)?;
    let cfg = header(&mut cur, fallback)?;
    let p = promonoid_body(&mut cur, &cfg)?;
    cur.keyword("alphabet")?;
    let alphabet = set_body(&mut cur, &cfg)?;
    cur.keyword("letters")?;
    cur.expect(Tok::LBrace)?;
    let mut parts = Vec::new();
    while !cur.eat(&Tok::RBrace) {
        let (l, lv) = tagged_vars(&mut cur, &alphabet, "letter")?;
        let (m, mv) = tagged_vars(&mut cur, p.carrier(), "carrier")?;
        let f = bound_formula(&mut cur, &cfg, &[&lv, &mv])?;
        parts.push(((l, m), f));
    }
    let letters = DefRel::new(alphabet.clone(), p.carrier().clone(), parts).map_err(|e| cur.error(e.to_string()))?;
    cur.keyword("accepting")?;
    let accepting = subset(&mut cur, &cfg, p.carrier())?;
    cur.finish()?;
    Recognizer::new(p, alphabet, letters, accepting)
}

pub fn print_recognizer(r: &Recognizer) -> String {
    let p = r.promonoid();
    let mut out = format!(
        "{}\n",
        p.theory()
            .merge(r.alphabet().theory())
            .unwrap_or_else(|_| p.theory().clone())
            .header()
    );
    print_promonoid_body(&mut out, p);
    out.push_str("alphabet ");
    print_set_body(&mut out, r.alphabet(), "");
    out.push_str("\nletters {\n");
    for (l, m, f) in r.letters().parts() {
        let kl = r.alphabet().arity(l).unwrap();
        let km = p.carrier().arity(m).unwrap();
        let _ = writeln!(out, "  {l} {} {m} {} {f}", coord_list(kl), coord_range(kl, km));
    }
    out.push_str("}\naccepting ");
    print_subset(&mut out, r.accepting());
    out.push('\n');
    out
}
