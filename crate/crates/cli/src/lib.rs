//! The `atomata` command line: one verb per operation, text or JSON output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use atomata_core::automata::{Automaton, ProductOp};
use atomata_core::defset::{combine, compare, CompareMode, DefSet, SetOp};
use atomata_core::fixpoint::{lfp, reachable_traced, transitive_closure, DEFAULT_CAP};
use atomata_core::monoid::{from_nfa, Promonoid};
use atomata_core::syntax::format::{
    parse_automaton, parse_element, parse_lfp, parse_promonoid, parse_recognizer, parse_register_automaton,
    parse_relation_or_set, parse_set, parse_word, print_automaton, print_recognizer, print_rel, print_set,
};
use atomata_core::syntax::lexer::Cursor;
use atomata_core::theory::{
    eliminate_quantifiers, equivalent, find_model, is_sat, is_valid, parse_formula, parse_theory, qe_calls, Formula,
    TheoryConfig,
};
use atomata_core::Error;

#[derive(Debug, Parser)]
#[command(name = "atomata", version, about = "Definable sets, automata and monoids over atoms")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    /// Theory file used for inputs without their own `theory` header.
    #[arg(long, global = true)]
    pub theory: Option<PathBuf>,
    /// Iteration budget for fixed points, closures and refinement.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    /// Print one JSON record instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized test drivers; the engine itself is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SetOpArg {
    Union,
    Intersect,
    Complement,
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CompareArg {
    Empty,
    Subset,
    Equal,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Is the formula satisfiable?
    FormulaSat {
        #[arg(value_name = "THEORY")]
        logic: String,
        formula: String,
    },
    /// Is the formula valid (true under every assignment)?
    FormulaValid {
        #[arg(value_name = "THEORY")]
        logic: String,
        formula: String,
    },
    /// Are the two formulas equivalent?
    FormulaEquiv {
        #[arg(value_name = "THEORY")]
        logic: String,
        left: String,
        right: String,
    },
    /// Print an equivalent quantifier-free formula.
    FormulaQe {
        #[arg(value_name = "THEORY")]
        logic: String,
        formula: String,
    },
    /// Boolean operations and products of sets.
    SetOp {
        op: SetOpArg,
        set: PathBuf,
        other: Option<PathBuf>,
    },
    /// Emptiness, inclusion or equality of sets.
    SetCompare {
        mode: CompareArg,
        set: PathBuf,
        other: Option<PathBuf>,
    },
    /// Number of orbits of a set.
    SetOrbits {
        set: PathBuf,
        /// Count orbits under automorphisms fixing the declared constants.
        #[arg(long)]
        with_constants: bool,
    },
    /// Transitive closure of a relation.
    Closure { relation: PathBuf },
    /// Is the second element reachable from the first?
    Reach {
        relation: PathBuf,
        from: String,
        to: String,
    },
    /// Least fixed point of `(mu X (y..) body)`, given inline or as a file.
    Lfp {
        spec: String,
        /// Parameter sets, as NAME=FILE.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Check the automaton's invariants and determinism.
    AutValidate { automaton: PathBuf },
    /// Does the automaton accept the word?
    AutAccepts { automaton: PathBuf, word: String },
    /// Is the accepted language empty?
    AutEmpty { automaton: PathBuf },
    /// Minimize a deterministic automaton.
    AutMinimize { automaton: PathBuf },
    /// Do two deterministic automata accept the same language?
    AutEquiv { automaton: PathBuf, other: PathBuf },
    /// The accepted words of a fixed length, as a set.
    AutSlice { automaton: PathBuf, length: usize },
    /// Compile a register automaton.
    RaCompile { automaton: PathBuf },
    /// Check the monoid laws of a promonoid or recognizer file.
    MonLaws { promonoid: PathBuf },
    /// The recognizer of an automaton inside its relation promonoid.
    MonFromAut { automaton: PathBuf },
    /// Does the recognizer accept the word?
    MonRecognizes { recognizer: PathBuf, word: String },
    /// The automaton of a recognizer.
    MonToAut { recognizer: PathBuf },
}

impl Verb {
    pub fn name(&self) -> &'static str {
        match self {
            Verb::FormulaSat { .. } => "formula-sat",
            Verb::FormulaValid { .. } => "formula-valid",
            Verb::FormulaEquiv { .. } => "formula-equiv",
            Verb::FormulaQe { .. } => "formula-qe",
            Verb::SetOp { .. } => "set-op",
            Verb::SetCompare { .. } => "set-compare",
            Verb::SetOrbits { .. } => "set-orbits",
            Verb::Closure { .. } => "closure",
            Verb::Reach { .. } => "reach",
            Verb::Lfp { .. } => "lfp",
            Verb::AutValidate { .. } => "aut-validate",
            Verb::AutAccepts { .. } => "aut-accepts",
            Verb::AutEmpty { .. } => "aut-empty",
            Verb::AutMinimize { .. } => "aut-minimize",
            Verb::AutEquiv { .. } => "aut-equiv",
            Verb::AutSlice { .. } => "aut-slice",
            Verb::RaCompile { .. } => "ra-compile",
            Verb::MonLaws { .. } => "mon-laws",
            Verb::MonFromAut { .. } => "mon-from-aut",
            Verb::MonRecognizes { .. } => "mon-recognizes",
            Verb::MonToAut { .. } => "mon-to-aut",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input { .. } => 3,
            CliError::Core(e) => match e {
                Error::CapExceeded { .. } => 4,
                Error::Parse { .. }
                | Error::Signature(_)
                | Error::UndeclaredConstant(_)
                | Error::TheoryMismatch(_)
                | Error::UnknownTag(_)
                | Error::ArityMismatch { .. } => 3,
                _ => 1,
            },
        }
    }
}

/// What a successful command produced.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Payload {
    pub verdict: Option<Value>,
    /// A constructed object in its file format.
    pub object: Option<String>,
    pub witness: Option<Value>,
    /// Extra numbers reported next to the timing.
    pub counters: BTreeMap<String, Value>,
}

#[derive(Debug)]
pub struct RunResult {
    pub verb: &'static str,
    pub outcome: Result<Payload, CliError>,
    pub wall_ms: f64,
    pub qe_calls: u64,
}

#[derive(Serialize)]
struct Record<'a> {
    status: &'a str,
    verb: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<&'a Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    object: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<&'a Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<Value>,
    stats: Value,
}

/// The rendered output of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Emitted {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn emit(result: &RunResult, json_mode: bool) -> Emitted {
    let code = match &result.outcome {
        Ok(_) => 0,
        Err(e) => e.exit_code(),
    };
    let mut stats = json!({ "wall_ms": result.wall_ms, "qe_calls": result.qe_calls });
    if let Ok(p) = &result.outcome {
        for (k, v) in &p.counters {
            stats[k] = v.clone();
        }
    }
    if json_mode {
        let (status, payload, error) = match &result.outcome {
            Ok(p) => ("ok", Some(p), None),
            Err(e) => (
                "error",
                None,
                Some(json!({ "message": e.to_string(), "exit_code": code })),
            ),
        };
        let record = Record {
            status,
            verb: result.verb,
            verdict: payload.and_then(|p| p.verdict.as_ref()),
            object: payload.and_then(|p| p.object.as_deref()),
            witness: payload.and_then(|p| p.witness.as_ref()),
            error,
            stats,
        };
        let stderr = match &result.outcome {
            Err(e) => format!("error: {e}\n"),
            Ok(_) => String::new(),
        };
        return Emitted {
            stdout: serde_json::to_string(&record).expect("serializable") + "\n",
            stderr,
            code,
        };
    }
    match &result.outcome {
        Err(e) => Emitted {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code,
        },
        Ok(p) => {
            let mut out = String::new();
            if let Some(v) = &p.verdict {
                out.push_str(&plain(v));
                out.push('\n');
            }
            if let Some(o) = &p.object {
                out.push_str(o);
                if !o.ends_with('\n') {
                    out.push('\n');
                }
            }
            if let Some(w) = &p.witness {
                out.push_str(&format!("witness: {}\n", plain(w)));
            }
            for (k, v) in &p.counters {
                out.push_str(&format!("; {k}: {}\n", plain(v)));
            }
            Emitted {
                stdout: out,
                stderr: String::new(),
                code,
            }
        }
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) => xs.iter().map(plain).collect::<Vec<_>>().join("; "),
        other => other.to_string(),
    }
}

pub fn execute(cli: &Cli) -> RunResult {
    let start = Instant::now();
    let qe_before = qe_calls();
    let outcome = run(cli);
    RunResult {
        verb: cli.verb.name(),
        outcome,
        wall_ms: start.elapsed().as_secs_f64() * 1000.0,
        qe_calls: qe_calls() - qe_before,
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Attaches the file name to parse errors.
fn in_file<T>(path: &Path, r: atomata_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| match e {
        Error::Parse { .. } => CliError::Input {
            path: path.display().to_string(),
            message: e.to_string(),
        },
        other => CliError::Core(other),
    })
}

fn theory_arg(text: &str) -> Result<TheoryConfig, CliError> {
    match text {
        "equality" => Ok(TheoryConfig::equality()),
        "order" => Ok(TheoryConfig::dense_order()),
        path => {
            let p = Path::new(path);
            in_file(p, parse_theory(&read(p)?))
        }
    }
}

fn verdict(b: bool) -> Payload {
    Payload {
        verdict: Some(Value::Bool(b)),
        ..Payload::default()
    }
}

fn assignment(model: &BTreeMap<atomata_core::theory::Var, atomata_core::theory::Atom>) -> Value {
    Value::Object(
        model
            .iter()
            .map(|(k, v)| (k.to_string(), Value::String(v.to_string())))
            .collect(),
    )
}

/// Automaton files, or register automaton files compiled on the fly.
fn load_automaton(path: &Path, fallback: Option<&TheoryConfig>) -> Result<Automaton, CliError> {
    let text = read(path)?;
    if mentions_keyword(&text, "registers") {
        let ra = in_file(path, parse_register_automaton(&text, fallback))?;
        return Ok(ra.compile()?);
    }
    in_file(path, parse_automaton(&text, fallback))
}

fn mentions_keyword(text: &str, kw: &str) -> bool {
    let Ok(mut cur) = Cursor::new(text) else { return false };
    while let Some(t) = cur.bump() {
        if t == atomata_core::syntax::lexer::Tok::Sym(kw.to_string()) {
            return true;
        }
    }
    false
}

fn run(cli: &Cli) -> Result<Payload, CliError> {
    let fallback = match &cli.theory {
        Some(p) => Some(in_file(p, parse_theory(&read(p)?))?),
        None => None,
    };
    let fb = fallback.as_ref();
    let cap = cli.cap;
    let load_set = |p: &Path| -> Result<DefSet, CliError> { Ok(in_file(p, parse_set(&read(p)?, fb))?.set) };

    match &cli.verb {
        Verb::FormulaSat { logic, formula } => {
            let cfg = theory_arg(logic)?;
            let f = parse_formula(formula, &cfg)?;
            let sat = is_sat(&f, &cfg);
            let mut p = verdict(sat);
            if sat {
                p.witness = find_model(&f, &cfg, &[]).map(|m| assignment(&m));
            }
            Ok(p)
        }
        Verb::FormulaValid { logic, formula } => {
            let cfg = theory_arg(logic)?;
            let f = parse_formula(formula, &cfg)?;
            let valid = is_valid(&f, &cfg);
            let mut p = verdict(valid);
            if !valid {
                p.witness = find_model(&Formula::not(f), &cfg, &[]).map(|m| assignment(&m));
            }
            Ok(p)
        }
        Verb::FormulaEquiv { logic, left, right } => {
            let cfg = theory_arg(logic)?;
            let a = parse_formula(left, &cfg)?;
            let b = parse_formula(right, &cfg)?;
            let same = equivalent(&a, &b, &cfg);
            let mut p = verdict(same);
            if !same {
                let diff = Formula::not(Formula::iff(a, b));
                p.witness = find_model(&diff, &cfg, &[]).map(|m| assignment(&m));
            }
            Ok(p)
        }
        Verb::FormulaQe { logic, formula } => {
            let cfg = theory_arg(logic)?;
            let f = parse_formula(formula, &cfg)?;
            Ok(Payload {
                object: Some(eliminate_quantifiers(&f, &cfg).to_string()),
                ..Payload::default()
            })
        }
        Verb::SetOp { op, set, other } => {
            let s = load_set(set)?;
            let t = other.as_deref().map(load_set).transpose()?;
            let op = match op {
                SetOpArg::Union => SetOp::Union,
                SetOpArg::Intersect => SetOp::Intersect,
                SetOpArg::Complement => SetOp::Complement,
                SetOpArg::Product => SetOp::Product,
            };
            let r = combine(op, &s, t.as_ref())?;
            Ok(Payload {
                object: Some(print_set("result", &r)),
                ..Payload::default()
            })
        }
        Verb::SetCompare { mode, set, other } => {
            let s = load_set(set)?;
            let t = other.as_deref().map(load_set).transpose()?;
            let mode = match mode {
                CompareArg::Empty => CompareMode::Empty,
                CompareArg::Subset => CompareMode::Subset,
                CompareArg::Equal => CompareMode::Equal,
            };
            let v = compare(mode, &s, t.as_ref())?;
            let mut p = verdict(v);
            let counter = match (mode, &t) {
                (CompareMode::Empty, _) if !v => s.witness(),
                (CompareMode::Subset, Some(t)) | (CompareMode::Equal, Some(t)) if !v => {
                    s.difference(t)?.witness().or(match mode {
                        CompareMode::Equal => t.difference(&s)?.witness(),
                        _ => None,
                    })
                }
                _ => None,
            };
            p.witness = counter.map(|e| Value::String(e.to_string()));
            Ok(p)
        }
        Verb::SetOrbits { set, with_constants } => {
            let s = load_set(set)?;
            Ok(Payload {
                verdict: Some(json!(s.count_orbits(*with_constants))),
                ..Payload::default()
            })
        }
        Verb::Closure { relation } => {
            let r = in_file(relation, parse_relation_or_set(&read(relation)?, fb))?;
            let (t, n) = transitive_closure(&r.rel, cap)?;
            let mut p = Payload {
                object: Some(print_rel(&format!("{}_plus", r.name), &t)),
                ..Payload::default()
            };
            p.counters.insert("iterations".into(), json!(n));
            Ok(p)
        }
        Verb::Reach { relation, from, to } => {
            let r = in_file(relation, parse_relation_or_set(&read(relation)?, fb))?.rel;
            let a = parse_element(from, r.domain())?;
            let b = parse_element(to, r.domain())?;
            let (v, rounds) = reachable_traced(&r, &a, &b, cap)?;
            let mut p = verdict(v);
            p.counters.insert("iterations".into(), json!(rounds));
            Ok(p)
        }
        Verb::Lfp { spec, params } => {
            let mut sets = BTreeMap::new();
            for item in params {
                let (name, file) = item
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("--param expects NAME=FILE, got `{item}`")))?;
                sets.insert(name.to_string(), load_set(Path::new(file))?);
            }
            let mut theory = fb.cloned();
            for s in sets.values() {
                theory = Some(match theory {
                    Some(t) => t.merge(s.theory())?,
                    None => s.theory().clone(),
                });
            }
            let theory = theory.ok_or_else(|| CliError::Usage("lfp needs --theory or at least one --param".into()))?;
            let text = if Path::new(spec).is_file() {
                read(Path::new(spec))?
            } else {
                spec.clone()
            };
            let arities: Vec<(String, usize)> = sets
                .iter()
                .flat_map(|(n, s)| s.variants().iter().map(move |v| (n.clone(), v.arity)))
                .collect();
            let rels: Vec<(&str, usize)> = arities.iter().map(|(n, k)| (n.as_str(), *k)).collect();
            let spec = parse_lfp(&text, &theory, &rels)?;
            let res = lfp(&spec, &sets, &theory, cap)?;
            let mut p = Payload {
                object: Some(print_set(&spec.placeholder, &res.relation)),
                ..Payload::default()
            };
            p.counters.insert("stages".into(), json!(res.trace.stages.len()));
            p.counters
                .insert("stabilized_at".into(), json!(res.trace.stabilized_at));
            Ok(p)
        }
        Verb::AutValidate { automaton } => {
            let a = load_automaton(automaton, fb)?;
            let v = a.validate();
            let mut p = verdict(v.is_valid());
            if !v.is_valid() {
                p.witness = Some(json!(v.violations));
            }
            p.counters.insert("deterministic".into(), json!(v.deterministic));
            Ok(p)
        }
        Verb::AutAccepts { automaton, word } => {
            let a = load_automaton(automaton, fb)?;
            let w = parse_word(word, a.alphabet())?;
            Ok(verdict(a.accepts(&w)?))
        }
        Verb::AutEmpty { automaton } => {
            let a = load_automaton(automaton, fb)?;
            let empty = a.is_empty(cap)?;
            let mut p = verdict(empty);
            if !empty {
                p.witness = a.witness(cap)?.map(|w| Value::String(w.to_string()));
            }
            Ok(p)
        }
        Verb::AutMinimize { automaton } => {
            let a = load_automaton(automaton, fb)?;
            let m = a.minimize(cap)?;
            let mut p = Payload {
                object: Some(print_automaton(&m.automaton)),
                ..Payload::default()
            };
            p.counters.insert("rounds".into(), json!(m.rounds));
            p.counters.insert("reachable_orbits".into(), json!(m.reachable_orbits));
            p.counters.insert("class_orbits".into(), json!(m.class_orbits));
            Ok(p)
        }
        Verb::AutEquiv { automaton, other } => {
            let a = load_automaton(automaton, fb)?;
            let b = load_automaton(other, fb)?;
            let xor = a.product(&b, ProductOp::Xor)?;
            let empty = xor.is_empty(cap)?;
            let mut p = verdict(empty);
            if !empty {
                p.witness = xor.witness(cap)?.map(|w| Value::String(w.to_string()));
            }
            Ok(p)
        }
        Verb::AutSlice { automaton, length } => {
            let a = load_automaton(automaton, fb)?;
            let s = a.accepted_words_of_length(*length)?;
            Ok(Payload {
                object: Some(print_set(&format!("words{length}"), &s)),
                ..Payload::default()
            })
        }
        Verb::RaCompile { automaton } => {
            let ra = in_file(automaton, parse_register_automaton(&read(automaton)?, fb))?;
            Ok(Payload {
                object: Some(print_automaton(&ra.compile()?)),
                ..Payload::default()
            })
        }
        Verb::MonLaws { promonoid } => {
            let text = read(promonoid)?;
            let p: Promonoid = if mentions_keyword(&text, "letters") {
                in_file(promonoid, parse_recognizer(&text, fb))?.promonoid().clone()
            } else {
                in_file(promonoid, parse_promonoid(&text, fb))?
            };
            let report = p.check_laws();
            let mut out = verdict(report.all_hold());
            let law = |c: &atomata_core::monoid::LawCheck| json!({ "holds": c.holds, "witness": c.witness });
            out.witness = Some(json!({
                "associativity": law(&report.associativity),
                "left_unit": law(&report.left_unit),
                "right_unit": law(&report.right_unit),
            }));
            Ok(out)
        }
        Verb::MonFromAut { automaton } => {
            let a = load_automaton(automaton, fb)?;
            Ok(Payload {
                object: Some(print_recognizer(&from_nfa(&a)?)),
                ..Payload::default()
            })
        }
        Verb::MonRecognizes { recognizer, word } => {
            let r = in_file(recognizer, parse_recognizer(&read(recognizer)?, fb))?;
            let w = parse_word(word, r.alphabet())?;
            Ok(verdict(r.recognizes(&w)?))
        }
        Verb::MonToAut { recognizer } => {
            let r = in_file(recognizer, parse_recognizer(&read(recognizer)?, fb))?;
            Ok(Payload {
                object: Some(print_automaton(&r.to_nfa()?)),
                ..Payload::default()
            })
        }
    }
}
