#![allow(dead_code)]
//! Running the binary and checking what it prints.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use atomata_core::automata::Automaton;
use atomata_core::defset::{DefRel, DefSet, SetOp};
use atomata_core::fixpoint::{lfp, transitive_closure, DEFAULT_CAP};
use atomata_core::monoid::{from_nfa, Recognizer};
use atomata_core::syntax::format::{
    parse_automaton, parse_lfp, parse_recognizer, parse_register_automaton, parse_rel, parse_relation_or_set, parse_set,
};
use atomata_core::theory::{implies, parse_formula, TheoryConfig};
use serde_json::Value;

pub const BIN: &str = env!("CARGO_BIN_EXE_atomata");

pub const VERBS: [&str; 21] = [
    "formula-sat",
    "formula-valid",
    "formula-equiv",
    "formula-qe",
    "set-op",
    "set-compare",
    "set-orbits",
    "closure",
    "reach",
    "lfp",
    "aut-validate",
    "aut-accepts",
    "aut-empty",
    "aut-minimize",
    "aut-equiv",
    "aut-slice",
    "ra-compile",
    "mon-laws",
    "mon-from-aut",
    "mon-recognizes",
    "mon-to-aut",
];

pub fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

pub fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[derive(Debug)]
pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Run {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Runs with `--json` and parses the record from stdout, or from stderr
/// when stdout is empty.
pub fn run_json<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> (Run, Value) {
    let mut all: Vec<std::ffi::OsString> = vec!["--json".into()];
    all.extend(args.iter().map(|a| a.as_ref().to_os_string()));
    let r = run(&all);
    let text = if r.stdout.trim().is_empty() {
        &r.stderr
    } else {
        &r.stdout
    };
    let v = serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("not JSON ({e}): {text}"));
    (r, v)
}

/// The structured record: `status`, `verb`, optional `verdict`, `object`,
/// `witness` and `error`, and a `stats` object with wall time and QE calls.
/// Witnesses are printed words or elements, assignments, or law reports.
pub fn check_schema(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("record is not an object")?;
    for key in obj.keys() {
        if !["status", "verb", "verdict", "object", "witness", "error", "stats"].contains(&key.as_str()) {
            return Err(format!("unexpected field `{key}`"));
        }
    }
    let status = obj.get("status").and_then(Value::as_str).ok_or("missing status")?;
    let verb = obj.get("verb").and_then(Value::as_str).ok_or("missing verb")?;
    if !VERBS.contains(&verb) {
        return Err(format!("unknown verb `{verb}`"));
    }
    match status {
        "ok" => {
            if obj.contains_key("error") {
                return Err("ok record carries an error".into());
            }
        }
        "error" => {
            let e = obj
                .get("error")
                .and_then(Value::as_object)
                .ok_or("error record without an error")?;
            if !e.get("message").is_some_and(Value::is_string) || !e.get("exit_code").is_some_and(Value::is_u64) {
                return Err("error needs a message and an exit code".into());
            }
        }
        other => return Err(format!("bad status `{other}`")),
    }
    if let Some(verdict) = obj.get("verdict") {
        if !(verdict.is_boolean() || verdict.is_u64()) {
            return Err(format!("verdict is neither a boolean nor a count: {verdict}"));
        }
    }
    if obj.get("object").is_some_and(|x| !x.is_string()) {
        return Err("`object` is not a string".into());
    }
    if obj
        .get("witness")
        .is_some_and(|x| !(x.is_string() || x.is_object() || x.is_array()))
    {
        return Err("`witness` is not a word, element, assignment or report".into());
    }
    let stats = obj.get("stats").and_then(Value::as_object).ok_or("missing stats")?;
    if !stats.get("wall_ms").is_some_and(Value::is_number) {
        return Err("stats.wall_ms missing".into());
    }
    if !stats.get("qe_calls").is_some_and(Value::is_u64) {
        return Err("stats.qe_calls missing".into());
    }
    if let Some(bad) = stats.iter().find(|(_, x)| !(x.is_number() || x.is_boolean())) {
        return Err(format!("stats.{} is not a number", bad.0));
    }
    Ok(())
}

pub fn without_stats(mut v: Value) -> Value {
    if let Some(o) = v.as_object_mut() {
        o.remove("stats");
    }
    v
}

fn object(v: &Value) -> Result<String, String> {
    v.get("object")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| format!("no object in {v}"))
}

fn ensure(ok: bool, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn same_set(a: &DefSet, b: &DefSet) -> Result<(), String> {
    ensure(a.set_eq(b).map_err(|e| e.to_string())?, "sets differ")
}

fn same_rel(a: &DefRel, b: &DefRel) -> Result<(), String> {
    ensure(a.rel_eq(b).map_err(|e| e.to_string())?, "relations differ")
}

fn same_recognizer(a: &Recognizer, b: &Recognizer) -> Result<(), String> {
    let (p, q) = (a.promonoid(), b.promonoid());
    same_set(p.carrier(), q.carrier())?;
    same_rel(p.mult(), q.mult())?;
    same_set(p.unit(), q.unit())?;
    same_set(a.alphabet(), b.alphabet())?;
    same_rel(a.letters(), b.letters())?;
    same_set(a.accepting(), b.accepting())
}

fn same_automaton(a: &Automaton, b: &Automaton) -> Result<(), String> {
    same_set(a.alphabet(), b.alphabet())?;
    same_set(a.states(), b.states())?;
    same_set(a.initial(), b.initial())?;
    same_set(a.final_states(), b.final_states())?;
    same_rel(a.transition(), b.transition())?;
    ensure(
        a.deterministic_flag() == b.deterministic_flag(),
        "determinism flags differ",
    )
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub struct Case {
    pub name: String,
    pub record: Value,
    pub result: Result<(), String>,
}

fn case(name: &str, args: &[&str], check: impl FnOnce(&Value) -> Result<(), String>) -> Case {
    let (run, record) = run_json(args);
    let result = if run.code != 0 {
        Err(format!("exit {}: {}", run.code, run.stderr))
    } else {
        check_schema(&record).and_then(|_| check(&record))
    };
    Case {
        name: name.to_string(),
        record,
        result,
    }
}

/// Runs every verb that constructs an object, parses the printed object
/// back and compares it with the same construction done in-process.
pub fn round_trips(dir: &Path) -> Vec<Case> {
    let mut out = Vec::new();
    let set_a = write(
        dir,
        "a.set",
        "theory order\nconst @one=1\nset a {\n  variant p (x1 x2) (< x1 x2)\n  variant q (x1) (< x1 @one)\n}\n",
    );
    let set_b = write(
        dir,
        "b.set",
        "theory order\nconst @one=1\nset b {\n  variant p (x1 x2) (< x2 @one)\n  variant q (x1) true\n}\n",
    );
    let line = write(
        dir,
        "line.set",
        "theory equality\nset s { variant a (x1) (!= x1 @7) }\n",
    );
    let neq = write(
        dir,
        "neq.set",
        "theory equality\nset r { variant a (x1 x2) (!= x1 x2) }\n",
    );
    let lt = write(dir, "lt.set", "theory order\nset E { variant E (x1 x2) (< x1 x2) }\n");
    let p = |x: &PathBuf| x.to_str().unwrap().to_string();

    for (logic, text) in [
        ("equality", "(exists (z) (and (!= z x) (= y z)))"),
        ("order", "(forall (z) (=> (< x z) (< y z)))"),
        ("order", "(exists (z) (and (< x z) (< z y)))"),
    ] {
        out.push(case(
            &format!("formula-qe {logic}"),
            &["formula-qe", logic, text],
            |v| {
                let cfg = if logic == "order" {
                    TheoryConfig::dense_order()
                } else {
                    TheoryConfig::equality()
                };
                let back = parse_formula(&object(v)?, &cfg).map_err(err)?;
                let orig = parse_formula(text, &cfg).map_err(err)?;
                ensure(back.is_quantifier_free(), "not quantifier-free")?;
                ensure(
                    implies(&back, &orig, &cfg) && implies(&orig, &back, &cfg),
                    "not equivalent",
                )
            },
        ));
    }

    let load = |x: &PathBuf| parse_set(&read(x), None).unwrap().set;
    let (sa, sb) = (load(&set_a), load(&set_b));
    for (op, other) in [
        (SetOp::Union, Some(&sb)),
        (SetOp::Intersect, Some(&sb)),
        (SetOp::Complement, None),
        (SetOp::Product, Some(&sb)),
    ] {
        let name = format!("{op:?}").to_lowercase();
        let mut args = vec!["set-op".to_string(), name.clone(), p(&set_a)];
        if other.is_some() {
            args.push(p(&set_b));
        }
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        out.push(case(&format!("set-op {name}"), &args, |v| {
            let back = parse_set(&object(v)?, None).map_err(err)?.set;
            let direct = atomata_core::defset::combine(op, &sa, other).map_err(err)?;
            same_set(&back, &direct)
        }));
    }
    out.push(case(
        "set-op complement equality",
        &["set-op", "complement", &p(&line)],
        |v| {
            let back = parse_set(&object(v)?, None).map_err(err)?.set;
            same_set(&back, &load(&line).complement())
        },
    ));

    out.push(case("closure", &["closure", &p(&neq)], |v| {
        let back = parse_rel(&object(v)?, None).map_err(err)?.rel;
        let r = parse_relation_or_set(&read(&neq), None).map_err(err)?.rel;
        same_rel(&back, &transitive_closure(&r, DEFAULT_CAP).map_err(err)?.0)
    }));

    let mu = "(mu X (y1 y2) (or (= y1 y2) (exists (z) (and (E y1 z) (X z y2)))))";
    let param = format!("E={}", p(&lt));
    out.push(case("lfp", &["lfp", mu, "--param", &param], |v| {
        let back = parse_set(&object(v)?, None).map_err(err)?.set;
        let e = load(&lt);
        let cfg = e.theory().clone();
        let spec = parse_lfp(mu, &cfg, &[("E", 2)]).map_err(err)?;
        let params: BTreeMap<String, DefSet> = [("E".to_string(), e)].into_iter().collect();
        same_set(&back, &lfp(&spec, &params, &cfg, DEFAULT_CAP).map_err(err)?.relation)
    }));

    let dfa = core_fixture("first_repeats_dfa.aut");
    let nfa = core_fixture("repeat_nfa.aut");
    let ra = core_fixture("access_control.ra");
    let aut = |x: &PathBuf| parse_automaton(&read(x), None).unwrap();

    out.push(case("aut-minimize", &["aut-minimize", &p(&dfa)], |v| {
        let back = parse_automaton(&object(v)?, None).map_err(err)?;
        ensure(
            aut(&dfa).language_equiv(&back, DEFAULT_CAP).map_err(err)?,
            "languages differ",
        )
    }));
    for n in [2usize, 3] {
        let len = n.to_string();
        out.push(case(&format!("aut-slice {n}"), &["aut-slice", &p(&dfa), &len], |v| {
            let back = parse_set(&object(v)?, None).map_err(err)?.set;
            same_set(&back, &aut(&dfa).accepted_words_of_length(n).map_err(err)?)
        }));
    }
    out.push(case("ra-compile", &["ra-compile", &p(&ra)], |v| {
        let back = parse_automaton(&object(v)?, None).map_err(err)?;
        let direct = parse_register_automaton(&read(&ra), None)
            .map_err(err)?
            .compile()
            .map_err(err)?;
        same_automaton(&back, &direct)
    }));
    out.push(case("mon-from-aut", &["mon-from-aut", &p(&nfa)], |v| {
        let back = parse_recognizer(&object(v)?, None).map_err(err)?;
        same_recognizer(&back, &from_nfa(&aut(&nfa)).map_err(err)?)
    }));
    let rec_text = atomata_core::syntax::format::print_recognizer(&from_nfa(&aut(&nfa)).unwrap());
    let rec = write(dir, "repeat.rec", &rec_text);
    out.push(case("mon-to-aut", &["mon-to-aut", &p(&rec)], |v| {
        let back = parse_automaton(&object(v)?, None).map_err(err)?;
        let direct = parse_recognizer(&rec_text, None).map_err(err)?.to_nfa().map_err(err)?;
        same_automaton(&back, &direct)
    }));
    out
}

/// Verdict-only runs whose records are schema-checked alongside the
/// constructions.
pub fn verdict_runs(dir: &Path) -> Vec<Case> {
    let nfa = core_fixture("repeat_nfa.aut");
    let dfa = core_fixture("first_repeats_dfa.aut");
    let a2 = write(dir, "a2.set", "theory equality\nset s { variant a (x1 x2) true }\n");
    let empty = write(dir, "edges.set", "theory equality\nset e { variant a (x1 x2) false }\n");
    let rec_text = atomata_core::syntax::format::print_recognizer(
        &from_nfa(&parse_automaton(&read(&nfa), None).unwrap()).unwrap(),
    );
    let rec = write(dir, "laws.rec", &rec_text);
    let p = |x: &PathBuf| x.to_str().unwrap().to_string();
    let expect = |want: Value| {
        move |v: &Value| {
            ensure(
                v.get("verdict") == Some(&want),
                &format!("verdict {:?}", v.get("verdict")),
            )
        }
    };
    vec![
        case(
            "formula-sat",
            &["formula-sat", "order", "(and (< x y) (< y x))"],
            expect(Value::Bool(false)),
        ),
        case(
            "formula-valid",
            &["formula-valid", "order", "(or (< a b) (or (= a b) (< b a)))"],
            expect(Value::Bool(true)),
        ),
        case(
            "formula-equiv",
            &["formula-equiv", "equality", "(exists (z) (= z x))", "true"],
            expect(Value::Bool(true)),
        ),
        case(
            "set-compare",
            &["set-compare", "empty", &p(&empty)],
            expect(Value::Bool(true)),
        ),
        case("set-orbits", &["set-orbits", &p(&a2)], expect(Value::from(2u64))),
        case("reach", &["reach", &p(&empty), "@1", "@2"], expect(Value::Bool(false))),
        case("aut-validate", &["aut-validate", &p(&dfa)], expect(Value::Bool(true))),
        case(
            "aut-accepts",
            &["aut-accepts", &p(&nfa), "[@1,@2,@1]"],
            expect(Value::Bool(true)),
        ),
        case("aut-empty", &["aut-empty", &p(&nfa)], expect(Value::Bool(false))),
        case(
            "aut-equiv",
            &["aut-equiv", &p(&dfa), &p(&dfa)],
            expect(Value::Bool(true)),
        ),
        case("mon-laws", &["mon-laws", &p(&rec)], expect(Value::Bool(true))),
    ]
}
