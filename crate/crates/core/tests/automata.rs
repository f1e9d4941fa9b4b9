mod support;

use atomata_core::automata::{combine_automata, ProductOp, Word};
use atomata_core::automata::{Automaton, RegisterAutomaton};
use atomata_core::defset::Element;
use atomata_core::defset::{DefSet, Tag};
use atomata_core::fixpoint::DEFAULT_CAP;
use atomata_core::fixtures;
use atomata_core::syntax::format::{parse_automaton, parse_register_automaton, parse_word, print_automaton};
use atomata_core::theory::{parse_formula, Atom, TheoryConfig, TheoryKind};
use proptest::prelude::*;
use rand::Rng;
use support::gen::{self, Rng8};
use support::oracle::{self, Machine, RegisterMachine};

fn word(a: &atomata_core::automata::Automaton, text: &str) -> Word {
    parse_word(text, a.alphabet()).unwrap()
}

#[test]
fn repeat_nfa_membership() {
    let a = fixtures::repeat_nfa();
    let v = a.validate();
    assert!(v.is_valid(), "{:?}", v.violations);
    assert!(!v.deterministic);
    for (w, expect) in [
        ("[@1,@2,@1]", true),
        ("[@1,@1]", true),
        ("[@1,@2,@3]", false),
        ("[]", false),
        ("[@3,@1,@2,@1]", true),
    ] {
        assert_eq!(a.accepts(&word(&a, w)).unwrap(), expect, "{w}");
    }
    assert!(!a.is_empty(DEFAULT_CAP).unwrap());
    let w = a.witness(DEFAULT_CAP).unwrap().unwrap();
    assert_eq!(w.len(), 2);
    assert!(a.accepts(&w).unwrap());
}

#[test]
fn first_repeats_dfa_behaviour() {
    let a = fixtures::first_repeats_dfa();
    let v = a.validate();
    assert!(v.is_valid() && v.deterministic, "{:?}", v);
    assert!(a.accepts(&word(&a, "[@2,@1,@2]")).unwrap());
    assert!(!a.accepts(&word(&a, "[@2,@1,@1]")).unwrap());
    let m = a.minimize(DEFAULT_CAP).unwrap();
    assert_eq!(m.class_orbits, 3);
    assert!(a.language_equiv(&m.automaton, DEFAULT_CAP).unwrap());
    let cfg = a.theory().clone();
    let len3 = a.accepted_words_of_length(3).unwrap();
    let expect = DefSet::single(
        cfg.clone(),
        len3.variants()[0].tag.clone(),
        3,
        parse_formula("(or (= x1 x2) (= x1 x3))", &cfg).unwrap(),
    )
    .unwrap();
    assert!(len3.set_eq(&expect).unwrap());
    assert!(a.accepted_words_of_length(1).unwrap().is_empty());
    let xor = combine_automata(ProductOp::Xor, &a, &a).unwrap();
    assert!(xor.is_empty(DEFAULT_CAP).unwrap());
    let _ = Tag::name("a");
}

#[test]
fn printed_automata_reparse() {
    for a in [fixtures::repeat_nfa(), fixtures::first_repeats_dfa()] {
        let text = print_automaton(&a);
        let b = parse_automaton(&text, None).unwrap();
        assert_eq!(print_automaton(&b), text);
    }
    let m = fixtures::first_repeats_dfa().minimize(DEFAULT_CAP).unwrap().automaton;
    let again = parse_automaton(&print_automaton(&m), None).unwrap();
    assert!(again.state_eq().is_some());
}

#[test]
fn access_control_machine() {
    let a = fixtures::access_control().compile().unwrap();
    assert!(a.validate().is_valid());
    let yes = [
        "[setpw(@5),auth(@5),exit]",
        "[setpw(@5),auth(@5)]",
        "[setpw(@5),auth(@5),chpw(@7),auth(@7)]",
    ];
    let no = [
        "[setpw(@5),auth(@1),auth(@2),auth(@3),auth(@5)]",
        "[setpw(@5),auth(@5),chpw(@7),auth(@5)]",
    ];
    for w in yes {
        assert!(a.accepts(&word(&a, w)).unwrap(), "{w}");
    }
    for w in no {
        assert!(!a.accepts(&word(&a, w)).unwrap(), "{w}");
    }
}

#[test]
fn grant_is_reachable() {
    let a = fixtures::access_control().compile().unwrap();
    let grant_only = a.final_states().map_constraints(|v| {
        if v.tag.to_string().starts_with("GRANT_AUTH") {
            v.constraint.clone()
        } else {
            atomata_core::theory::Formula::False
        }
    });
    let g = a.with_final(grant_only).unwrap();
    assert!(!g.is_empty(DEFAULT_CAP).unwrap());
    let w = g.witness(DEFAULT_CAP).unwrap().unwrap();
    assert_eq!(w.len(), 2);
    assert!(g.accepts(&w).unwrap());
}

const TWO_SINKS: &str = "theory equality
alphabet { variant a (x) true }
states { s0(0) p(0) q(0) }
initial { s0 () true }
final { p () true q () true }
delta {
  s0 -> p on (m) () () (= m @1)
  s0 -> q on (m) () () (!= m @1)
  p -> p on (m) () () true
  q -> q on (m) () () true
}
deterministic true";

const REJECT_ALL: &str = "theory equality
alphabet { variant a (x) true }
states { d(0) }
initial { d () true }
final { d () false }
delta { d -> d on (m) () () true }
deterministic true";

#[test]
fn minimization_merges_equivalent_states() {
    let sinks = parse_automaton(TWO_SINKS, None).unwrap();
    let m = sinks.minimize(DEFAULT_CAP).unwrap();
    assert_eq!((m.reachable_orbits, m.class_orbits), (3, 2));
    assert!(sinks.language_equiv(&m.automaton, DEFAULT_CAP).unwrap());

    let none = parse_automaton(REJECT_ALL, None).unwrap();
    assert_eq!(none.minimize(DEFAULT_CAP).unwrap().class_orbits, 1);

    let dfa = fixtures::first_repeats_dfa();
    let once = dfa.minimize(DEFAULT_CAP).unwrap();
    let twice = once.automaton.minimize(DEFAULT_CAP).unwrap();
    assert!(once.class_orbits <= once.reachable_orbits);
    assert_eq!(twice.class_orbits, once.class_orbits);
    assert!(once.automaton.language_equiv(&twice.automaton, DEFAULT_CAP).unwrap());
    let xor = combine_automata(ProductOp::Xor, &dfa, &once.automaton).unwrap();
    assert!(xor.is_empty(DEFAULT_CAP).unwrap());

    assert!(!dfa.language_equiv(&none, DEFAULT_CAP).unwrap());
    let diff = combine_automata(ProductOp::Xor, &dfa, &none).unwrap();
    let w = diff.witness(DEFAULT_CAP).unwrap().unwrap();
    assert_eq!(w.len(), 2);
    assert!(dfa.accepts(&w).unwrap());
}

const TWO_REGISTERS: &str = "theory equality
alphabet {
  variant in (x) true
  variant reset () true
}
registers 2
control P Q F
initial {
  P (and (= r1 bot) (= r2 bot))
}
final {
  F true
}
edges {
  P -> Q on in (x) (and (= r1' x) (= r2' r2))
  Q -> Q on in (x) (and (!= x r1) (= r1' r1) (= r2' x))
  Q -> F on in (x) (and (or (= x r1) (= x r2)) (= r1' r1) (= r2' r2))
  F -> F on in (x) (and (= r1' r1) (= r2' r2))
  F -> P on reset () (and (= r1' bot) (= r2' bot))
  Q -> Q on reset () (and (= r1' r1) (= r2' bot))
}";

fn random_trace(rng: &mut Rng8, ra: &RegisterAutomaton, atoms: &[&str], max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let vs = ra.alphabet.variants();
    // starting with the first letter kind half the time reaches deeper states
    let opener = rng.gen_bool(0.5);
    let letters = (0..len)
        .map(|i| {
            let v = if i == 0 && opener {
                &vs[0]
            } else {
                &vs[rng.gen_range(0..vs.len())]
            };
            let t = (0..v.arity)
                .map(|_| Atom::name(atoms[rng.gen_range(0..atoms.len())]))
                .collect();
            Element::new(v.tag.clone(), t)
        })
        .collect();
    Word::new(letters)
}

/// A few letters from a small atom pool; letters outside the alphabet are
/// dropped.
fn random_word(rng: &mut Rng8, a: &Automaton, max_len: usize) -> Word {
    let cfg = a.theory();
    let mut pool: Vec<Atom> = cfg.constant_atoms();
    pool.extend(match cfg.kind() {
        TheoryKind::Equality => ["1", "2", "3"].map(Atom::name).to_vec(),
        TheoryKind::DenseOrder => vec![Atom::int(0), Atom::int(1), Atom::ratio(1, 2), Atom::int(2)],
    });
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len)
        .filter_map(|_| {
            let v = &a.alphabet().variants()[rng.gen_range(0..a.alphabet().variants().len())];
            let t: Vec<Atom> = (0..v.arity)
                .map(|_| pool[rng.gen_range(0..pool.len())].clone())
                .collect();
            let e = Element::new(v.tag.clone(), t);
            oracle::member_elem(a.alphabet(), &e).then_some(e)
        })
        .collect();
    Word::new(letters)
}

#[test]
fn product_with_universal_automaton() {
    let dfa = fixtures::first_repeats_dfa();
    let text = "theory equality\nalphabet { variant a (x) true }\nstates { all(0) }\ninitial { all () true }\nfinal { all () true }\ndelta { all -> all on (m) () () true }\ndeterministic true\n";
    let all = parse_automaton(text, None).unwrap();
    let both = dfa.product(&all, ProductOp::And).unwrap();
    assert!(both.language_equiv(&dfa, DEFAULT_CAP).unwrap());
    let mut rng = gen::rng(7);
    for _ in 0..20 {
        let w = random_word(&mut rng, &dfa, 5);
        assert_eq!(both.accepts(&w).unwrap(), dfa.accepts(&w).unwrap());
    }
    assert!(dfa.product(&fixtures::repeat_nfa(), ProductOp::And).is_err());
}

#[test]
fn repeat_language_has_infinitely_many_residuals() {
    let nfa = fixtures::repeat_nfa();
    let m = Machine::of(&nfa);
    let prefix = |i: usize| {
        word(
            &nfa,
            &format!("[{}]", (1..=i).map(|k| format!("@{k}")).collect::<Vec<_>>().join(",")),
        )
    };
    for i in 1..=5 {
        for j in i + 1..=5 {
            let sep = word(&nfa, &format!("[@{j}]"));
            assert!(m.accepts(&prefix(j).concat(&sep)) && !m.accepts(&prefix(i).concat(&sep)));
        }
    }
    let _ = TheoryConfig::equality();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn membership_matches_simulation(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let cfg = gen::theory(&mut rng, gen::kind_of(seed));
        let a = gen::automaton(&mut rng, &cfg);
        let m = Machine::of(&a);
        for _ in 0..6 {
            let w = random_word(&mut rng, &a, 4);
            prop_assert_eq!(a.accepts(&w).unwrap(), m.accepts(&w), "{}", w);
        }
    }

    #[test]
    fn emptiness_matches_search(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let cfg = gen::theory(&mut rng, gen::kind_of(seed));
        let a = gen::automaton(&mut rng, &cfg);
        let empty = a.is_empty(DEFAULT_CAP).unwrap();
        prop_assert_eq!(empty, Machine::of(&a).is_empty());
        match a.witness(DEFAULT_CAP).unwrap() {
            Some(w) => prop_assert!(!empty && a.accepts(&w).unwrap() && Machine::of(&a).accepts(&w)),
            None => prop_assert!(empty),
        }
    }

    #[test]
    fn totalizing_keeps_the_language(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let cfg = gen::theory(&mut rng, gen::kind_of(seed));
        let a = gen::automaton(&mut rng, &cfg);
        let t = a.totalize().unwrap();
        prop_assert!(t.transition().is_total());
        for _ in 0..4 {
            let w = random_word(&mut rng, &a, 3);
            prop_assert_eq!(t.accepts(&w).unwrap(), a.accepts(&w).unwrap());
        }
    }

    #[test]
    fn printed_random_automata_reparse(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let cfg = gen::theory(&mut rng, gen::kind_of(seed));
        let a = gen::automaton(&mut rng, &cfg);
        let text = print_automaton(&a);
        let b = parse_automaton(&text, None).unwrap();
        prop_assert!(b.states().set_eq(a.states()).unwrap());
        prop_assert!(b.initial().set_eq(a.initial()).unwrap());
        prop_assert!(b.final_states().set_eq(a.final_states()).unwrap());
        prop_assert!(b.transition().rel_eq(a.transition()).unwrap());
        prop_assert_eq!(print_automaton(&b), text);
    }

    #[test]
    fn compiled_registers_match_direct_runs(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let two = parse_register_automaton(TWO_REGISTERS, None).unwrap();
        for ra in [fixtures::access_control(), two] {
            let a = ra.compile().unwrap();
            let direct = RegisterMachine::of(&ra);
            for _ in 0..10 {
                let w = random_trace(&mut rng, &ra, &["5", "7"], 6);
                prop_assert_eq!(a.accepts(&w).unwrap(), direct.accepts(&w), "{}", w);
            }
        }
    }

    #[test]
    fn dfa_membership_on_words(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let dfa = fixtures::first_repeats_dfa();
        let min = dfa.minimize(DEFAULT_CAP).unwrap().automaton;
        let m = Machine::of(&dfa);
        for _ in 0..4 {
            let w = random_word(&mut rng, &dfa, 5);
            let expect = m.accepts(&w);
            prop_assert_eq!(dfa.accepts(&w).unwrap(), expect);
            prop_assert_eq!(min.accepts(&w).unwrap(), expect);
        }
    }
}
