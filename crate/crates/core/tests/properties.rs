use proptest::prelude::*;

use lcu_core::deriv_syntax::{parse_derivation, print_derivation};
use lcu_core::harness::*;
use lcu_core::moggi::{from_moggi, parse_moggi, to_moggi_c};
use lcu_core::parse::{parse_comp, parse_term};
use lcu_core::reduction::{ass_measure, enumerate_steps, joinable, parallel_reduces, star, Rules};
use lcu_core::term::{Comp, Var};
use lcu_core::type_parse::parse_type;
use lcu_core::types::{canon_v, leq_v, meet_cv, leq_cv, AtomTable, Type};
use lcu_core::typing::check_derivation;

fn term(seed: u64, size: usize, closed: bool) -> Comp {
    let cfg = GenConfig { max_size: size, closed, ..GenConfig::default() };
    gen_term_with(&mut case_rng(seed, 0), &cfg)
}

const TOKENS: &[&str] = &[
    "unit", "x", "y", "f", "\\", ".", "(", ")", "*", "let", "=", "in", "Wv", "Wc", "T", "->", "&", "@a", "<=",
    "|-", ":", ",", "rule", "concl", "premises", "side", "ax", "unit-i", "arrow-i", "omega", "\n",
];

fn table() -> AtomTable {
    AtomTable::new(&["a", "b"], &[("a", "b")]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(200) })]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), size in 1usize..30, closed in any::<bool>()) {
        let m = term(seed, size, closed);
        prop_assert_eq!(parse_comp(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn generator_is_deterministic(seed in any::<u64>(), size in 1usize..30) {
        prop_assert_eq!(term(seed, size, true), term(seed, size, true));
    }

    #[test]
    fn reduction_keeps_closedness(seed in any::<u64>()) {
        let m = term(seed, 20, true);
        for s in enumerate_steps(&m, Rules::WITH_ETA) {
            prop_assert!(s.result.is_closed());
            prop_assert!(s.result.free_vars().is_subset(&m.free_vars()));
        }
    }

    #[test]
    fn ass_decreases_measure(seed in any::<u64>()) {
        let m = term(seed, 25, false);
        for s in enumerate_steps(&m, Rules::ASS) {
            prop_assert!(ass_measure(&s.result) < ass_measure(&m));
        }
    }

    #[test]
    fn complete_development_is_parallel(seed in any::<u64>()) {
        let m = term(seed, 18, true);
        prop_assert!(parallel_reduces(&m, &star(&m)));
        prop_assert!(parallel_reduces(&m, &m));
    }

    #[test]
    fn one_step_reducts_join(seed in any::<u64>()) {
        let m = term(seed, 15, true);
        let steps = enumerate_steps(&m, Rules::LAMBDA_C);
        for a in &steps {
            for b in &steps {
                prop_assert!(joinable(&a.result, &b.result, 100).is_some());
            }
        }
    }

    #[test]
    fn substitution_of_fresh_variable_is_identity(seed in any::<u64>()) {
        let m = term(seed, 20, true);
        let v = lcu_core::term::var("q");
        prop_assert_eq!(m.subst(&Var::new("q"), &v), m);
    }

    #[test]
    fn subtyping_is_a_preorder(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let t = table();
        let a = gen_vtype(&mut case_rng(s1, 0), 3, &t);
        let b = gen_vtype(&mut case_rng(s2, 0), 3, &t);
        let c = gen_vtype(&mut case_rng(s3, 0), 3, &t);
        prop_assert!(leq_v(&a, &a, &t).unwrap());
        if leq_v(&a, &b, &t).unwrap() && leq_v(&b, &c, &t).unwrap() {
            prop_assert!(leq_v(&a, &c, &t).unwrap());
        }
    }

    #[test]
    fn meet_is_greatest_lower_bound(s1 in any::<u64>(), s2 in any::<u64>()) {
        let t = table();
        let a = canon_v(&gen_vtype(&mut case_rng(s1, 0), 3, &t), &t);
        let b = canon_v(&gen_vtype(&mut case_rng(s2, 0), 3, &t), &t);
        let m = meet_cv(&a, &b, &t);
        prop_assert!(leq_cv(&m, &a, &t) && leq_cv(&m, &b, &t));
        prop_assert_eq!(meet_cv(&a, &b, &t), meet_cv(&b, &a, &t));
        prop_assert_eq!(meet_cv(&m, &a, &t), m.clone());
    }

    #[test]
    fn canonical_form_is_idempotent(seed in any::<u64>()) {
        let t = table();
        let d = gen_vtype(&mut case_rng(seed, 0), 4, &t);
        let c = canon_v(&d, &t);
        prop_assert_eq!(canon_v(&c.to_vtype(), &t), c.clone());
        prop_assert!(leq_v(&d, &c.to_vtype(), &t).unwrap() && leq_v(&c.to_vtype(), &d, &t).unwrap());
    }

    #[test]
    fn type_print_parse_round_trip(seed in any::<u64>()) {
        let d = gen_vtype(&mut case_rng(seed, 0), 4, &table());
        prop_assert_eq!(parse_type(&d.to_string()).unwrap(), Type::V(d));
    }

    #[test]
    fn typed_generation_validates(seed in any::<u64>()) {
        let cfg = GenConfig { max_size: 12, ..GenConfig::default() };
        let u = universe_of(&cfg);
        let (_, d) = gen_typed_term_with(&mut case_rng(seed, 0), &cfg, &u).unwrap();
        prop_assert!(check_derivation(&d, &cfg.table).is_valid());
        let back = parse_derivation(&print_derivation(&d)).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn moggi_print_parse_round_trip(seed in any::<u64>(), size in 1usize..20) {
        let e = gen_mterm(&mut case_rng(seed, 0), size, &[Var::new("f")]);
        prop_assert_eq!(parse_moggi(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn translations_keep_free_variables(seed in any::<u64>()) {
        let m = term(seed, 20, false);
        let e = to_moggi_c(&m);
        prop_assert_eq!(e.free_vars(), m.free_vars());
        prop_assert_eq!(from_moggi(&e).free_vars(), m.free_vars());
    }

    #[test]
    fn parsers_survive_noise(toks in prop::collection::vec(prop::sample::select(TOKENS), 0..16)) {
        let src = toks.join(" ");
        if let Ok(t) = parse_term(&src) {
            prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t);
        }
        if let Ok(t) = parse_type(&src) {
            prop_assert_eq!(parse_type(&t.to_string()).unwrap(), t);
        }
        if let Ok(e) = parse_moggi(&src) {
            prop_assert_eq!(parse_moggi(&e.to_string()).unwrap(), e);
        }
        if let Ok(d) = parse_derivation(&src) {
            prop_assert_eq!(parse_derivation(&print_derivation(&d)).unwrap(), d);
        }
        let _ = AtomTable::parse(&src);
    }

    #[test]
    fn parsers_survive_any_text(src in any::<String>()) {
        let _ = parse_term(&src);
        let _ = parse_type(&src);
        let _ = parse_moggi(&src);
        let _ = parse_derivation(&src);
        let _ = AtomTable::parse(&src);
    }
}

#[test]
fn token_noise_reaches_the_round_trip() {
    // sanity check on the generator above: some noise must parse
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let strat = prop::collection::vec(prop::sample::select(TOKENS), 0..6);
    let mut runner = TestRunner::deterministic();
    let parsed = (0..2000)
        .filter(|_| {
            let src = strat.new_tree(&mut runner).unwrap().current().join(" ");
            parse_term(&src).is_ok() || parse_type(&src).is_ok() || parse_moggi(&src).is_ok()
        })
        .count();
    assert!(parsed > 20, "only {parsed} inputs parsed");
}
