//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `EXPECTED_RED` are known to fail (see the README);
//! the run exits non-zero only if the outcome differs from that list.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use lcu_core::convergence::{big_step, small_step_converge, EvalOutcome};
use lcu_core::filter::{build_domain, build_domain_capped, interp_closed, RankDomain};
use lcu_core::harness::*;
use lcu_core::moggi::{
    check_preservation, enumerate_mterms, from_moggi_subst_holds, from_moggi_v, to_moggi_subst_holds,
    PreservationVerdict,
};
use lcu_core::oracle::{brute_subtype_oracle, brute_subtype_oracle_c, completeness_bound_c, completeness_bound_v};
use lcu_core::parse::parse_comp;
use lcu_core::reduction::{enumerate_steps, Rules};
use lcu_core::term::{omega_c, Term, Value, Var};
use lcu_core::types::{
    arrow, enumerate_types, eq_v, leq_c, leq_v, t_of, AtomTable, CType, CanonC, CanonV, VType,
};
use lcu_core::typing::{derive, infer_bounded_c, reduce_derivation, Basis};

const SEED: u64 = 20_261_016;
const EXPECTED_RED: &[usize] = &[7, 8, 9, 10];

// pinned limits
const C1_MAX: Duration = Duration::from_secs(1);
const C2_TERMS: usize = 1000;
const C2_MAX_SIZE: usize = 25;
const C2_FUEL: usize = 200;
const C2_MAX_INCONCLUSIVE: f64 = 0.01;
const C2_MAX: Duration = Duration::from_secs(60);
const C3_TERMS: usize = 300;
const C4_STEPS: usize = 1000;
const C5_TERMS: usize = 1000;
const C5_FUEL: usize = 5000;
const C5_SPARE: usize = 20;
const C6_SAMPLES: usize = 300;
const C7_MAX: Duration = Duration::from_secs(120);
const C7_SAMPLED_PAIRS: usize = 20_000;
// elements tried before the 1-atom rank-2 lattice is declared out of reach
const C8_CAP: usize = 5000;
const C9_PAIRS: usize = 200;
const C10_EXHAUSTIVE_SIZE: usize = 7;
const C10_RANDOM: usize = 1000;
const C10_CONVERTIBILITY: usize = 500;
const C10_SUBST_SIZE: usize = 6;
const MOGGI_FUEL: usize = 4;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn cfg(cases: usize) -> GenConfig {
    GenConfig { seed: SEED, cases, ..GenConfig::default() }
}

fn c1() -> Verdict {
    let t = Instant::now();
    let cp = critical_pairs_canonical();
    let mut errs: Vec<String> = [("a", cp.a), ("b", cp.b), ("c", cp.c), ("M1-M4", cp.ass_ass)]
        .into_iter()
        .filter_map(|(k, r)| r.err().map(|e| format!("{k}: {e}")))
        .collect();
    let r = run_suite("critical-pairs", &cfg(50)).unwrap();
    errs.extend(r.failures.iter().map(|f| f.detail.clone()));
    let el = t.elapsed();
    verdict(
        errs.is_empty() && el < C1_MAX,
        format!("3 diagrams and M1-M4 term for term, {} instantiations, {:?} {}", r.cases, el, errs.join("; ")),
    )
}

fn c2() -> Verdict {
    let t = Instant::now();
    let c = GenConfig { max_size: C2_MAX_SIZE, fuel: C2_FUEL, ..cfg(C2_TERMS) };
    let r = run_suite("confluence", &c).unwrap();
    let el = t.elapsed();
    let frac = r.inconclusives as f64 / r.cases as f64;
    verdict(
        r.failures.is_empty() && frac < C2_MAX_INCONCLUSIVE && el < C2_MAX,
        format!("{} ({:.2}% inconclusive) {:?}", r.summary(), 100.0 * frac, el),
    )
}

fn c3() -> Verdict {
    let r = run_suite("triangle", &cfg(C3_TERMS)).unwrap();
    verdict(r.failures.is_empty() && r.passes == C3_TERMS, r.summary())
}

fn c4() -> Verdict {
    let r = run_suite("ass-sn", &cfg(1500)).unwrap();
    verdict(r.failures.is_empty() && r.checks >= C4_STEPS, format!("{} (checks = ass steps)", r.summary()))
}

fn c5() -> Verdict {
    // terms where both engines run out of fuel do not count towards the quota
    let c = GenConfig { fuel: C5_FUEL, ..cfg(C5_TERMS + C5_SPARE) };
    let r = run_suite("convergence", &c).unwrap();
    let omega = omega_c();
    let big = big_step(&omega, C5_FUEL);
    let small = small_step_converge(&omega, C5_FUEL);
    let diverges = matches!(big, EvalOutcome::Diverges { .. }) && matches!(small, EvalOutcome::Diverges { .. });
    let mut only_top = true;
    for rank in 0..=2 {
        for width in 1..=2 {
            let u = enumerate_types(rank, Some(width), &AtomTable::empty());
            only_top &= infer_bounded_c(&Basis::new(), &omega, &u, &AtomTable::empty()) == vec![CanonC::Top];
        }
    }
    verdict(
        r.failures.is_empty() && r.passes >= C5_TERMS && diverges && only_top,
        format!("{}; omega: big {big}, small {small}, only Wc at rank<=2 width<=2: {only_top}", r.summary()),
    )
}

fn c6() -> Verdict {
    let c = GenConfig { max_size: 14, ..cfg(C6_SAMPLES) };
    let universe = universe_of(&c);
    let sr = run_suite("subject-reduction", &c).unwrap();
    let se = run_suite("subject-expansion", &c).unwrap();
    // independent bounded re-check of every reduct at the conclusion type
    let (mut bounded, mut bounded_ok) = (0, 0);
    for i in 0..C6_SAMPLES {
        let (m, d) = gen_typed_term_with(&mut case_rng(SEED, i), &c, &universe).unwrap();
        for s in enumerate_steps(&m, Rules::LAMBDA_C) {
            bounded += 1;
            let found = derive(&Basis::new(), &Term::Comp(s.result.clone()), &d.concl.ty, &universe, &c.table);
            if matches!(found, Ok(Some(_))) && reduce_derivation(&m, &s, &d, &c.table).is_ok() {
                bounded_ok += 1;
            }
        }
    }
    // the route to `T Wv` along converging reductions of closed terms
    let ch = run_suite("characterization", &GenConfig { max_size: 14, ..cfg(300) }).unwrap();
    verdict(
        sr.failures.is_empty()
            && se.failures.is_empty()
            && se.inconclusives == 0
            && bounded == bounded_ok
            && ch.failures.is_empty()
            && sr.passes == C6_SAMPLES,
        format!(
            "{}; {}; bounded re-check {bounded_ok}/{bounded}; {}",
            sr.summary(),
            se.summary(),
            ch.summary()
        ),
    )
}

struct Tally {
    pairs: usize,
    conclusive: usize,
    disagree: Vec<String>,
}

fn compare_universe(table: &AtomTable, rank: usize, width: usize, t: &mut Tally) {
    let u = enumerate_types(rank, Some(width), table);
    let vs: Vec<VType> = u.values.iter().map(CanonV::to_vtype).collect();
    let cs: Vec<CType> = u.comps.iter().map(CanonC::to_ctype).collect();
    for a in &vs {
        for b in &vs {
            compare_v(a, b, table, t);
        }
    }
    for a in &cs {
        for b in &cs {
            t.pairs += 1;
            let fast = leq_c(a, b, table).unwrap();
            if let Some(slow) = brute_subtype_oracle_c(a, b, completeness_bound_c(a, b), table) {
                t.conclusive += 1;
                if slow != fast {
                    t.disagree.push(format!("{a} <= {b}"));
                }
            }
        }
    }
}

fn compare_v(a: &VType, b: &VType, table: &AtomTable, t: &mut Tally) {
    t.pairs += 1;
    let fast = leq_v(a, b, table).unwrap();
    if let Some(slow) = brute_subtype_oracle(a, b, completeness_bound_v(a, b), table) {
        t.conclusive += 1;
        if slow != fast {
            t.disagree.push(format!("{a} <= {b}"));
        }
    }
}

fn c7() -> Verdict {
    let start = Instant::now();
    let empty = AtomTable::empty();
    let one = AtomTable::new(&["a"], &[]).unwrap();
    let two = AtomTable::new(&["a", "b"], &[]).unwrap();
    let two_ordered = AtomTable::new(&["a", "b"], &[("a", "b")]).unwrap();
    let mut t = Tally { pairs: 0, conclusive: 0, disagree: Vec::new() };
    let top_arrow = arrow(VType::Omega, CType::Omega);
    let mandatory = eq_v(&VType::Omega, &top_arrow, &empty).unwrap() && !leq_c(&CType::Omega, &t_of(VType::Omega), &empty).unwrap();
    for rank in 0..=2 {
        compare_universe(&empty, rank, 2, &mut t);
    }
    for table in [&one, &two, &two_ordered] {
        for rank in 0..=1 {
            compare_universe(table, rank, 2, &mut t);
        }
    }
    let exhaustive = t.pairs;
    // one atom, rank 2: several million pairs, sampled
    let u = enumerate_types(2, Some(2), &one);
    let vs: Vec<VType> = u.values.iter().map(CanonV::to_vtype).collect();
    let mut rng = case_rng(SEED, 7);
    for _ in 0..C7_SAMPLED_PAIRS {
        let a = vs.choose(&mut rng).unwrap();
        let b = if rng.gen_bool(0.5) { vs.choose(&mut rng).unwrap().clone() } else { lcu_core::types::inter_v(a.clone(), vs.choose(&mut rng).unwrap().clone()) };
        compare_v(a, &b, &one, &mut t);
    }
    let full_pairs = u.values.len() * u.values.len();
    let el = start.elapsed();
    let agree = t.disagree.is_empty() && mandatory;
    verdict(
        false,
        format!(
            "{} exhaustive + {} sampled pairs, {} conclusive, {} disagreements, mandatory verdicts {}, {:?}; \
             not exhaustive: 1 atom rank 2 has {} value pairs, 2 atoms rank 2 cannot be enumerated{}",
            exhaustive,
            C7_SAMPLED_PAIRS,
            t.conclusive,
            t.disagree.len(),
            if mandatory { "ok" } else { "WRONG" },
            el,
            full_pairs,
            if agree && el < C7_MAX { "" } else { " (and checks failed)" }
        ),
    )
}

/// Monad laws and `Φ∘Ψ = id` on every point of ranks `1..=n`.
fn monad_laws(dom: &RankDomain) -> (usize, Vec<String>) {
    let mut checks = 0;
    let mut errs = Vec::new();
    for k in 1..=dom.n {
        let lvl = dom.level(k);
        let unit_fn = dom.unit_fn(k - 1);
        for d in &lvl.values {
            for f in &lvl.values {
                checks += 1;
                if dom.bind_f(&dom.unit_at(d, k), f) != dom.apply_f(f, d) {
                    errs.push(format!("left unit at rank {k}: {d}, {f}"));
                }
            }
        }
        for t in &lvl.comps {
            checks += 1;
            if &dom.bind_f(t, &unit_fn) != t {
                errs.push(format!("right unit at rank {k}: {t}"));
            }
            for f in &lvl.values {
                for g in &lvl.values {
                    checks += 1;
                    let lhs = dom.bind_f(&dom.bind_f(t, f), g);
                    let rhs = dom.bind_f(t, &dom.kleisli(k - 1, f, g));
                    if lhs != rhs {
                        errs.push(format!("associativity at rank {k}: {t}, {f}, {g}"));
                    }
                }
            }
        }
        // every monotone table from V_{k-1} to C_k
        let lower = dom.level(k - 1).values.len();
        let comps = &lvl.comps;
        let mut table = vec![0usize; lower];
        loop {
            let f: Vec<CanonC> = table.iter().map(|&i| comps[i].clone()).collect();
            if let Ok(u) = dom.psi_f(k - 1, &f) {
                checks += 1;
                if dom.phi_f(k - 1, &u) != f {
                    errs.push(format!("phi(psi) at rank {k}"));
                }
            }
            let mut i = 0;
            while i < lower && table[i] + 1 == comps.len() {
                table[i] = 0;
                i += 1;
            }
            if i == lower {
                break;
            }
            table[i] += 1;
        }
    }
    (checks, errs)
}

fn c8() -> Verdict {
    let one = AtomTable::new(&["a"], &[]).unwrap();
    let mut checks = 0;
    let mut errs = Vec::new();
    for (table, n) in [(AtomTable::empty(), 2), (one.clone(), 1)] {
        let dom = build_domain(n, &table).unwrap();
        let (c, e) = monad_laws(&dom);
        checks += c;
        errs.extend(e);
    }
    let big = build_domain_capped(2, &one, C8_CAP);
    let covered = big.is_ok();
    let note = match big {
        Ok(_) => String::new(),
        Err(e) => format!("; 1 atom at rank 2 not checked: {e}"),
    };
    verdict(errs.is_empty() && covered, format!("{checks} checks, {} violations{note}", errs.len()))
}

fn c9() -> Verdict {
    let dom = build_domain(2, &AtomTable::empty()).unwrap();
    let c = GenConfig { rank: 2, ..cfg(C9_PAIRS) };
    let r = run_suite("filter-soundness", &c).unwrap();
    let mut adequacy = Vec::new();
    for k in 1..=2 {
        adequacy.push(interp_closed(&dom, &omega_c(), k).unwrap() == CanonC::Top);
        for v in ["unit (\\x. unit x)", "unit (\\x. unit x * x)", "unit (\\x. unit (\\y. unit x))"] {
            adequacy.push(!interp_closed(&dom, &parse_comp(v).unwrap(), k).unwrap().is_top());
        }
    }
    let adequate = adequacy.iter().all(|b| *b);
    let example = r.failures.first().map(|f| format!("; e.g. {} [{}]", f.minimized, f.detail)).unwrap_or_default();
    verdict(r.failures.is_empty() && adequate, format!("{}; adequacy {adequate}{example}", r.summary()))
}

fn c10() -> Verdict {
    let f = Var::new("f");
    let all = enumerate_mterms(C10_EXHAUSTIVE_SIZE, std::slice::from_ref(&f));
    let (mut steps, mut reached, mut not_reached, mut inconclusive) = (0, 0, 0, 0);
    let mut first = None;
    for e in &all {
        for c in check_preservation(e, MOGGI_FUEL).cases {
            steps += 1;
            match c.verdict {
                PreservationVerdict::Reached(_) => reached += 1,
                PreservationVerdict::NotReached => {
                    not_reached += 1;
                    first.get_or_insert(format!("{} --{}--> {}", e, c.step.rule, c.step.result));
                }
                PreservationVerdict::Inconclusive => inconclusive += 1,
            }
        }
    }
    let random = run_suite("moggi-preservation", &GenConfig { max_size: 14, fuel: MOGGI_FUEL, ..cfg(C10_RANDOM) }).unwrap();
    let conv = run_suite("moggi-convertibility", &GenConfig { max_size: 16, ..cfg(C10_CONVERTIBILITY) }).unwrap();

    // both substitution lemmas, exhaustively
    let x = Var::new("x");
    let vars = [x.clone(), f.clone()];
    let mut subst_checks = 0;
    let mut subst_bad = 0;
    let mvals: Vec<_> = enumerate_mterms(3, &[f.clone(), Var::new("y")]).into_iter().filter(|v| v.is_value()).collect();
    for e in enumerate_mterms(C10_SUBST_SIZE, &vars) {
        for v in &mvals {
            subst_checks += 1;
            if !from_moggi_subst_holds(&e, &x, v).unwrap() {
                subst_bad += 1;
            }
        }
    }
    let cvals: Vec<Value> = mvals.iter().filter_map(from_moggi_v).collect();
    for m in enumerate_comps(C10_SUBST_SIZE, &vars) {
        for w in &cvals {
            subst_checks += 1;
            if !to_moggi_subst_holds(&m, &x, w) {
                subst_bad += 1;
            }
        }
    }
    let pass = not_reached == 0
        && inconclusive == 0
        && random.failures.is_empty()
        && conv.failures.is_empty()
        && conv.passes == C10_CONVERTIBILITY
        && subst_bad == 0;
    verdict(
        pass,
        format!(
            "exhaustive: {} terms, {steps} steps, {reached} reached, {not_reached} not reached, {inconclusive} inconclusive{}; \
             random: {}; {}; substitution lemmas {}/{subst_checks}",
            all.len(),
            first.map(|s| format!(" (first: {s})")).unwrap_or_default(),
            random.summary(),
            conv.summary(),
            subst_checks - subst_bad
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("critical-pair goldens", c1),
        ("confluence sampling", c2),
        ("triangle property", c3),
        ("ass termination", c4),
        ("big-step/small-step and Omega_C", c5),
        ("subject reduction and expansion", c6),
        ("subtyping decider vs oracle", c7),
        ("filter monad laws", c8),
        ("model soundness", c9),
        ("let-calculus bridge", c10),
    ];
    let mut surprises = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        let t = Instant::now();
        let v = run();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {tag} {name} [{:.1?}]: {}", t.elapsed(), v.detail);
        if v.pass == EXPECTED_RED.contains(&id) {
            surprises.push(id);
        }
    }
    if !surprises.is_empty() {
        eprintln!("criteria with unexpected outcome: {surprises:?}");
        std::process::exit(1);
    }
}
