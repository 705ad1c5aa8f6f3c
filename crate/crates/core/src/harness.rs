//! Seeded generators and the property suites.
//!
//! Every case draws from its own ChaCha8 stream (`seed`, case index), so a
//! failure is replayed from the pair alone, and cases can run in parallel.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::convergence::{big_step, small_step_converge, EvalOutcome};
use crate::error::{Error, Result};
use crate::filter::{build_domain, interp_closed, interp_comp_at, interp_value_at, EnvN, RankDomain};
use crate::moggi::{
    check_preservation, check_to_moggi_step, from_moggi_subst_holds, to_moggi_subst_holds, Convertible, MTerm,
};
use crate::oracle::{brute_subtype_oracle, completeness_bound_v};
use crate::reduction::{
    ass_measure, enumerate_steps, joinable_with, normalize, par_successors, parallel_reduces, star, Outcome, Rule,
    Rules,
};
use crate::term::{bind, identity, lam, unit, var, Comp, NlComp, Value, Var};
use crate::types::{
    arrow, atom, canon_v, enumerate_types, inter_v, leq_cv, leq_v, t_of, AtomTable, CType, CanonC, CanonV,
    TypeUniverse, VType,
};
use crate::typing::{
    assemble_c, check_derivation, expand_derivation, expansion_route, reduce_derivation, BindPart, Basis, CBasis,
    Derivation, Inferencer, WComp, WVal,
};

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub seed: u64,
    pub cases: usize,
    /// Node budget for generated terms.
    pub max_size: usize,
    pub closed: bool,
    pub rules: Rules,
    pub fuel: usize,
    pub rank: usize,
    pub width: Option<usize>,
    pub table: AtomTable,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            seed: 0,
            cases: 100,
            max_size: 25,
            closed: true,
            rules: Rules::LAMBDA_C,
            fuel: 200,
            rank: 1,
            width: Some(2),
            table: AtomTable::empty(),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Failure {
    pub case: usize,
    /// Replay with this seed and case index.
    pub seed: u64,
    pub term: String,
    pub minimized: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PropertyReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub passes: usize,
    pub failures: Vec<Failure>,
    pub inconclusives: usize,
    /// Individual checks made, e.g. one per reduct pair.
    pub checks: usize,
}

impl PropertyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} cases, {} passed, {} failed, {} inconclusive, {} checks",
            self.suite,
            self.cases,
            self.passes,
            self.failures.len(),
            self.inconclusives,
            self.checks
        )
    }
}

pub const SUITES: [&str; 14] = [
    "confluence",
    "triangle",
    "ass-sn",
    "critical-pairs",
    "subject-reduction",
    "subject-expansion",
    "convergence",
    "characterization",
    "subtyping",
    "filter-soundness",
    "substitution-interp",
    "moggi-preservation",
    "moggi-convertibility",
    "moggi-substitution",
];

pub fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

// ---------------------------------------------------------------------------
// Term generation

const BINDERS: [&str; 4] = ["x", "y", "z", "w"];
const FREE: [&str; 3] = ["f", "g", "h"];

struct TermGen<'a, R: Rng> {
    rng: &'a mut R,
    free: Vec<Var>,
    scope: Vec<Var>,
}

impl<R: Rng> TermGen<'_, R> {
    fn pick_var(&mut self) -> Option<Value> {
        let n = self.scope.len() + self.free.len();
        if n == 0 {
            return None;
        }
        let i = self.rng.gen_range(0..n);
        let x = if i < self.scope.len() { &self.scope[i] } else { &self.free[i - self.scope.len()] };
        Some(Value::Var(x.clone()))
    }

    fn binder(&mut self) -> Var {
        Var::new(BINDERS.choose(self.rng).unwrap())
    }

    fn lam(&mut self, budget: usize) -> Value {
        let x = self.binder();
        self.scope.push(x.clone());
        let body = self.comp(budget.saturating_sub(1));
        self.scope.pop();
        Value::Lam(x, Box::new(body))
    }

    fn min_value(&self) -> usize {
        if self.scope.is_empty() && self.free.is_empty() {
            3
        } else {
            1
        }
    }

    fn value(&mut self, budget: usize) -> Value {
        if budget < 3 || self.rng.gen_bool(0.35) {
            if let Some(v) = self.pick_var() {
                return v;
            }
        }
        self.lam(budget.max(3))
    }

    /// `(a, b)` with `a >= lo_a`, `b >= lo_b` and `a + b = total`.
    fn split(&mut self, total: usize, lo_a: usize, lo_b: usize) -> (usize, usize) {
        let a = self.rng.gen_range(lo_a..=total - lo_b);
        (a, total - a)
    }

    fn comp(&mut self, budget: usize) -> Comp {
        let minv = self.min_value();
        let minc = minv + 1;
        let budget = budget.max(minc);
        let mut shapes = vec![0, 0, 0];
        if budget > minv + 5 {
            shapes.extend([1, 1]);
        }
        if budget >= minc + 4 {
            shapes.push(2);
        }
        if budget >= minc + 8 {
            shapes.extend([3, 3]);
        }
        if budget > minc + minv {
            shapes.extend([4, 4]);
        }
        match *shapes.choose(self.rng).unwrap() {
            0 => Comp::Unit(Box::new(self.value(budget - 1))),
            // a beta redex
            1 => {
                let (a, b) = self.split(budget - 2, minv, 3);
                let v = self.value(a);
                bind(unit(v), self.lam(b))
            }
            // an id redex
            2 => {
                let x = self.binder();
                bind(self.comp(budget - 4), Value::Lam(x.clone(), Box::new(unit(Value::Var(x)))))
            }
            // an ass redex
            3 => {
                let (a, b) = self.split(budget - 1, minc + 4, 3);
                let (a1, a2) = self.split(a - 1, minc, 3);
                let inner = bind(self.comp(a1), self.lam(a2));
                bind(inner, self.lam(b))
            }
            _ => {
                let (a, b) = self.split(budget - 1, minc, minv);
                let m = self.comp(a);
                bind(m, self.value(b))
            }
        }
    }
}

/// A random computation of size at most `cfg.max_size`, biased toward
/// redexes. The smallest closed terms are `unit (\x. unit x)` and its
/// renamings, which are returned when the budget is smaller than that.
pub fn gen_term(cfg: &GenConfig) -> Comp {
    gen_term_with(&mut case_rng(cfg.seed, 0), cfg)
}

pub fn gen_term_with<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Comp {
    let free = if cfg.closed { Vec::new() } else { FREE.iter().map(|x| Var::new(x)).collect() };
    gen_comp_over(rng, cfg.max_size, &free)
}

/// A random computation whose free variables are among `free`.
pub fn gen_comp_over<R: Rng>(rng: &mut R, budget: usize, free: &[Var]) -> Comp {
    let mut g = TermGen { rng, free: free.to_vec(), scope: Vec::new() };
    let size = if budget <= 4 { budget } else { g.rng.gen_range(budget / 2..=budget) };
    g.comp(size)
}

pub fn gen_value_over<R: Rng>(rng: &mut R, budget: usize, free: &[Var]) -> Value {
    let mut g = TermGen { rng, free: free.to_vec(), scope: Vec::new() };
    g.value(budget)
}

/// Every computation of size at most `max_size` over the free variables,
/// with binders named by depth (`y0`, `y1`, ...), so each α-class once.
pub fn enumerate_comps(max_size: usize, free: &[Var]) -> Vec<Comp> {
    let mut e = CompEnum { free: free.to_vec(), comps: HashMap::new(), values: HashMap::new() };
    (1..=max_size).flat_map(|s| e.comps(s, 0)).collect()
}

struct CompEnum {
    free: Vec<Var>,
    comps: HashMap<(usize, usize), Vec<Comp>>,
    values: HashMap<(usize, usize), Vec<Value>>,
}

impl CompEnum {
    fn values(&mut self, size: usize, depth: usize) -> Vec<Value> {
        if let Some(v) = self.values.get(&(size, depth)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            out.extend(self.free.iter().cloned().map(Value::Var));
            out.extend((0..depth).map(|d| Value::Var(Var::new(&format!("y{d}")))));
        } else {
            let x = Var::new(&format!("y{depth}"));
            for b in self.comps(size - 1, depth + 1) {
                out.push(Value::Lam(x.clone(), Box::new(b)));
            }
        }
        self.values.insert((size, depth), out.clone());
        out
    }

    fn comps(&mut self, size: usize, depth: usize) -> Vec<Comp> {
        if let Some(v) = self.comps.get(&(size, depth)) {
            return v.clone();
        }
        let mut out: Vec<Comp> = Vec::new();
        if size >= 2 {
            out.extend(self.values(size - 1, depth).into_iter().map(unit));
            for ls in 2..size - 1 {
                let left = self.comps(ls, depth);
                let right = self.values(size - 1 - ls, depth);
                for l in &left {
                    for r in &right {
                        out.push(bind(l.clone(), r.clone()));
                    }
                }
            }
        }
        self.comps.insert((size, depth), out.clone());
        out
    }
}

/// A random term of the let-calculus over `free`, size at most `budget`.
pub fn gen_mterm<R: Rng>(rng: &mut R, budget: usize, free: &[Var]) -> MTerm {
    fn go<R: Rng>(rng: &mut R, budget: usize, free: &[Var], scope: &mut Vec<Var>) -> MTerm {
        let pick = |rng: &mut R, scope: &[Var]| {
            let all: Vec<&Var> = scope.iter().chain(free.iter()).collect();
            MTerm::Var((*all.choose(rng).unwrap()).clone())
        };
        if budget < 2 || (budget < 4 && rng.gen_bool(0.5)) {
            return pick(rng, scope);
        }
        let x = Var::new(BINDERS.choose(rng).unwrap());
        match rng.gen_range(0..3) {
            0 => {
                scope.push(x.clone());
                let b = go(rng, budget - 1, free, scope);
                scope.pop();
                MTerm::Lam(x, Box::new(b))
            }
            k if budget >= 3 => {
                let a = rng.gen_range(1..budget - 1);
                let l = go(rng, a, free, scope);
                if k == 1 {
                    let r = go(rng, budget - 1 - a, free, scope);
                    MTerm::App(Box::new(l), Box::new(r))
                } else {
                    scope.push(x.clone());
                    let r = go(rng, budget - 1 - a, free, scope);
                    scope.pop();
                    MTerm::Let(x, Box::new(l), Box::new(r))
                }
            }
            _ => pick(rng, scope),
        }
    }
    go(rng, budget, free, &mut Vec::new())
}

// ---------------------------------------------------------------------------
// Typed generation

struct TypedGen<'a, R: Rng> {
    rng: &'a mut R,
    universe: &'a TypeUniverse,
    table: &'a AtomTable,
}

impl<R: Rng> TypedGen<'_, R> {
    fn comp(&mut self, basis: &CBasis, target: &CanonC, budget: usize) -> Option<(Comp, WComp)> {
        let CanonC::T(d) = target else {
            let free: Vec<Var> = basis.keys().cloned().collect();
            return Some((gen_comp_over(self.rng, budget.max(2), &free), WComp::Omega));
        };
        if budget < 5 || self.rng.gen_bool(0.35) {
            let (v, w) = self.value(basis, d, budget.saturating_sub(1))?;
            return Some((unit(v), WComp::Unit { w: Box::new(w), ty: target.clone() }));
        }
        let dom = self.universe.values.choose(self.rng).unwrap().clone();
        let a = self.rng.gen_range(2..budget - 2);
        let (m, wm) = self.comp(basis, &CanonC::T(dom.clone()), a)?;
        let fun = CanonV::arrow(dom.clone(), target.clone(), self.table);
        let (v, wv) = self.value(basis, &fun, budget - 1 - a)?;
        Some((bind(m, v), WComp::Bind { parts: vec![BindPart { dom, wm, wv }], ty: target.clone() }))
    }

    fn value(&mut self, basis: &CBasis, target: &CanonV, budget: usize) -> Option<(Value, WVal)> {
        let vars: Vec<&Var> = basis.iter().filter(|(_, t)| leq_cv(t, target, self.table)).map(|(x, _)| x).collect();
        let must_var = !target.atoms().is_empty() || budget < 3;
        if !vars.is_empty() && (must_var || self.rng.gen_bool(0.3)) {
            let x = (*vars.choose(self.rng).unwrap()).clone();
            return Some((Value::Var(x), WVal::Var { ty: target.clone() }));
        }
        if target.is_top() {
            let free: Vec<Var> = basis.keys().cloned().collect();
            return Some((gen_value_over(self.rng, budget.max(3), &free), WVal::Omega));
        }
        if !target.atoms().is_empty() {
            return None;
        }
        let x = Var::new(BINDERS.choose(self.rng).unwrap());
        let arrows = target.arrows().to_vec();
        let (a0, t0) = &arrows[0];
        let mut b0 = basis.clone();
        b0.insert(x.clone(), a0.clone());
        let (body, w0) = self.comp(&b0, t0, budget.saturating_sub(1))?;
        let mut ws = vec![(a0.clone(), w0)];
        let mut inf = Inferencer::new(self.universe, self.table);
        for (a, t) in &arrows[1..] {
            let mut b = basis.clone();
            b.insert(x.clone(), a.clone());
            ws.push((a.clone(), inf.derive_c(&b, &body, t)?));
        }
        Some((Value::Lam(x, Box::new(body)), WVal::Lam { arrows: ws, ty: target.clone() }))
    }
}

/// The type universe used for typed generation and bounded checks.
pub fn universe_of(cfg: &GenConfig) -> TypeUniverse {
    enumerate_types(cfg.rank.max(1), cfg.width, &cfg.table)
}

/// A closed computation with a derivation of a non-trivial type, built by
/// choosing the type first and growing the term to fit it.
pub fn gen_typed_term(cfg: &GenConfig) -> Result<(Comp, Derivation)> {
    let universe = universe_of(cfg);
    gen_typed_term_with(&mut case_rng(cfg.seed, 0), cfg, &universe)
}

pub fn gen_typed_term_with<R: Rng>(rng: &mut R, cfg: &GenConfig, universe: &TypeUniverse) -> Result<(Comp, Derivation)> {
    let targets: Vec<&CanonC> = universe.comps.iter().filter(|t| !t.is_top()).collect();
    let mut g = TypedGen { rng, universe, table: &cfg.table };
    for _ in 0..32 {
        let target = (*targets.choose(g.rng).unwrap()).clone();
        if let Some((m, w)) = g.comp(&CBasis::new(), &target, cfg.max_size) {
            return Ok((m.clone(), assemble_c(&Basis::new(), &m, &w, &cfg.table)?));
        }
    }
    // `unit (\x. unit x) : T Wv` always fits
    let m = unit(identity());
    let w = WComp::Unit { w: Box::new(WVal::Omega), ty: CanonC::T(CanonV::top()) };
    Ok((m.clone(), assemble_c(&Basis::new(), &m, &w, &cfg.table)?))
}

/// A random value type over the table's atoms.
pub fn gen_vtype<R: Rng>(rng: &mut R, depth: usize, table: &AtomTable) -> VType {
    let atoms: Vec<String> = table.atoms().map(|a| a.to_string()).collect();
    let leaf = |rng: &mut R| {
        if !atoms.is_empty() && rng.gen_bool(0.6) {
            atom(atoms.choose(rng).unwrap())
        } else {
            VType::Omega
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..5) {
        0 => leaf(rng),
        1 => inter_v(gen_vtype(rng, depth - 1, table), gen_vtype(rng, depth - 1, table)),
        _ => arrow(gen_vtype(rng, depth - 1, table), gen_ctype(rng, depth - 1, table)),
    }
}

pub fn gen_ctype<R: Rng>(rng: &mut R, depth: usize, table: &AtomTable) -> CType {
    match rng.gen_range(0..6) {
        0 => CType::Omega,
        1 if depth > 0 => crate::types::inter_c(gen_ctype(rng, depth - 1, table), gen_ctype(rng, depth - 1, table)),
        _ => t_of(gen_vtype(rng, depth.saturating_sub(1), table)),
    }
}

// ---------------------------------------------------------------------------
// Shrinking

/// Strictly smaller variants of `m`: subterms and simplifications.
pub fn shrink_candidates(m: &Comp) -> Vec<Comp> {
    let mut out = Vec::new();
    match m {
        Comp::Unit(v) => {
            for w in shrink_value(v) {
                out.push(unit(w));
            }
        }
        Comp::Bind(l, v) => {
            out.push((**l).clone());
            if let Value::Lam(_, body) = &**v {
                out.push((**body).clone());
            }
            for l2 in shrink_candidates(l) {
                out.push(bind(l2, (**v).clone()));
            }
            for w in shrink_value(v) {
                out.push(bind((**l).clone(), w));
            }
        }
    }
    out.retain(|c| c.size() < m.size());
    out
}

fn shrink_value(v: &Value) -> Vec<Value> {
    match v {
        Value::Var(_) => Vec::new(),
        Value::Lam(x, body) => {
            let mut out = Vec::new();
            if **body != unit(var(x.as_str())) {
                out.push(identity());
            }
            out.extend(shrink_candidates(body).into_iter().map(|b| Value::Lam(x.clone(), Box::new(b))));
            out
        }
    }
}

/// Greedy shrinking: takes the first smaller candidate that still fails,
/// until none does. Closed inputs stay closed.
pub fn minimize(m: &Comp, fails: impl Fn(&Comp) -> bool) -> Comp {
    let closed = m.is_closed();
    let mut cur = m.clone();
    'outer: loop {
        for c in shrink_candidates(&cur) {
            if (!closed || c.is_closed()) && fails(&c) {
                cur = c;
                continue 'outer;
            }
        }
        return cur;
    }
}

fn shrink_mterm(e: &MTerm) -> Vec<MTerm> {
    let mut out = Vec::new();
    match e {
        MTerm::Var(_) => {}
        MTerm::Lam(x, b) => {
            out.push((**b).clone());
            out.extend(shrink_mterm(b).into_iter().map(|b| MTerm::Lam(x.clone(), Box::new(b))));
        }
        MTerm::App(a, b) => {
            out.push((**a).clone());
            out.push((**b).clone());
            out.extend(shrink_mterm(a).into_iter().map(|a| MTerm::App(Box::new(a), b.clone())));
            out.extend(shrink_mterm(b).into_iter().map(|b| MTerm::App(a.clone(), Box::new(b))));
        }
        MTerm::Let(x, a, b) => {
            out.push((**a).clone());
            out.push((**b).clone());
            out.extend(shrink_mterm(a).into_iter().map(|a| MTerm::Let(x.clone(), Box::new(a), b.clone())));
            out.extend(shrink_mterm(b).into_iter().map(|b| MTerm::Let(x.clone(), a.clone(), Box::new(b))));
        }
    }
    out
}

pub fn minimize_mterm(e: &MTerm, fails: impl Fn(&MTerm) -> bool) -> MTerm {
    let mut cur = e.clone();
    'outer: loop {
        for c in shrink_mterm(&cur) {
            if fails(&c) {
                cur = c;
                continue 'outer;
            }
        }
        return cur;
    }
}

// ---------------------------------------------------------------------------
// Suites

#[derive(Clone, Debug)]
pub enum CaseResult {
    Pass { checks: usize },
    Fail { term: String, minimized: String, detail: String },
    Inconclusive { checks: usize },
}

/// Shared, precomputed state for a suite.
struct Ctx {
    universe: Option<TypeUniverse>,
    domain: Option<RankDomain>,
}

fn context(name: &str, cfg: &GenConfig) -> Result<Ctx> {
    let universe = matches!(name, "subject-reduction" | "subject-expansion" | "characterization")
        .then(|| universe_of(cfg));
    let domain = match name {
        "filter-soundness" | "substitution-interp" => Some(build_domain(cfg.rank.max(1), &cfg.table)?),
        _ => None,
    };
    Ok(Ctx { universe, domain })
}

pub fn run_suite(name: &str, cfg: &GenConfig) -> Result<PropertyReport> {
    if !SUITES.contains(&name) {
        return Err(Error::UnknownSuite(name.to_string()));
    }
    let ctx = context(name, cfg)?;
    let results: Vec<CaseResult> =
        (0..cfg.cases).into_par_iter().map(|i| run_case_in(name, cfg, &ctx, i)).collect::<Result<_>>()?;
    let mut report = PropertyReport {
        suite: name.to_string(),
        seed: cfg.seed,
        cases: cfg.cases,
        passes: 0,
        failures: Vec::new(),
        inconclusives: 0,
        checks: 0,
    };
    for (case, r) in results.into_iter().enumerate() {
        match r {
            CaseResult::Pass { checks } => {
                report.passes += 1;
                report.checks += checks;
            }
            CaseResult::Inconclusive { checks } => {
                report.inconclusives += 1;
                report.checks += checks;
            }
            CaseResult::Fail { term, minimized, detail } => {
                report.checks += 1;
                report.failures.push(Failure { case, seed: cfg.seed, term, minimized, detail });
            }
        }
    }
    Ok(report)
}

/// Re-runs one case of a suite.
pub fn replay_case(name: &str, cfg: &GenConfig, case: usize) -> Result<CaseResult> {
    if !SUITES.contains(&name) {
        return Err(Error::UnknownSuite(name.to_string()));
    }
    run_case_in(name, cfg, &context(name, cfg)?, case)
}

fn run_case_in(name: &str, cfg: &GenConfig, ctx: &Ctx, case: usize) -> Result<CaseResult> {
    let mut rng = case_rng(cfg.seed, case);
    let rng = &mut rng;
    match name {
        "confluence" => Ok(comp_case(gen_term_with(rng, cfg), |m| confluence_check(m, cfg))),
        "triangle" => Ok(comp_case(gen_term_with(rng, cfg), triangle_check)),
        "ass-sn" => Ok(comp_case(gen_term_with(rng, cfg), ass_sn_check)),
        "critical-pairs" => critical_pairs_case(rng, case),
        "subject-reduction" => {
            let (m, d) = gen_typed_term_with(rng, cfg, ctx.universe.as_ref().unwrap())?;
            Ok(comp_case(m, |m| subject_reduction_check(m, &d, cfg)))
        }
        "subject-expansion" => {
            let (m, d) = gen_typed_term_with(rng, cfg, ctx.universe.as_ref().unwrap())?;
            Ok(comp_case(m, |m| subject_expansion_check(m, &d, cfg)))
        }
        "convergence" => Ok(comp_case(gen_term_with(rng, cfg), |m| convergence_check(m, cfg))),
        "characterization" => {
            let u = ctx.universe.as_ref().unwrap();
            Ok(comp_case(gen_term_with(rng, cfg), |m| characterization_check(m, cfg, u)))
        }
        "subtyping" => Ok(subtyping_case(rng, cfg)),
        "filter-soundness" => {
            let dom = ctx.domain.as_ref().unwrap();
            let m = gen_term_with(rng, cfg);
            let (a, b) = two_reducts(rng, &m, cfg.rules, 6);
            Ok(soundness_case(dom, &m, &a, &b))
        }
        "substitution-interp" => {
            let dom = ctx.domain.as_ref().unwrap();
            let x = Var::new("x");
            let m = gen_comp_over(rng, cfg.max_size.min(12), std::slice::from_ref(&x));
            let v = gen_value_over(rng, 6, &[]);
            Ok(comp_case(m, |m| substitution_interp_check(dom, m, &x, &v)))
        }
        "moggi-preservation" => {
            let free = [Var::new("f"), Var::new("g")];
            let lo = 8.min(cfg.max_size);
            let size = rng.gen_range(lo..=cfg.max_size.max(lo));
            let e = gen_mterm(rng, size, &free);
            Ok(moggi_case(e, |e| moggi_preservation_check(e, cfg.fuel.min(6))))
        }
        "moggi-convertibility" => Ok(comp_case(gen_term_with(rng, cfg), moggi_convertibility_check)),
        "moggi-substitution" => {
            let free = [Var::new("x"), Var::new("f")];
            let e = gen_mterm(rng, cfg.max_size.min(10), &free);
            let v = gen_mterm(rng, 4, &[Var::new("f"), Var::new("y")]);
            let v = if v.is_value() { v } else { MTerm::Var(Var::new("y")) };
            let x = Var::new("x");
            let m = crate::moggi::from_moggi(&e);
            let w = crate::moggi::from_moggi_v(&v).unwrap();
            let ok1 = from_moggi_subst_holds(&e, &x, &v)?;
            let ok2 = to_moggi_subst_holds(&m, &x, &w);
            Ok(if ok1 && ok2 {
                CaseResult::Pass { checks: 2 }
            } else {
                CaseResult::Fail {
                    term: format!("{e} with x := {v}"),
                    minimized: e.to_string(),
                    detail: format!("from-side {ok1}, to-side {ok2}"),
                }
            })
        }
        _ => Err(Error::UnknownSuite(name.to_string())),
    }
}

/// Outcome of a single check on a term.
pub enum Check {
    Pass(usize),
    Fail(String),
    Inconclusive(usize),
}

fn comp_case(m: Comp, check: impl Fn(&Comp) -> Check) -> CaseResult {
    match check(&m) {
        Check::Pass(n) => CaseResult::Pass { checks: n },
        Check::Inconclusive(n) => CaseResult::Inconclusive { checks: n },
        Check::Fail(detail) => {
            let small = minimize(&m, |c| matches!(check(c), Check::Fail(_)));
            CaseResult::Fail { term: m.to_string(), minimized: small.to_string(), detail }
        }
    }
}

fn moggi_case(e: MTerm, check: impl Fn(&MTerm) -> Check) -> CaseResult {
    match check(&e) {
        Check::Pass(n) => CaseResult::Pass { checks: n },
        Check::Inconclusive(n) => CaseResult::Inconclusive { checks: n },
        Check::Fail(detail) => {
            let small = minimize_mterm(&e, |c| matches!(check(c), Check::Fail(_)));
            CaseResult::Fail { term: e.to_string(), minimized: small.to_string(), detail }
        }
    }
}

/// The set of reducts of `m`, or `None` if it has more than `cap` members.
fn reach_set(m: &Comp, rules: Rules, cap: usize) -> Option<HashSet<NlComp>> {
    let mut seen = HashSet::from([m.nameless()]);
    let mut todo = vec![m.clone()];
    while let Some(t) = todo.pop() {
        for s in enumerate_steps(&t, rules) {
            if seen.insert(s.result.nameless()) {
                if seen.len() > cap {
                    return None;
                }
                todo.push(s.result);
            }
        }
    }
    Some(seen)
}

/// Every pair of one-step reducts has a common reduct.
pub fn confluence_check(m: &Comp, cfg: &GenConfig) -> Check {
    let steps = enumerate_steps(m, cfg.rules);
    let mut checks = 0;
    let mut inconclusive = false;
    for i in 0..steps.len() {
        for j in i + 1..steps.len() {
            checks += 1;
            let (a, b) = (&steps[i].result, &steps[j].result);
            if joinable_with(a, b, cfg.fuel, cfg.rules).is_some() {
                continue;
            }
            match (reach_set(a, cfg.rules, 5000), reach_set(b, cfg.rules, 5000)) {
                (Some(ra), Some(rb)) if ra.is_disjoint(&rb) => {
                    return Check::Fail(format!(
                        "{}@{} and {}@{} have no common reduct",
                        steps[i].rule, steps[i].position, steps[j].rule, steps[j].position
                    ))
                }
                _ => inconclusive = true,
            }
        }
    }
    if inconclusive {
        Check::Inconclusive(checks)
    } else {
        Check::Pass(checks)
    }
}

pub const TRIANGLE_CAP: usize = 20_000;

/// Every parallel successor `Q` of `P` has `Q ⇛ P*`.
pub fn triangle_check(p: &Comp) -> Check {
    let target = star(p);
    let Some(succ) = par_successors(p, TRIANGLE_CAP) else { return Check::Inconclusive(0) };
    for q in &succ {
        if !parallel_reduces(q, &target) {
            return Check::Fail(format!("{q} does not reach {target} in one parallel step"));
        }
    }
    Check::Pass(succ.len())
}

/// The measure drops on every ass step out of `m` and along its
/// ass-normalization, which takes at most as many steps as the measure.
pub fn ass_sn_check(m: &Comp) -> Check {
    let k = ass_measure(m);
    let steps: Vec<_> = enumerate_steps(m, Rules::ASS);
    for s in &steps {
        let k2 = ass_measure(&s.result);
        if k2 >= k {
            return Check::Fail(format!("ass@{} goes from {k} to {k2}", s.position));
        }
    }
    let run = normalize(m, Rules::ASS, k);
    let mut prev = k;
    for s in &run.trace {
        let next = ass_measure(&s.result);
        if next >= prev {
            return Check::Fail(format!("ass@{} goes from {prev} to {next}", s.position));
        }
        prev = next;
    }
    match run.outcome {
        Outcome::NormalForm(_) => Check::Pass(steps.len() + run.trace.len()),
        Outcome::FuelExhausted(t) => Check::Fail(format!("not ass-normal after {k} steps: {t}")),
    }
}

pub fn subject_reduction_check(m: &Comp, d: &Derivation, cfg: &GenConfig) -> Check {
    if d.concl.subject != crate::term::Term::Comp(m.clone()) {
        // a shrunk term no longer matches its derivation
        return Check::Pass(0);
    }
    let steps = enumerate_steps(m, Rules::LAMBDA_C);
    for s in &steps {
        let red = match reduce_derivation(m, s, d, &cfg.table) {
            Ok(r) => r,
            Err(e) => return Check::Fail(format!("{}@{}: {e}", s.rule, s.position)),
        };
        let report = check_derivation(&red, &cfg.table);
        if !report.is_valid() {
            return Check::Fail(format!("{}@{}: {}", s.rule, s.position, report.errors[0]));
        }
        let same_subject = red.concl.subject.alpha_eq(&crate::term::Term::Comp(s.result.clone()));
        if !same_subject || red.concl.ty != d.concl.ty {
            return Check::Fail(format!("{}@{}: wrong conclusion {}", s.rule, s.position, red.concl));
        }
    }
    Check::Pass(steps.len())
}

/// Expansion along every step, and the route to `⊢ M : T Wv` for
/// convergent terms.
pub fn subject_expansion_check(m: &Comp, d: &Derivation, cfg: &GenConfig) -> Check {
    if d.concl.subject != crate::term::Term::Comp(m.clone()) {
        return Check::Pass(0);
    }
    let steps = enumerate_steps(m, Rules::LAMBDA_C);
    for s in &steps {
        let res = reduce_derivation(m, s, d, &cfg.table).and_then(|r| expand_derivation(m, s, &r, &cfg.table));
        let e = match res {
            Ok(e) => e,
            Err(e) => return Check::Fail(format!("{}@{}: {e}", s.rule, s.position)),
        };
        let report = check_derivation(&e, &cfg.table);
        if !report.is_valid() {
            return Check::Fail(format!("{}@{}: {}", s.rule, s.position, report.errors[0]));
        }
        if !e.concl.subject.alpha_eq(&d.concl.subject) || e.concl.ty != d.concl.ty {
            return Check::Fail(format!("{}@{}: wrong conclusion {}", s.rule, s.position, e.concl));
        }
    }
    match expansion_route(m, cfg.fuel, &cfg.table) {
        Ok(Some(r)) if check_derivation(&r, &cfg.table).is_valid() => Check::Pass(steps.len() + 1),
        Ok(Some(_)) => Check::Fail("route derivation is invalid".into()),
        Ok(None) => Check::Inconclusive(steps.len()),
        Err(e) => Check::Fail(format!("route: {e}")),
    }
}

pub fn convergence_check(m: &Comp, cfg: &GenConfig) -> Check {
    let big = big_step(m, cfg.fuel);
    let small = small_step_converge(m, cfg.fuel);
    let exhausted = |o: &EvalOutcome| matches!(o, EvalOutcome::FuelExhausted { .. });
    if big.agrees_with(&small) {
        if exhausted(&big) || exhausted(&small) {
            // both ran out, or one ran out and the other diverged
            Check::Inconclusive(1)
        } else {
            Check::Pass(1)
        }
    } else if exhausted(&big) || exhausted(&small) {
        Check::Inconclusive(1)
    } else {
        Check::Fail(format!("big-step {big}, small-step {small}"))
    }
}

/// Convergence agrees with having a non-trivial type within the universe.
pub fn characterization_check(m: &Comp, cfg: &GenConfig, universe: &TypeUniverse) -> Check {
    let conv = small_step_converge(m, cfg.fuel);
    let typed = match crate::typing::typable_nontrivial(m, universe, &cfg.table) {
        Ok(t) => t,
        Err(e) => return Check::Fail(e.to_string()),
    };
    match (&conv, typed) {
        (EvalOutcome::Converges(_), _) => match expansion_route(m, cfg.fuel, &cfg.table) {
            Ok(Some(d)) if check_derivation(&d, &cfg.table).is_valid() => Check::Pass(1),
            other => Check::Fail(format!("convergent but no type derivation: {other:?}")),
        },
        (EvalOutcome::Diverges { .. }, Some((t, _))) => Check::Fail(format!("divergent but typed {t}")),
        (_, Some(_)) => Check::Inconclusive(1),
        (_, None) => Check::Pass(1),
    }
}

fn subtyping_case<R: Rng>(rng: &mut R, cfg: &GenConfig) -> CaseResult {
    let depth = cfg.rank.max(1) + 1;
    let a = gen_vtype(rng, depth, &cfg.table);
    let b = if rng.gen_bool(0.3) { inter_v(a.clone(), gen_vtype(rng, depth, &cfg.table)) } else { gen_vtype(rng, depth, &cfg.table) };
    let mut checks = 0;
    for (l, r) in [(&a, &b), (&b, &a)] {
        let Ok(fast) = leq_v(l, r, &cfg.table) else { continue };
        match brute_subtype_oracle(l, r, completeness_bound_v(l, r), &cfg.table) {
            Some(slow) if slow == fast => checks += 1,
            Some(slow) => {
                return CaseResult::Fail {
                    term: format!("{l} <= {r}"),
                    minimized: format!("{} <= {}", canon_v(l, &cfg.table), canon_v(r, &cfg.table)),
                    detail: format!("decider {fast}, oracle {slow}"),
                }
            }
            None => return CaseResult::Inconclusive { checks },
        }
    }
    CaseResult::Pass { checks }
}

/// Two reducts of `m` along independent random paths of up to `len` steps.
pub fn two_reducts<R: Rng>(rng: &mut R, m: &Comp, rules: Rules, len: usize) -> (Comp, Comp) {
    let walk = |rng: &mut R| {
        let mut cur = m.clone();
        for _ in 0..rng.gen_range(1..=len) {
            let steps = enumerate_steps(&cur, rules);
            match steps.choose(rng) {
                Some(s) => cur = s.result.clone(),
                None => break,
            }
        }
        cur
    };
    let a = walk(rng);
    let b = walk(rng);
    (a, b)
}

fn soundness_case(dom: &RankDomain, m: &Comp, a: &Comp, b: &Comp) -> CaseResult {
    match soundness_check(dom, a, b) {
        Check::Pass(n) => CaseResult::Pass { checks: n },
        Check::Inconclusive(n) => CaseResult::Inconclusive { checks: n },
        Check::Fail(detail) => {
            // shrink the source, reducing both sides again deterministically
            let fails = |c: &Comp| {
                let s = enumerate_steps(c, Rules::LAMBDA_C);
                s.iter().any(|x| s.iter().any(|y| matches!(soundness_check(dom, &x.result, &y.result), Check::Fail(_))))
            };
            let small = if fails(m) { minimize(m, fails) } else { m.clone() };
            CaseResult::Fail { term: format!("{a}  vs  {b}  (from {m})"), minimized: small.to_string(), detail }
        }
    }
}

/// Convertible closed terms have the same meaning at every rank `1..=n`.
pub fn soundness_check(dom: &RankDomain, a: &Comp, b: &Comp) -> Check {
    for k in 1..=dom.n {
        match (interp_closed(dom, a, k), interp_closed(dom, b, k)) {
            (Ok(x), Ok(y)) if x == y => {}
            (Ok(x), Ok(y)) => return Check::Fail(format!("rank {k}: {x} vs {y}")),
            (Err(e), _) | (_, Err(e)) => return Check::Fail(e.to_string()),
        }
    }
    Check::Pass(dom.n)
}

/// `[[M[V/x]]] = [[M]][x := [[V]]]` at every rank, `V` closed.
pub fn substitution_interp_check(dom: &RankDomain, m: &Comp, x: &Var, v: &Value) -> Check {
    if !m.free_vars().iter().all(|y| y == x) {
        return Check::Pass(0);
    }
    for k in 0..=dom.n {
        let direct = interp_closed(dom, &m.subst(x, v), k);
        let env_v = interp_value_at(dom, v, &EnvN::new(), k).and_then(|d| {
            let env = EnvN::from([(x.clone(), d)]);
            interp_comp_at(dom, m, &env, k)
        });
        match (direct, env_v) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(a), Ok(b)) => return Check::Fail(format!("rank {k}: {a} vs {b}")),
            (Err(e), _) | (_, Err(e)) => return Check::Fail(e.to_string()),
        }
    }
    Check::Pass(dom.n + 1)
}

pub fn moggi_preservation_check(e: &MTerm, fuel: usize) -> Check {
    let report = check_preservation(e, fuel);
    let n = report.cases.len();
    if let Some(c) = report.failures().next() {
        return Check::Fail(format!(
            "{} step to {}: {} does not reach {}",
            c.step.rule, c.step.result, c.source_image, c.target_image
        ));
    }
    if report.all_reached() {
        Check::Pass(n)
    } else {
        Check::Inconclusive(n)
    }
}

pub const MOGGI_WITNESS_DEPTH: usize = 2;

/// Each step `M → N` has convertible images in the let-calculus.
pub fn moggi_convertibility_check(m: &Comp) -> Check {
    let steps = enumerate_steps(m, Rules::LAMBDA_C);
    for s in &steps {
        match check_to_moggi_step(m, s, MOGGI_WITNESS_DEPTH) {
            Convertible::Joined(_) => {}
            Convertible::NotJoinable | Convertible::Inconclusive => {
                return Check::Fail(format!("{}@{}: no common reduct within {MOGGI_WITNESS_DEPTH} steps", s.rule, s.position))
            }
        }
    }
    Check::Pass(steps.len())
}

// ---------------------------------------------------------------------------
// Critical pairs

/// One instance of each critical-pair diagram and of the ass/ass pair,
/// checked term for term.
pub struct CriticalPairs {
    pub a: Result<()>,
    pub b: Result<()>,
    pub c: Result<()>,
    pub ass_ass: Result<()>,
}

fn bad(msg: String) -> Error {
    Error::InvalidDerivation(msg)
}

fn step_to(m: &Comp, rule: Rule, pos: &str) -> Result<Comp> {
    enumerate_steps(m, Rules::LAMBDA_C)
        .into_iter()
        .find(|s| s.rule == rule && s.position.to_string() == pos)
        .map(|s| s.result)
        .ok_or_else(|| bad(format!("no {rule} step at {pos} in {m}")))
}

fn expect_eq(got: &Comp, want: &Comp, what: &str) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(bad(format!("{what}: got {got}, expected {want}")))
    }
}

/// Checks the diagrams for the given instantiation of the metavariables.
/// `m` may mention `x`, `n` may mention `y` but not `x`.
pub fn critical_pairs(v: &Value, m: &Comp, n: &Comp, l: &Comp, p: &Comp) -> CriticalPairs {
    let (x, y, z) = (Var::new("x"), Var::new("y"), Var::new("z"));
    let lx = |b: &Comp| Value::Lam(x.clone(), Box::new(b.clone()));
    let ly = |b: &Comp| Value::Lam(y.clone(), Box::new(b.clone()));
    let lz = |b: &Comp| Value::Lam(z.clone(), Box::new(b.clone()));
    let id_x = lam("x", unit(var("x")));

    let a = (|| {
        let src = bind(bind(unit(v.clone()), lx(m)), ly(n));
        let top = step_to(&src, Rule::Ass, "root")?;
        expect_eq(&top, &bind(unit(v.clone()), lx(&bind(m.clone(), ly(n)))), "ass")?;
        let left = step_to(&src, Rule::BetaC, "l")?;
        expect_eq(&left, &bind(m.subst(&x, v), ly(n)), "betac")?;
        let right = step_to(&top, Rule::BetaC, "root")?;
        expect_eq(&right, &bind(m.clone(), ly(n)).subst(&x, v), "closing betac")?;
        expect_eq(&left, &right, "join")
    })();

    let b = (|| {
        let src = bind(bind(m.clone(), ly(n)), id_x.clone());
        let top = step_to(&src, Rule::Ass, "root")?;
        expect_eq(&top, &bind(m.clone(), ly(&bind(n.clone(), id_x.clone()))), "ass")?;
        let left = step_to(&src, Rule::Id, "root")?;
        expect_eq(&left, &bind(m.clone(), ly(n)), "id")?;
        let right = step_to(&top, Rule::Id, "r.b")?;
        expect_eq(&right, &left, "closing id")
    })();

    let c = (|| {
        let src = bind(bind(m.clone(), id_x.clone()), ly(n));
        let top = step_to(&src, Rule::Ass, "root")?;
        expect_eq(&top, &bind(m.clone(), lx(&bind(unit(var("x")), ly(n)))), "ass")?;
        let left = step_to(&src, Rule::Id, "l")?;
        expect_eq(&left, &bind(m.clone(), ly(n)), "id")?;
        let right = step_to(&top, Rule::BetaC, "r.b")?;
        expect_eq(&right, &bind(m.clone(), lx(&n.subst(&y, &var("x")))), "closing betac")?;
        if right.alpha_eq(&left) {
            Ok(())
        } else {
            Err(bad(format!("{right} and {left} are not alpha-equivalent")))
        }
    })();

    let ass_ass = (|| {
        let m1 = bind(bind(bind(l.clone(), lx(m)), ly(n)), lz(p));
        let m2 = bind(bind(l.clone(), lx(m)), ly(&bind(n.clone(), lz(p))));
        let m3 = bind(bind(l.clone(), lx(&bind(m.clone(), ly(n)))), lz(p));
        let m4 = bind(l.clone(), lx(&bind(m.clone(), ly(&bind(n.clone(), lz(p))))));
        expect_eq(&step_to(&m1, Rule::Ass, "root")?, &m2, "M1 to M2")?;
        expect_eq(&step_to(&m1, Rule::Ass, "l")?, &m3, "M1 to M3")?;
        expect_eq(&step_to(&m2, Rule::Ass, "root")?, &m4, "M2 to M4")?;
        let mid = bind(l.clone(), lx(&bind(bind(m.clone(), ly(n)), lz(p))));
        expect_eq(&step_to(&m3, Rule::Ass, "root")?, &mid, "M3 first step")?;
        expect_eq(&step_to(&mid, Rule::Ass, "r.b")?, &m4, "M3 second step")?;
        if enumerate_steps(&m3, Rules::ASS).iter().any(|s| s.result == m4) {
            return Err(bad("M3 reaches M4 in one step".into()));
        }
        Ok(())
    })();

    CriticalPairs { a, b, c, ass_ass }
}

/// The metavariables as plain variables: `V = v`, `M = unit m`, and so on.
pub fn critical_pairs_canonical() -> CriticalPairs {
    critical_pairs(&var("v"), &unit(var("m")), &unit(var("n")), &unit(var("l")), &unit(var("p")))
}

fn critical_pairs_case<R: Rng>(rng: &mut R, case: usize) -> Result<CaseResult> {
    let cp = if case == 0 {
        critical_pairs_canonical()
    } else {
        let fs = [Var::new("f"), Var::new("g")];
        let with = |extra: &str| {
            let mut v = fs.to_vec();
            v.push(Var::new(extra));
            v
        };
        let v = gen_value_over(rng, 4, &fs);
        let m = gen_comp_over(rng, 6, &with("x"));
        let n = gen_comp_over(rng, 6, &with("y"));
        let l = gen_comp_over(rng, 5, &fs);
        let p = gen_comp_over(rng, 5, &with("z"));
        critical_pairs(&v, &m, &n, &l, &p)
    };
    let errs: Vec<String> = [("a", cp.a), ("b", cp.b), ("c", cp.c), ("ass/ass", cp.ass_ass)]
        .into_iter()
        .filter_map(|(k, r)| r.err().map(|e| format!("{k}: {e}")))
        .collect();
    Ok(if errs.is_empty() {
        CaseResult::Pass { checks: 4 }
    } else {
        CaseResult::Fail { term: format!("case {case}"), minimized: String::new(), detail: errs.join("; ") }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> GenConfig {
        GenConfig { cases: 20, ..GenConfig::default() }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(gen_term(&cfg()), gen_term(&cfg()));
        let other = GenConfig { seed: 1, ..cfg() };
        let ts: Vec<Comp> = (0..5).map(|i| gen_term_with(&mut case_rng(other.seed, i), &other)).collect();
        assert!(ts.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn small_closed_terms() {
        let c = GenConfig { max_size: 1, ..cfg() };
        for i in 0..10 {
            let m = gen_term_with(&mut case_rng(i, 0), &c);
            assert!(m.is_closed());
            assert!(m.alpha_eq(&unit(identity())), "{m}");
        }
    }

    #[test]
    fn sizes_and_closedness() {
        let c = cfg();
        let mut open = false;
        for i in 0..200 {
            let m = gen_term_with(&mut case_rng(7, i), &c);
            assert!(m.size() <= c.max_size && m.is_closed(), "{m}");
            let o = gen_term_with(&mut case_rng(7, i), &GenConfig { closed: false, ..c.clone() });
            open |= !o.is_closed();
        }
        assert!(open);
    }

    #[test]
    fn typed_terms_validate() {
        let c = GenConfig { max_size: 12, ..cfg() };
        let u = universe_of(&c);
        for i in 0..30 {
            let (m, d) = gen_typed_term_with(&mut case_rng(3, i), &c, &u).unwrap();
            assert!(check_derivation(&d, &c.table).is_valid(), "{m}");
            assert_eq!(d.concl.subject, crate::term::Term::Comp(m));
        }
    }

    #[test]
    fn enumerated_comps() {
        let all = enumerate_comps(4, &[Var::new("f")]);
        // unit f; unit \y0. unit f; unit \y0. unit y0; unit f * f
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|m| m.size() <= 4));
    }

    #[test]
    fn shrinking_keeps_failure() {
        let m = crate::parse::parse_comp("unit (\\x. unit x) * (\\y. unit y * \\z. unit z) * \\w. unit w").unwrap();
        let small = minimize(&m, |c| c.binds() >= 1);
        assert_eq!(small.binds(), 1);
        assert!(small.size() < m.size());
    }

    #[test]
    fn canonical_critical_pairs() {
        let cp = critical_pairs_canonical();
        cp.a.unwrap();
        cp.b.unwrap();
        cp.c.unwrap();
        cp.ass_ass.unwrap();
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nope", &cfg()), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn suites_run() {
        for s in ["confluence", "triangle", "ass-sn", "critical-pairs", "convergence", "subtyping"] {
            let r = run_suite(s, &cfg()).unwrap();
            assert!(r.ok(), "{}: {:?}", r.summary(), r.failures);
            assert_eq!(r.passes + r.inconclusives, r.cases);
        }
    }
}
