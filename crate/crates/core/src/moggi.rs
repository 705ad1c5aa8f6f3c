//! The let-calculus with values `x | \x. e` and non-values `let` and
//! application, its reduction, and the translations to and from the
//! unit/bind calculus.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::lexer::{Cursor, Tok};
use crate::reduction::{reaches, Rules, Step};
use crate::term::{fresh_var, Comp, Term, Value, Var, VarSet};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum MTerm {
    Var(Var),
    Lam(Var, Box<MTerm>),
    App(Box<MTerm>, Box<MTerm>),
    Let(Var, Box<MTerm>, Box<MTerm>),
}

/// De Bruijn form for α-comparison.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum NlMTerm {
    Bound(usize),
    Free(Var),
    Lam(Box<NlMTerm>),
    App(Box<NlMTerm>, Box<NlMTerm>),
    Let(Box<NlMTerm>, Box<NlMTerm>),
}

pub fn mvar(x: &str) -> MTerm {
    MTerm::Var(Var::new(x))
}

pub fn mlam(x: &str, e: MTerm) -> MTerm {
    MTerm::Lam(Var::new(x), Box::new(e))
}

pub fn mapp(a: MTerm, b: MTerm) -> MTerm {
    MTerm::App(Box::new(a), Box::new(b))
}

pub fn mlet(x: &str, e: MTerm, body: MTerm) -> MTerm {
    MTerm::Let(Var::new(x), Box::new(e), Box::new(body))
}

impl MTerm {
    pub fn is_value(&self) -> bool {
        matches!(self, MTerm::Var(_) | MTerm::Lam(..))
    }

    pub fn size(&self) -> usize {
        match self {
            MTerm::Var(_) => 1,
            MTerm::Lam(_, e) => 1 + e.size(),
            MTerm::App(a, b) | MTerm::Let(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn free_vars(&self) -> VarSet {
        match self {
            MTerm::Var(x) => VarSet::from([x.clone()]),
            MTerm::Lam(x, e) => {
                let mut s = e.free_vars();
                s.remove(x);
                s
            }
            MTerm::App(a, b) => {
                let mut s = a.free_vars();
                s.extend(b.free_vars());
                s
            }
            MTerm::Let(x, a, b) => {
                let mut s = b.free_vars();
                s.remove(x);
                s.extend(a.free_vars());
                s
            }
        }
    }

    pub fn all_vars(&self, out: &mut VarSet) {
        match self {
            MTerm::Var(x) => {
                out.insert(x.clone());
            }
            MTerm::Lam(x, e) => {
                out.insert(x.clone());
                e.all_vars(out);
            }
            MTerm::App(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            MTerm::Let(x, a, b) => {
                out.insert(x.clone());
                a.all_vars(out);
                b.all_vars(out);
            }
        }
    }

    fn names(&self) -> VarSet {
        let mut s = VarSet::new();
        self.all_vars(&mut s);
        s
    }

    /// Capture-avoiding `self[v/x]`.
    pub fn subst(&self, x: &Var, v: &MTerm) -> MTerm {
        match self {
            MTerm::Var(y) if y == x => v.clone(),
            MTerm::Var(_) => self.clone(),
            MTerm::App(a, b) => MTerm::App(Box::new(a.subst(x, v)), Box::new(b.subst(x, v))),
            MTerm::Lam(y, e) => {
                let (y, e) = under_binder(y, e, x, v);
                MTerm::Lam(y, Box::new(e))
            }
            MTerm::Let(y, a, b) => {
                let a = a.subst(x, v);
                let (y, b) = under_binder(y, b, x, v);
                MTerm::Let(y, Box::new(a), Box::new(b))
            }
        }
    }

    pub fn nameless(&self) -> NlMTerm {
        self.to_nl(&mut Vec::new())
    }

    fn to_nl(&self, env: &mut Vec<Var>) -> NlMTerm {
        match self {
            MTerm::Var(x) => match env.iter().rev().position(|y| y == x) {
                Some(i) => NlMTerm::Bound(i),
                None => NlMTerm::Free(x.clone()),
            },
            MTerm::Lam(x, e) => {
                env.push(x.clone());
                let b = e.to_nl(env);
                env.pop();
                NlMTerm::Lam(Box::new(b))
            }
            MTerm::App(a, b) => NlMTerm::App(Box::new(a.to_nl(env)), Box::new(b.to_nl(env))),
            MTerm::Let(x, a, b) => {
                let a = a.to_nl(env);
                env.push(x.clone());
                let b = b.to_nl(env);
                env.pop();
                NlMTerm::Let(Box::new(a), Box::new(b))
            }
        }
    }

    pub fn alpha_eq(&self, other: &MTerm) -> bool {
        self.nameless() == other.nameless()
    }
}

/// The body `e` of a binder `y`, with `x := v` pushed inside.
fn under_binder(y: &Var, e: &MTerm, x: &Var, v: &MTerm) -> (Var, MTerm) {
    if y == x || !e.free_vars().contains(x) {
        return (y.clone(), e.clone());
    }
    let fv = v.free_vars();
    if fv.contains(y) {
        let mut avoid = fv;
        avoid.extend(e.free_vars());
        avoid.insert(x.clone());
        let z = fresh_var(&avoid);
        let e = e.subst(y, &MTerm::Var(z.clone()));
        (z, e.subst(x, v))
    } else {
        (y.clone(), e.subst(x, v))
    }
}

pub fn m_subst(e: &MTerm, x: &Var, v: &MTerm) -> MTerm {
    e.subst(x, v)
}

impl fmt::Display for MTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MTerm::Var(x) => write!(f, "{x}"),
            MTerm::Lam(x, e) => write!(f, "\\{x}. {e}"),
            MTerm::Let(x, a, b) => write!(f, "let {x} = {a} in {b}"),
            MTerm::App(a, b) => {
                match **a {
                    MTerm::Var(_) | MTerm::App(..) => write!(f, "{a}")?,
                    _ => write!(f, "({a})")?,
                }
                match **b {
                    MTerm::Var(_) => write!(f, " {b}"),
                    _ => write!(f, " ({b})"),
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

const KEYWORDS: [&str; 2] = ["let", "in"];

pub fn parse_moggi(src: &str) -> Result<MTerm> {
    let mut cur = Cursor::new(src)?;
    let e = m_expr(&mut cur)?;
    cur.finish()?;
    Ok(e)
}

fn binder(cur: &mut Cursor) -> Result<Var> {
    let (l, c) = cur.here();
    let x = cur.ident("a binder name")?;
    if KEYWORDS.contains(&x.as_str()) {
        return Err(crate::error::SyntaxError::new(l, c, format!("`{x}` is a keyword")).into());
    }
    Ok(Var::new(&x))
}

fn is_kw(cur: &Cursor, kw: &str) -> bool {
    matches!(cur.peek(), Some(Tok::Ident(s)) if s == kw)
}

fn m_expr(cur: &mut Cursor) -> Result<MTerm> {
    if cur.peek() == Some(&Tok::Backslash) {
        cur.next();
        let x = binder(cur)?;
        cur.expect(Tok::Dot, "`.` after the binder")?;
        let e = m_expr(cur)?;
        return Ok(MTerm::Lam(x, Box::new(e)));
    }
    if is_kw(cur, "let") {
        cur.next();
        let x = binder(cur)?;
        cur.expect(Tok::Eq, "`=`")?;
        let a = m_expr(cur)?;
        if !is_kw(cur, "in") {
            return Err(cur.error("expected `in`").into());
        }
        cur.next();
        let b = m_expr(cur)?;
        return Ok(MTerm::Let(x, Box::new(a), Box::new(b)));
    }
    let mut acc = m_atom(cur)?;
    loop {
        match cur.peek() {
            Some(Tok::Backslash) => {
                let arg = m_expr(cur)?;
                return Ok(MTerm::App(Box::new(acc), Box::new(arg)));
            }
            Some(Tok::Ident(s)) if s == "let" => {
                let arg = m_expr(cur)?;
                return Ok(MTerm::App(Box::new(acc), Box::new(arg)));
            }
            Some(Tok::Ident(s)) if s != "in" => {
                let arg = m_atom(cur)?;
                acc = MTerm::App(Box::new(acc), Box::new(arg));
            }
            Some(Tok::LParen) => {
                let arg = m_atom(cur)?;
                acc = MTerm::App(Box::new(acc), Box::new(arg));
            }
            _ => return Ok(acc),
        }
    }
}

fn m_atom(cur: &mut Cursor) -> Result<MTerm> {
    match cur.peek().cloned() {
        Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
            cur.next();
            Ok(MTerm::Var(Var::new(&s)))
        }
        Some(Tok::LParen) => {
            cur.next();
            let e = m_expr(cur)?;
            cur.expect(Tok::RParen, "`)`")?;
            Ok(e)
        }
        _ => Err(cur.error("expected a term").into()),
    }
}

// ---------------------------------------------------------------------------
// Reduction

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum MRule {
    BetaV,
    EtaV,
    Id,
    Comp,
    LetV,
    Let1,
    Let2,
}

impl MRule {
    pub fn name(self) -> &'static str {
        match self {
            MRule::BetaV => "beta_v",
            MRule::EtaV => "eta_v",
            MRule::Id => "id",
            MRule::Comp => "comp",
            MRule::LetV => "let_v",
            MRule::Let1 => "let.1",
            MRule::Let2 => "let.2",
        }
    }
}

impl fmt::Display for MRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MStep {
    pub rule: MRule,
    /// Child indices from the root: 0 is a lambda body, an application's
    /// function or a let's bound term; 1 is an argument or a let body.
    pub path: Vec<u8>,
    pub result: MTerm,
}

fn root_steps(e: &MTerm, out: &mut Vec<(MRule, MTerm)>) {
    match e {
        MTerm::App(f, a) => {
            if let (MTerm::Lam(x, body), true) = (&**f, a.is_value()) {
                out.push((MRule::BetaV, body.subst(x, a)));
            }
            if !f.is_value() {
                let z = fresh_var(&e.names());
                let body = MTerm::App(Box::new(MTerm::Var(z.clone())), a.clone());
                out.push((MRule::Let1, MTerm::Let(z, f.clone(), Box::new(body))));
            } else if !a.is_value() {
                let z = fresh_var(&e.names());
                let body = MTerm::App(f.clone(), Box::new(MTerm::Var(z.clone())));
                out.push((MRule::Let2, MTerm::Let(z, a.clone(), Box::new(body))));
            }
        }
        MTerm::Lam(x, body) => {
            if let MTerm::App(f, a) = &**body {
                if f.is_value() && matches!(&**a, MTerm::Var(y) if y == x) && !f.free_vars().contains(x) {
                    out.push((MRule::EtaV, (**f).clone()));
                }
            }
        }
        MTerm::Let(x, a, b) => {
            if matches!(&**b, MTerm::Var(y) if y == x) {
                out.push((MRule::Id, (**a).clone()));
            }
            if let MTerm::Let(x1, e1, e2) = &**a {
                let (x1, e2) = if b.free_vars().contains(x1) {
                    let mut avoid = e.names();
                    avoid.insert(x1.clone());
                    let z = fresh_var(&avoid);
                    (z.clone(), e2.subst(x1, &MTerm::Var(z)))
                } else {
                    (x1.clone(), (**e2).clone())
                };
                let inner = MTerm::Let(x.clone(), Box::new(e2), b.clone());
                out.push((MRule::Comp, MTerm::Let(x1, e1.clone(), Box::new(inner))));
            }
            if a.is_value() {
                out.push((MRule::LetV, b.subst(x, a)));
            }
        }
        MTerm::Var(_) => {}
    }
}

/// All one-step reducts, root first, then children left to right.
pub fn m_enumerate_steps(e: &MTerm) -> Vec<MStep> {
    let mut out = Vec::new();
    collect_steps(e, &mut Vec::new(), &mut |path, rule, result| {
        out.push(MStep { rule, path: path.to_vec(), result })
    });
    out
}

fn collect_steps(e: &MTerm, path: &mut Vec<u8>, emit: &mut dyn FnMut(&[u8], MRule, MTerm)) {
    let mut here = Vec::new();
    root_steps(e, &mut here);
    for (r, t) in here {
        emit(path, r, t);
    }
    let mut child = |i: u8, c: &MTerm, rebuild: &dyn Fn(MTerm) -> MTerm, emit: &mut dyn FnMut(&[u8], MRule, MTerm)| {
        path.push(i);
        collect_steps(c, path, &mut |p, r, t| emit(p, r, rebuild(t)));
        path.pop();
    };
    match e {
        MTerm::Var(_) => {}
        MTerm::Lam(x, b) => child(0, b, &|t| MTerm::Lam(x.clone(), Box::new(t)), emit),
        MTerm::App(f, a) => {
            child(0, f, &|t| MTerm::App(Box::new(t), a.clone()), emit);
            child(1, a, &|t| MTerm::App(f.clone(), Box::new(t)), emit);
        }
        MTerm::Let(x, a, b) => {
            child(0, a, &|t| MTerm::Let(x.clone(), Box::new(t), b.clone()), emit);
            child(1, b, &|t| MTerm::Let(x.clone(), a.clone(), Box::new(t)), emit);
        }
    }
}

/// Outcome of a bounded convertibility search.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Convertible {
    /// A common reduct.
    Joined(MTerm),
    /// Both reduct sets were exhausted without meeting.
    NotJoinable,
    Inconclusive,
}

/// Breadth-first search from both sides for a common reduct, `depth`
/// levels each, at most `budget` terms per side.
pub fn m_convertible(a: &MTerm, b: &MTerm, depth: usize, budget: usize) -> Convertible {
    if a.alpha_eq(b) {
        return Convertible::Joined(a.clone());
    }
    let mut seen = [HashMap::new(), HashMap::new()];
    let mut queues = [VecDeque::from([a.clone()]), VecDeque::from([b.clone()])];
    seen[0].insert(a.nameless(), a.clone());
    seen[1].insert(b.nameless(), b.clone());
    let mut cut = false;
    for _ in 0..depth {
        for side in 0..2 {
            let layer: Vec<MTerm> = queues[side].drain(..).collect();
            for t in layer {
                for s in m_enumerate_steps(&t) {
                    let k = s.result.nameless();
                    if seen[1 - side].contains_key(&k) {
                        return Convertible::Joined(s.result);
                    }
                    if seen[side].contains_key(&k) {
                        continue;
                    }
                    if seen[side].len() >= budget {
                        cut = true;
                        continue;
                    }
                    seen[side].insert(k, s.result.clone());
                    queues[side].push_back(s.result);
                }
            }
        }
    }
    if !cut && queues.iter().all(|q| q.is_empty()) {
        Convertible::NotJoinable
    } else {
        Convertible::Inconclusive
    }
}

// ---------------------------------------------------------------------------
// Translations

/// Translation into the let-calculus: `unit V` goes to the value, and
/// `M * V` to `let z = M in V z` for a fresh `z`.
pub fn to_moggi(t: &Term) -> MTerm {
    match t {
        Term::Value(v) => to_moggi_v(v),
        Term::Comp(m) => to_moggi_c(m),
    }
}

pub fn to_moggi_v(v: &Value) -> MTerm {
    match v {
        Value::Var(x) => MTerm::Var(x.clone()),
        Value::Lam(x, m) => MTerm::Lam(x.clone(), Box::new(to_moggi_c(m))),
    }
}

pub fn to_moggi_c(m: &Comp) -> MTerm {
    match m {
        Comp::Unit(v) => to_moggi_v(v),
        Comp::Bind(l, v) => {
            let mut names = VarSet::new();
            m.all_vars(&mut names);
            let z = fresh_var(&names);
            let body = MTerm::App(Box::new(to_moggi_v(v)), Box::new(MTerm::Var(z.clone())));
            MTerm::Let(z, Box::new(to_moggi_c(l)), Box::new(body))
        }
    }
}

/// Translation of a value of the let-calculus.
pub fn from_moggi_v(e: &MTerm) -> Option<Value> {
    match e {
        MTerm::Var(x) => Some(Value::Var(x.clone())),
        MTerm::Lam(x, body) => Some(Value::Lam(x.clone(), Box::new(from_moggi(body)))),
        _ => None,
    }
}

/// Translation into computations; values are wrapped in `unit`.
pub fn from_moggi(e: &MTerm) -> Comp {
    if let Some(v) = from_moggi_v(e) {
        return Comp::Unit(Box::new(v));
    }
    match e {
        MTerm::Let(x, a, b) => Comp::Bind(Box::new(from_moggi(a)), Box::new(Value::Lam(x.clone(), Box::new(from_moggi(b))))),
        MTerm::App(f, a) => match from_moggi_v(f) {
            // v e' : the argument's translation, then the function
            Some(fv) => Comp::Bind(Box::new(from_moggi(a)), Box::new(fv)),
            // n e' : run n, then apply its result
            None => {
                let z = fresh_var(&e.names());
                let zv = Value::Var(z.clone());
                let inner = Comp::Bind(Box::new(from_moggi(a)), Box::new(zv));
                Comp::Bind(Box::new(from_moggi(f)), Box::new(Value::Lam(z, Box::new(inner))))
            }
        },
        _ => unreachable!("values handled above"),
    }
}

// ---------------------------------------------------------------------------
// Preservation checks

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PreservationVerdict {
    /// The image of the source reaches the image of the reduct in this many steps.
    Reached(usize),
    /// Not reached; the search exhausted every reduct within the bound.
    NotReached,
    /// The search hit its node budget.
    Inconclusive,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PreservationCase {
    pub step: MStep,
    pub source_image: Comp,
    pub target_image: Comp,
    pub verdict: PreservationVerdict,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PreservationReport {
    pub cases: Vec<PreservationCase>,
}

impl PreservationReport {
    pub fn all_reached(&self) -> bool {
        self.cases.iter().all(|c| matches!(c.verdict, PreservationVerdict::Reached(_)))
    }

    pub fn failures(&self) -> impl Iterator<Item = &PreservationCase> {
        self.cases.iter().filter(|c| c.verdict == PreservationVerdict::NotReached)
    }
}

pub const PRESERVATION_BUDGET: usize = 20_000;

/// For every one-step reduct `e'` of `e`, searches `from(e) →* from(e')`
/// within `fuel` steps. The eta rule is enabled only for `eta_v` steps.
pub fn check_preservation(e: &MTerm, fuel: usize) -> PreservationReport {
    let src = from_moggi(e);
    let mut report = PreservationReport::default();
    for step in m_enumerate_steps(e) {
        let target = from_moggi(&step.result);
        let rules = if step.rule == MRule::EtaV { Rules::WITH_ETA } else { Rules::LAMBDA_C };
        let verdict = match reaches(&src, &target, fuel, rules, PRESERVATION_BUDGET) {
            Some(path) => PreservationVerdict::Reached(path.len()),
            None if reach_set_exhausted(&src, fuel, rules) => PreservationVerdict::NotReached,
            None => PreservationVerdict::Inconclusive,
        };
        report.cases.push(PreservationCase { step, source_image: src.clone(), target_image: target, verdict });
    }
    report
}

fn reach_set_exhausted(m: &Comp, depth: usize, rules: Rules) -> bool {
    let mut seen: HashSet<_> = HashSet::from([m.nameless()]);
    let mut layer = vec![m.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for t in &layer {
            for s in crate::reduction::enumerate_steps(t, rules) {
                if seen.insert(s.result.nameless()) {
                    if seen.len() >= PRESERVATION_BUDGET {
                        return false;
                    }
                    next.push(s.result);
                }
            }
        }
        layer = next;
    }
    true
}

/// Convertibility of the images of a step `m → n` of the unit/bind calculus.
/// The witnesses in the correctness argument need at most two steps on
/// each side, and the search at that depth is exhaustive.
pub fn check_to_moggi_step(m: &Comp, step: &Step, depth: usize) -> Convertible {
    let a = to_moggi_c(m);
    let b = to_moggi_c(&step.result);
    m_convertible(&a, &b, depth, usize::MAX)
}

/// Moggi-side substitution lemma instance: `from(e[v/x]) ≡α from(e)[from_v(v)/x]`.
pub fn from_moggi_subst_holds(e: &MTerm, x: &Var, v: &MTerm) -> Result<bool> {
    let fv = from_moggi_v(v).ok_or_else(|| Error::InvalidDerivation("substituted term is not a value".into()))?;
    Ok(from_moggi(&e.subst(x, v)).alpha_eq(&from_moggi(e).subst(x, &fv)))
}

/// Substitution lemma instance for the other translation.
pub fn to_moggi_subst_holds(m: &Comp, x: &Var, w: &Value) -> bool {
    to_moggi_c(&m.subst(x, w)).alpha_eq(&to_moggi_c(m).subst(x, &to_moggi_v(w)))
}

/// All terms of size at most `max_size` up to α, over the free variables
/// `free`, with binders named `y0, y1, ...` by depth.
pub fn enumerate_mterms(max_size: usize, free: &[Var]) -> Vec<MTerm> {
    let mut memo: HashMap<(usize, usize), Vec<MTerm>> = HashMap::new();
    let mut out = Vec::new();
    for s in 1..=max_size {
        out.extend(exact(s, 0, free, &mut memo));
    }
    out
}

fn binder_name(depth: usize) -> Var {
    Var::new(&format!("y{depth}"))
}

fn exact(size: usize, depth: usize, free: &[Var], memo: &mut HashMap<(usize, usize), Vec<MTerm>>) -> Vec<MTerm> {
    if let Some(v) = memo.get(&(size, depth)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if size == 1 {
        out.extend(free.iter().cloned().map(MTerm::Var));
        out.extend((0..depth).map(|d| MTerm::Var(binder_name(d))));
    } else {
        let x = binder_name(depth);
        for b in exact(size - 1, depth + 1, free, memo) {
            out.push(MTerm::Lam(x.clone(), Box::new(b)));
        }
        for ls in 1..size - 1 {
            let rs = size - 1 - ls;
            let left = exact(ls, depth, free, memo);
            let right = exact(rs, depth, free, memo);
            let body = exact(rs, depth + 1, free, memo);
            for l in &left {
                for r in &right {
                    out.push(MTerm::App(Box::new(l.clone()), Box::new(r.clone())));
                }
                for r in &body {
                    out.push(MTerm::Let(x.clone(), Box::new(l.clone()), Box::new(r.clone())));
                }
            }
        }
    }
    memo.insert((size, depth), out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_comp;
    use crate::reduction::enumerate_steps;
    use crate::term::omega_c;

    #[test]
    fn parse_print() {
        for s in ["let x = f y in x", "\\x. f x", "(\\x. x) (\\y. y)", "f (g x) y", "f (let x = y in x)"] {
            let e = parse_moggi(s).unwrap();
            assert_eq!(e.to_string(), s);
            assert_eq!(parse_moggi(&e.to_string()).unwrap(), e);
        }
        assert_eq!(parse_moggi("f \\x. x").unwrap(), mapp(mvar("f"), mlam("x", mvar("x"))));
        assert!(parse_moggi("let in = x in x").is_err());
        assert!(parse_moggi("let x = y").is_err());
    }

    #[test]
    fn rules() {
        let steps = m_enumerate_steps(&parse_moggi("(\\x. x) y").unwrap());
        assert_eq!(steps[0].rule, MRule::BetaV);
        assert_eq!(steps[0].result, mvar("y"));
        let steps = m_enumerate_steps(&parse_moggi("let x = f y in x").unwrap());
        assert!(steps.iter().any(|s| s.rule == MRule::Id && s.result == parse_moggi("f y").unwrap()));
        let steps = m_enumerate_steps(&parse_moggi("f y z").unwrap());
        let l1 = steps.iter().find(|s| s.rule == MRule::Let1).unwrap();
        assert!(l1.result.alpha_eq(&parse_moggi("let w = f y in w z").unwrap()));
        let steps = m_enumerate_steps(&parse_moggi("\\x. f x").unwrap());
        assert_eq!(steps[0].rule, MRule::EtaV);
        assert!(m_enumerate_steps(&parse_moggi("\\x. x x").unwrap()).is_empty());
    }

    #[test]
    fn comp_renames() {
        let e = parse_moggi("let b = (let a = f in g a) in a b").unwrap();
        let s = m_enumerate_steps(&e).into_iter().find(|s| s.rule == MRule::Comp).unwrap();
        let expected = parse_moggi("let c = f in let b = g c in a b").unwrap();
        assert!(s.result.alpha_eq(&expected), "{}", s.result);
    }

    #[test]
    fn translations() {
        let m = parse_comp("unit f * g").unwrap();
        assert_eq!(to_moggi_c(&m).to_string(), "let x0 = f in g x0");
        let e = to_moggi_c(&omega_c());
        assert_eq!(e.to_string(), "let x0 = \\x. let x0 = x in x x0 in (\\x. let x0 = x in x x0) x0");
        assert_eq!(from_moggi(&parse_moggi("\\x. x").unwrap()), parse_comp("unit (\\x. unit x)").unwrap());
        assert_eq!(from_moggi(&parse_moggi("f g").unwrap()), parse_comp("unit g * f").unwrap());
        assert_eq!(
            from_moggi(&parse_moggi("let x = f g in h").unwrap()),
            parse_comp("unit g * f * \\x. unit h").unwrap()
        );
    }

    #[test]
    fn preservation_cases() {
        let ok = check_preservation(&parse_moggi("let x = \\z. z in f x").unwrap(), 4);
        assert!(ok.all_reached());
        let comp = check_preservation(&parse_moggi("let y = (let x = f g in h x) in k y").unwrap(), 4);
        assert!(comp.cases.iter().filter(|c| c.step.rule == MRule::Comp).all(|c| c.verdict == PreservationVerdict::Reached(1)));
        let l1 = check_preservation(&parse_moggi("f g h").unwrap(), 4);
        assert!(l1.cases.iter().any(|c| c.step.rule == MRule::Let1 && c.verdict == PreservationVerdict::Reached(0)));
        // a variable head under let.2 is only an eta expansion away
        let l2 = check_preservation(&parse_moggi("f (g h)").unwrap(), 4);
        let c = l2.cases.iter().find(|c| c.step.rule == MRule::Let2).unwrap();
        assert_eq!(c.verdict, PreservationVerdict::NotReached);
    }

    #[test]
    fn to_moggi_convertibility() {
        for src in ["unit (\\y. unit y) * \\x. unit x * f", "unit g * \\x. unit x", "(unit g * \\x. unit x) * \\y. unit y"] {
            let m = parse_comp(src).unwrap();
            for s in enumerate_steps(&m, Rules::LAMBDA_C) {
                assert!(matches!(check_to_moggi_step(&m, &s, 2), Convertible::Joined(_)), "{src}");
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        let f = [Var::new("f")];
        let all = enumerate_mterms(3, &f);
        // f; \y0.f, \y0.y0; f f, let y0 = f in f, let y0 = f in y0
        assert_eq!(all.len(), 1 + 2 + 6);
        let uniq: HashSet<NlMTerm> = all.iter().map(MTerm::nameless).collect();
        assert_eq!(uniq.len(), all.len());
    }
}
