//! Notions of reduction, their compatible closure, complete developments,
//! the `ass` measure and bounded joinability search.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::term::{fresh_var, Comp, NlComp, Value, Var};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    BetaC,
    Id,
    Ass,
    EtaC,
}

impl Rule {
    pub const ALL: [Rule; 4] = [Rule::BetaC, Rule::Id, Rule::Ass, Rule::EtaC];

    pub fn name(self) -> &'static str {
        match self {
            Rule::BetaC => "betac",
            Rule::Id => "id",
            Rule::Ass => "ass",
            Rule::EtaC => "etac",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Rule, String> {
        match s.trim() {
            "betac" | "beta" => Ok(Rule::BetaC),
            "id" => Ok(Rule::Id),
            "ass" => Ok(Rule::Ass),
            "etac" | "eta" => Ok(Rule::EtaC),
            other => Err(format!("unknown rule `{other}`")),
        }
    }
}

/// A set of enabled rules. `EtaC` must be asked for explicitly.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Rules {
    pub beta_c: bool,
    pub id: bool,
    pub ass: bool,
    pub eta_c: bool,
}

impl Rules {
    /// `betac`, `id` and `ass`: the confluent calculus.
    pub const LAMBDA_C: Rules = Rules { beta_c: true, id: true, ass: true, eta_c: false };
    pub const BETA_ID: Rules = Rules { beta_c: true, id: true, ass: false, eta_c: false };
    pub const ASS: Rules = Rules { beta_c: false, id: false, ass: true, eta_c: false };
    pub const WITH_ETA: Rules = Rules { beta_c: true, id: true, ass: true, eta_c: true };

    pub fn contains(&self, r: Rule) -> bool {
        match r {
            Rule::BetaC => self.beta_c,
            Rule::Id => self.id,
            Rule::Ass => self.ass,
            Rule::EtaC => self.eta_c,
        }
    }

    pub fn only(r: Rule) -> Rules {
        let mut s = Rules { beta_c: false, id: false, ass: false, eta_c: false };
        match r {
            Rule::BetaC => s.beta_c = true,
            Rule::Id => s.id = true,
            Rule::Ass => s.ass = true,
            Rule::EtaC => s.eta_c = true,
        }
        s
    }

    /// True when the engine runs outside the confluent fragment.
    pub fn non_confluent_mode(&self) -> bool {
        self.eta_c
    }
}

impl Default for Rules {
    fn default() -> Rules {
        Rules::LAMBDA_C
    }
}

impl FromStr for Rules {
    type Err = String;

    /// Comma-separated rule names, e.g. `betac,id,ass`.
    fn from_str(s: &str) -> Result<Rules, String> {
        let mut rs = Rules { beta_c: false, id: false, ass: false, eta_c: false };
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            match part.parse::<Rule>()? {
                Rule::BetaC => rs.beta_c = true,
                Rule::Id => rs.id = true,
                Rule::Ass => rs.ass = true,
                Rule::EtaC => rs.eta_c = true,
            }
        }
        Ok(rs)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Sel {
    UnitArg,
    BindLeft,
    BindRight,
    LamBody,
}

impl Sel {
    fn code(self) -> &'static str {
        match self {
            Sel::UnitArg => "u",
            Sel::BindLeft => "l",
            Sel::BindRight => "r",
            Sel::LamBody => "b",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct Position(pub Vec<Sel>);

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<&str> = self.0.iter().map(|s| s.code()).collect();
        f.write_str(&parts.join("."))
    }
}

impl FromStr for Position {
    type Err = String;

    fn from_str(s: &str) -> Result<Position, String> {
        if s == "root" || s.is_empty() {
            return Ok(Position(Vec::new()));
        }
        s.split('.')
            .map(|p| match p {
                "u" => Ok(Sel::UnitArg),
                "l" => Ok(Sel::BindLeft),
                "r" => Ok(Sel::BindRight),
                "b" => Ok(Sel::LamBody),
                other => Err(format!("bad selector `{other}`")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Step {
    pub rule: Rule,
    pub position: Position,
    pub result: Comp,
}

impl Step {
    pub fn trace_line(&self) -> String {
        format!("{}@{}  {}", self.rule, self.position, self.result)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rule": self.rule.name(),
            "path": self.position.to_string(),
            "term": self.result.to_string(),
        })
    }
}

/// Contracts a computation redex at the root.
pub fn root_step(m: &Comp, rule: Rule) -> Option<Comp> {
    let Comp::Bind(left, right) = m else { return None };
    match rule {
        Rule::BetaC => match (&**left, &**right) {
            (Comp::Unit(v), Value::Lam(x, body)) => Some(body.subst(x, v)),
            _ => None,
        },
        Rule::Id => {
            if is_identity(right) {
                Some((**left).clone())
            } else {
                None
            }
        }
        Rule::Ass => {
            let (Comp::Bind(l, inner), Value::Lam(_, _)) = (&**left, &**right) else { return None };
            let Value::Lam(x, mm) = &**inner else { return None };
            if right.has_free(x) {
                let mut avoid = right.free_vars();
                avoid.extend(mm.free_vars());
                avoid.insert(x.clone());
                let z = fresh_var(&avoid);
                let mm2 = mm.subst(x, &Value::Var(z.clone()));
                Some(Comp::Bind(
                    l.clone(),
                    Box::new(Value::Lam(z, Box::new(Comp::Bind(Box::new(mm2), right.clone())))),
                ))
            } else {
                Some(Comp::Bind(
                    l.clone(),
                    Box::new(Value::Lam(x.clone(), Box::new(Comp::Bind(mm.clone(), right.clone())))),
                ))
            }
        }
        Rule::EtaC => None,
    }
}

/// Contracts an `etac` redex `\x. (unit x * V)` with `x` not free in `V`.
pub fn root_step_value(v: &Value, rule: Rule) -> Option<Value> {
    if rule != Rule::EtaC {
        return None;
    }
    let Value::Lam(x, body) = v else { return None };
    let Comp::Bind(l, w) = &**body else { return None };
    match &**l {
        Comp::Unit(u) if matches!(&**u, Value::Var(y) if y == x) && !w.has_free(x) => Some((**w).clone()),
        _ => None,
    }
}

/// `\x. unit x` for any binder name.
pub fn is_identity(v: &Value) -> bool {
    match v {
        Value::Lam(x, body) => matches!(&**body, Comp::Unit(u) if matches!(&**u, Value::Var(y) if y == x)),
        Value::Var(_) => false,
    }
}

const COMP_RULES: [Rule; 3] = [Rule::BetaC, Rule::Id, Rule::Ass];

/// All one-step reducts in leftmost-outermost order.
pub fn enumerate_steps(m: &Comp, rules: Rules) -> Vec<Step> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    steps_comp(m, rules, &mut path, &mut |rule, path, sub| {
        out.push((rule, path.to_vec(), sub));
        false
    });
    out.into_iter()
        .map(|(rule, p, sub)| Step { rule, result: replace(m, &p, sub), position: Position(p) })
        .collect()
}

/// The leftmost-outermost step, if any.
pub fn first_step(m: &Comp, rules: Rules) -> Option<Step> {
    let mut found = None;
    let mut path = Vec::new();
    steps_comp(m, rules, &mut path, &mut |rule, path, sub| {
        found = Some((rule, path.to_vec(), sub));
        true
    });
    found.map(|(rule, p, sub)| Step { rule, result: replace(m, &p, sub), position: Position(p) })
}

enum Sub {
    C(Comp),
    V(Value),
}

/// Visits redexes in order; the callback returns `true` to stop.
fn steps_comp(m: &Comp, rules: Rules, path: &mut Vec<Sel>, f: &mut dyn FnMut(Rule, &[Sel], Sub) -> bool) -> bool {
    for r in COMP_RULES {
        if rules.contains(r) {
            if let Some(c) = root_step(m, r) {
                if f(r, path, Sub::C(c)) {
                    return true;
                }
            }
        }
    }
    match m {
        Comp::Unit(v) => {
            path.push(Sel::UnitArg);
            let stop = steps_value(v, rules, path, f);
            path.pop();
            stop
        }
        Comp::Bind(l, v) => {
            path.push(Sel::BindLeft);
            if steps_comp(l, rules, path, f) {
                path.pop();
                return true;
            }
            path.pop();
            path.push(Sel::BindRight);
            let stop = steps_value(v, rules, path, f);
            path.pop();
            stop
        }
    }
}

fn steps_value(v: &Value, rules: Rules, path: &mut Vec<Sel>, f: &mut dyn FnMut(Rule, &[Sel], Sub) -> bool) -> bool {
    if rules.eta_c {
        if let Some(w) = root_step_value(v, Rule::EtaC) {
            if f(Rule::EtaC, path, Sub::V(w)) {
                return true;
            }
        }
    }
    match v {
        Value::Var(_) => false,
        Value::Lam(_, body) => {
            path.push(Sel::LamBody);
            let stop = steps_comp(body, rules, path, f);
            path.pop();
            stop
        }
    }
}

fn replace(m: &Comp, path: &[Sel], sub: Sub) -> Comp {
    match (path.split_first(), sub) {
        (None, Sub::C(c)) => c,
        (None, Sub::V(_)) => panic!("value replacement at a computation position"),
        (Some((Sel::UnitArg, rest)), sub) => match m {
            Comp::Unit(v) => Comp::Unit(Box::new(replace_v(v, rest, sub))),
            _ => panic!("bad path"),
        },
        (Some((Sel::BindLeft, rest)), sub) => match m {
            Comp::Bind(l, v) => Comp::Bind(Box::new(replace(l, rest, sub)), v.clone()),
            _ => panic!("bad path"),
        },
        (Some((Sel::BindRight, rest)), sub) => match m {
            Comp::Bind(l, v) => Comp::Bind(l.clone(), Box::new(replace_v(v, rest, sub))),
            _ => panic!("bad path"),
        },
        (Some((Sel::LamBody, _)), _) => panic!("bad path"),
    }
}

fn replace_v(v: &Value, path: &[Sel], sub: Sub) -> Value {
    match (path.split_first(), sub) {
        (None, Sub::V(w)) => w,
        (None, Sub::C(_)) => panic!("computation replacement at a value position"),
        (Some((Sel::LamBody, rest)), sub) => match v {
            Value::Lam(x, body) => Value::Lam(x.clone(), Box::new(replace(body, rest, sub))),
            _ => panic!("bad path"),
        },
        _ => panic!("bad path"),
    }
}

/// The subterm at a position, as a computation.
pub fn subterm_at<'a>(m: &'a Comp, path: &[Sel]) -> Option<&'a Comp> {
    match path.split_first() {
        None => Some(m),
        Some((Sel::BindLeft, rest)) => match m {
            Comp::Bind(l, _) => subterm_at(l, rest),
            _ => None,
        },
        Some((Sel::BindRight, rest)) => match m {
            Comp::Bind(_, v) => subterm_at_v(v, rest),
            _ => None,
        },
        Some((Sel::UnitArg, rest)) => match m {
            Comp::Unit(v) => subterm_at_v(v, rest),
            _ => None,
        },
        Some((Sel::LamBody, _)) => None,
    }
}

fn subterm_at_v<'a>(v: &'a Value, path: &[Sel]) -> Option<&'a Comp> {
    match (path.split_first(), v) {
        (Some((Sel::LamBody, rest)), Value::Lam(_, body)) => subterm_at(body, rest),
        _ => None,
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Outcome {
    NormalForm(Comp),
    FuelExhausted(Comp),
}

#[derive(Clone, Debug)]
pub struct Normalization {
    pub outcome: Outcome,
    pub trace: Vec<Step>,
}

/// Leftmost-outermost reduction for at most `fuel` steps.
pub fn normalize(m: &Comp, rules: Rules, fuel: usize) -> Normalization {
    let mut cur = m.clone();
    let mut trace = Vec::new();
    for _ in 0..fuel {
        match first_step(&cur, rules) {
            None => return Normalization { outcome: Outcome::NormalForm(cur), trace },
            Some(s) => {
                cur = s.result.clone();
                trace.push(s);
            }
        }
    }
    if first_step(&cur, rules).is_none() {
        Normalization { outcome: Outcome::NormalForm(cur), trace }
    } else {
        Normalization { outcome: Outcome::FuelExhausted(cur), trace }
    }
}

pub fn is_normal(m: &Comp, rules: Rules) -> bool {
    first_step(m, rules).is_none()
}

/// The complete development `P*`.
pub fn star(m: &Comp) -> Comp {
    match m {
        Comp::Unit(v) => Comp::Unit(Box::new(star_v(v))),
        Comp::Bind(l, v) => match (&**l, &**v) {
            (Comp::Unit(w), Value::Lam(x, body)) => star(body).subst(x, &star_v(w)),
            (_, v) if is_identity(v) => star(l),
            _ => Comp::Bind(Box::new(star(l)), Box::new(star_v(v))),
        },
    }
}

pub fn star_v(v: &Value) -> Value {
    match v {
        Value::Var(_) => v.clone(),
        Value::Lam(x, body) => Value::Lam(x.clone(), Box::new(star(body))),
    }
}

fn rename_common(x: &Var, m: &Comp, y: &Var, n: &Comp) -> (Comp, Comp) {
    if x == y {
        return (m.clone(), n.clone());
    }
    let mut avoid = m.free_vars();
    avoid.extend(n.free_vars());
    avoid.insert(x.clone());
    avoid.insert(y.clone());
    let z = Value::Var(fresh_var(&avoid));
    (m.subst(x, &z), n.subst(y, &z))
}

/// Decides `m ⇛ n` (up to α) by structural search.
pub fn parallel_reduces(m: &Comp, n: &Comp) -> bool {
    match m {
        Comp::Unit(v) => matches!(n, Comp::Unit(w) if par_v(v, w)),
        Comp::Bind(l, v) => {
            if let Comp::Bind(l2, v2) = n {
                if parallel_reduces(l, l2) && par_v(v, v2) {
                    return true;
                }
            }
            if is_identity(v) && parallel_reduces(l, n) {
                return true;
            }
            if let (Comp::Unit(w), Value::Lam(x, body)) = (&**l, &**v) {
                let target = n.nameless();
                let (Some(ws), Some(bs)) = (par_successors_v(w, PAR_CAP), par_successors(body, PAR_CAP)) else {
                    return false;
                };
                for w2 in &ws {
                    for b2 in &bs {
                        if b2.subst(x, w2).nameless() == target {
                            return true;
                        }
                    }
                }
            }
            false
        }
    }
}

pub fn parallel_reduces_v(v: &Value, w: &Value) -> bool {
    par_v(v, w)
}

fn par_v(v: &Value, w: &Value) -> bool {
    match (v, w) {
        (Value::Var(x), Value::Var(y)) => x == y,
        (Value::Lam(x, m), Value::Lam(y, n)) => {
            let (m2, n2) = rename_common(x, m, y, n);
            parallel_reduces(&m2, &n2)
        }
        _ => false,
    }
}

const PAR_CAP: usize = 200_000;

/// All `n` with `m ⇛ n`, one representative per α-class; `None` past `cap`.
pub fn par_successors(m: &Comp, cap: usize) -> Option<Vec<Comp>> {
    let mut out: Vec<Comp> = Vec::new();
    let mut seen: HashSet<NlComp> = HashSet::new();
    let mut push = |c: Comp, out: &mut Vec<Comp>| -> bool {
        if seen.insert(c.nameless()) {
            out.push(c);
        }
        out.len() <= cap
    };
    match m {
        Comp::Unit(v) => {
            for w in par_successors_v(v, cap)? {
                push(Comp::Unit(Box::new(w)), &mut out);
            }
        }
        Comp::Bind(l, v) => {
            let ls = par_successors(l, cap)?;
            let vs = par_successors_v(v, cap)?;
            if ls.len().saturating_mul(vs.len()) > cap {
                return None;
            }
            for l2 in &ls {
                for v2 in &vs {
                    if !push(Comp::Bind(Box::new(l2.clone()), Box::new(v2.clone())), &mut out) {
                        return None;
                    }
                }
            }
            if let (Comp::Unit(w), Value::Lam(x, body)) = (&**l, &**v) {
                let ws = par_successors_v(w, cap)?;
                let bs = par_successors(body, cap)?;
                if ws.len().saturating_mul(bs.len()) > cap {
                    return None;
                }
                for w2 in &ws {
                    for b2 in &bs {
                        if !push(b2.subst(x, w2), &mut out) {
                            return None;
                        }
                    }
                }
            }
            if is_identity(v) {
                for l2 in ls {
                    if !push(l2, &mut out) {
                        return None;
                    }
                }
            }
        }
    }
    Some(out)
}

pub fn par_successors_v(v: &Value, cap: usize) -> Option<Vec<Value>> {
    match v {
        Value::Var(_) => Some(vec![v.clone()]),
        Value::Lam(x, body) => Some(
            par_successors(body, cap)?
                .into_iter()
                .map(|b| Value::Lam(x.clone(), Box::new(b)))
                .collect(),
        ),
    }
}

/// `♯M`: pairs of `*` occurrences where the first lies in the left operand of the second.
pub fn ass_measure(m: &Comp) -> usize {
    fn val(v: &Value) -> usize {
        match v {
            Value::Var(_) => 0,
            Value::Lam(_, b) => ass_measure(b),
        }
    }
    match m {
        Comp::Unit(v) => val(v),
        Comp::Bind(l, v) => l.binds() + ass_measure(l) + val(v),
    }
}

/// Bounded search for a common reduct.
///
/// Breadth-first from both sides up to `fuel` levels with a node budget,
/// then leftmost-outermost runs of `fuel` steps from each side. `None`
/// means no common reduct was found within the budget; it is not a
/// verdict of non-joinability.
pub fn joinable(m: &Comp, n: &Comp, fuel: usize) -> Option<Comp> {
    joinable_with(m, n, fuel, Rules::LAMBDA_C)
}

pub const JOIN_NODE_BUDGET: usize = 4000;

pub fn joinable_with(m: &Comp, n: &Comp, fuel: usize, rules: Rules) -> Option<Comp> {
    if m.alpha_eq(n) {
        return Some(m.clone());
    }
    // Deterministic runs first: cheap, and enough for most pairs.
    let run = |t: &Comp| -> Vec<Comp> {
        let mut seq = vec![t.clone()];
        let mut cur = t.clone();
        for _ in 0..fuel {
            match first_step(&cur, rules) {
                Some(s) => {
                    cur = s.result;
                    seq.push(cur.clone());
                }
                None => break,
            }
        }
        seq
    };
    let sm = run(m);
    let sn = run(n);
    let keys: HashMap<NlComp, usize> = sm.iter().enumerate().map(|(i, t)| (t.nameless(), i)).collect();
    if let Some(t) = sn.iter().find(|t| keys.contains_key(&t.nameless())) {
        return Some(t.clone());
    }
    bfs_join(m, n, fuel, rules, JOIN_NODE_BUDGET)
}

fn bfs_join(m: &Comp, n: &Comp, depth: usize, rules: Rules, budget: usize) -> Option<Comp> {
    let mut seen_a: HashMap<NlComp, Comp> = HashMap::new();
    let mut seen_b: HashMap<NlComp, Comp> = HashMap::new();
    let mut qa: VecDeque<Comp> = VecDeque::new();
    let mut qb: VecDeque<Comp> = VecDeque::new();
    seen_a.insert(m.nameless(), m.clone());
    seen_b.insert(n.nameless(), n.clone());
    qa.push_back(m.clone());
    qb.push_back(n.clone());
    for _ in 0..depth {
        if qa.is_empty() && qb.is_empty() {
            return None;
        }
        if let Some(t) = expand_layer(&mut qa, &mut seen_a, &seen_b, rules, budget) {
            return Some(t);
        }
        if let Some(t) = expand_layer(&mut qb, &mut seen_b, &seen_a, rules, budget) {
            return Some(t);
        }
    }
    None
}

fn expand_layer(
    q: &mut VecDeque<Comp>,
    seen: &mut HashMap<NlComp, Comp>,
    other: &HashMap<NlComp, Comp>,
    rules: Rules,
    budget: usize,
) -> Option<Comp> {
    let layer: Vec<Comp> = q.drain(..).collect();
    for t in layer {
        for s in enumerate_steps(&t, rules) {
            let k = s.result.nameless();
            if other.contains_key(&k) {
                return Some(s.result);
            }
            if seen.len() < budget && !seen.contains_key(&k) {
                seen.insert(k, s.result.clone());
                q.push_back(s.result);
            }
        }
    }
    None
}

/// Reachability `m →* n` (up to α) by bounded breadth-first search.
pub fn reaches(m: &Comp, n: &Comp, depth: usize, rules: Rules, budget: usize) -> Option<Vec<Step>> {
    let target = n.nameless();
    if m.nameless() == target {
        return Some(Vec::new());
    }
    let mut prev: HashMap<NlComp, (NlComp, Step)> = HashMap::new();
    let mut seen: HashSet<NlComp> = HashSet::new();
    seen.insert(m.nameless());
    let mut layer = vec![m.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for t in &layer {
            let kt = t.nameless();
            for s in enumerate_steps(t, rules) {
                let k = s.result.nameless();
                if seen.contains(&k) {
                    continue;
                }
                seen.insert(k.clone());
                prev.insert(k.clone(), (kt.clone(), s.clone()));
                if k == target {
                    let mut path = Vec::new();
                    let mut cur = k;
                    while let Some((p, st)) = prev.get(&cur) {
                        path.push(st.clone());
                        cur = p.clone();
                    }
                    path.reverse();
                    return Some(path);
                }
                if seen.len() < budget {
                    next.push(s.result);
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        layer = next;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_comp;
    use crate::term::*;

    fn c(s: &str) -> Comp {
        parse_comp(s).unwrap()
    }

    #[test]
    fn root_rules() {
        assert_eq!(root_step(&c("unit v * \\x. unit x * f"), Rule::BetaC), Some(c("unit v * f")));
        assert_eq!(root_step(&c("unit a * g * \\x. unit x"), Rule::Id), Some(c("unit a * g")));
        let got = root_step(&c("unit l * (\\x. unit m * g) * \\y. unit x * h"), Rule::Ass).unwrap();
        // x is free in the right operand, so the inner binder is renamed
        let expected = c("unit l * \\x0. unit m * g * \\y. unit x * h");
        assert!(got.alpha_eq(&expected));
        assert_eq!(got, expected);
    }

    #[test]
    fn omega_has_one_step_to_itself() {
        let steps = enumerate_steps(&omega_c(), Rules::LAMBDA_C);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].rule, Rule::BetaC);
        assert_eq!(steps[0].result, omega_c());
    }

    #[test]
    fn critical_pair_a_steps() {
        let m = c("unit v * (\\x. unit x * f) * \\y. unit y * g");
        let steps = enumerate_steps(&m, Rules::LAMBDA_C);
        let tags: Vec<(Rule, String)> = steps.iter().map(|s| (s.rule, s.position.to_string())).collect();
        assert_eq!(tags, vec![(Rule::Ass, "root".to_string()), (Rule::BetaC, "l".to_string())]);
    }

    #[test]
    fn normal_forms() {
        assert!(enumerate_steps(&c("unit (\\x. unit x)"), Rules::LAMBDA_C).is_empty());
        let n = normalize(&c("unit v * \\x. unit x"), Rules::LAMBDA_C, 10);
        assert_eq!(n.outcome, Outcome::NormalForm(c("unit v")));
        let n = normalize(&omega_c(), Rules::LAMBDA_C, 100);
        assert_eq!(n.outcome, Outcome::FuelExhausted(omega_c()));
        assert_eq!(n.trace.len(), 100);
    }

    #[test]
    fn ass_normalization_reaches_m4() {
        let m1 = c("unit l * g * (\\x. unit m * h) * (\\y. unit n * k) * \\z. unit p * q");
        let m4 = c("unit l * g * \\x. unit m * h * \\y. unit n * k * \\z. unit p * q");
        let n = normalize(&m1, Rules::ASS, 100);
        assert_eq!(n.outcome, Outcome::NormalForm(m4));
    }

    #[test]
    fn measure_examples() {
        assert_eq!(ass_measure(&c("unit l * (\\x. unit m) * (\\y. unit n) * \\z. unit p")), 3);
        assert_eq!(ass_measure(&c("unit l * \\x. unit m * \\y. unit n * \\z. unit p")), 0);
        assert_eq!(ass_measure(&c("unit v")), 0);
    }

    #[test]
    fn star_examples() {
        assert_eq!(star(&omega_c()), omega_c());
        let m = c("unit a * f * \\x. unit x");
        assert_eq!(star(&m), c("unit a * f"));
        assert_eq!(star_v(&var("x")), var("x"));
    }

    #[test]
    fn parallel_reduction_examples() {
        let m = c("unit a * f * \\x. unit x");
        assert!(parallel_reduces(&m, &m));
        assert!(parallel_reduces(&m, &c("unit a * f")));
        let r = c("unit v * \\x. unit x * x");
        assert!(parallel_reduces(&r, &c("unit v * v")));
        // ass is not part of a complete development
        let a = c("unit l * g * (\\x. unit m) * \\y. unit n");
        assert!(!parallel_reduces(&a, &c("unit l * g * \\x. unit m * \\y. unit n")));
    }

    #[test]
    fn eta_pair_not_joinable() {
        let a = c("unit w * u * y * z");
        let b = c("unit w * u * \\x. unit x * y * z");
        assert_eq!(joinable_with(&a, &b, 50, Rules::WITH_ETA), None);
    }

    #[test]
    fn rules_parse() {
        let r: Rules = "betac,id,ass,etac".parse().unwrap();
        assert!(r.non_confluent_mode());
        assert_eq!("betac,id,ass".parse::<Rules>().unwrap(), Rules::LAMBDA_C);
        assert!("bogus".parse::<Rules>().is_err());
        let p: Position = "l.r.b".parse().unwrap();
        assert_eq!(p.to_string(), "l.r.b");
    }
}
