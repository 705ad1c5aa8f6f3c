//! Two-sorted syntax of the calculus: values and computations.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// A variable name. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Var {
        assert!(!name.is_empty(), "variable names are nonempty");
        Var(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Var {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Var {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Var, D::Error> {
        let s = String::deserialize(d)?;
        if s.is_empty() {
            return Err(serde::de::Error::custom("empty variable name"));
        }
        Ok(Var::new(&s))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Value {
    Var(Var),
    Lam(Var, Box<Comp>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Comp {
    Unit(Box<Value>),
    Bind(Box<Comp>, Box<Value>),
}

/// Either sort, as produced by the parser.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Value(Value),
    Comp(Comp),
}

pub type VarSet = BTreeSet<Var>;

pub fn var(name: &str) -> Value {
    Value::Var(Var::new(name))
}

pub fn lam(x: &str, body: Comp) -> Value {
    Value::Lam(Var::new(x), Box::new(body))
}

pub fn unit(v: Value) -> Comp {
    Comp::Unit(Box::new(v))
}

pub fn bind(m: Comp, v: Value) -> Comp {
    Comp::Bind(Box::new(m), Box::new(v))
}

/// The reserved prefix for generated names.
pub const FRESH_PREFIX: &str = "x";

/// First name `x0, x1, ...` not in `avoid`.
pub fn fresh_var(avoid: &VarSet) -> Var {
    let mut i = 0usize;
    loop {
        let name = format!("{FRESH_PREFIX}{i}");
        if !avoid.iter().any(|v| v.as_str() == name) {
            return Var::new(&name);
        }
        i += 1;
    }
}

impl Value {
    pub fn is_var(&self) -> bool {
        matches!(self, Value::Var(_))
    }

    pub fn free_vars(&self) -> VarSet {
        let mut s = VarSet::new();
        self.collect_fv(&mut Vec::new(), &mut s);
        s
    }

    fn collect_fv(&self, bound: &mut Vec<Var>, out: &mut VarSet) {
        match self {
            Value::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Value::Lam(x, m) => {
                bound.push(x.clone());
                m.collect_fv(bound, out);
                bound.pop();
            }
        }
    }

    pub fn has_free(&self, x: &Var) -> bool {
        match self {
            Value::Var(y) => y == x,
            Value::Lam(y, m) => y != x && m.has_free(x),
        }
    }

    /// All variable names occurring anywhere, bound or free.
    pub fn all_vars(&self, out: &mut VarSet) {
        match self {
            Value::Var(x) => {
                out.insert(x.clone());
            }
            Value::Lam(x, m) => {
                out.insert(x.clone());
                m.all_vars(out);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Value::Var(_) => 1,
            Value::Lam(_, m) => 1 + m.size(),
        }
    }

    /// Capture-avoiding `self[v/x]`.
    pub fn subst(&self, x: &Var, v: &Value) -> Value {
        let fv = v.free_vars();
        self.subst_with(x, v, &fv)
    }

    fn subst_with(&self, x: &Var, v: &Value, fv_v: &VarSet) -> Value {
        match self {
            Value::Var(y) => {
                if y == x {
                    v.clone()
                } else {
                    self.clone()
                }
            }
            Value::Lam(y, m) => {
                if y == x || !m.has_free(x) {
                    return self.clone();
                }
                if fv_v.contains(y) {
                    let mut avoid = fv_v.clone();
                    avoid.extend(m.free_vars());
                    avoid.insert(x.clone());
                    let z = fresh_var(&avoid);
                    let renamed = m.subst(y, &Value::Var(z.clone()));
                    Value::Lam(z, Box::new(renamed.subst_with(x, v, fv_v)))
                } else {
                    Value::Lam(y.clone(), Box::new(m.subst_with(x, v, fv_v)))
                }
            }
        }
    }

    pub fn alpha_eq(&self, other: &Value) -> bool {
        self.nameless() == other.nameless()
    }

    pub fn nameless(&self) -> NlValue {
        self.to_nl(&mut Vec::new())
    }

    fn to_nl(&self, env: &mut Vec<Var>) -> NlValue {
        match self {
            Value::Var(x) => match env.iter().rev().position(|y| y == x) {
                Some(i) => NlValue::Bound(i),
                None => NlValue::Free(x.clone()),
            },
            Value::Lam(x, m) => {
                env.push(x.clone());
                let b = m.to_nl(env);
                env.pop();
                NlValue::Lam(Box::new(b))
            }
        }
    }
}

impl Comp {
    pub fn free_vars(&self) -> VarSet {
        let mut s = VarSet::new();
        self.collect_fv(&mut Vec::new(), &mut s);
        s
    }

    fn collect_fv(&self, bound: &mut Vec<Var>, out: &mut VarSet) {
        match self {
            Comp::Unit(v) => v.collect_fv(bound, out),
            Comp::Bind(m, v) => {
                m.collect_fv(bound, out);
                v.collect_fv(bound, out);
            }
        }
    }

    pub fn has_free(&self, x: &Var) -> bool {
        match self {
            Comp::Unit(v) => v.has_free(x),
            Comp::Bind(m, v) => m.has_free(x) || v.has_free(x),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn all_vars(&self, out: &mut VarSet) {
        match self {
            Comp::Unit(v) => v.all_vars(out),
            Comp::Bind(m, v) => {
                m.all_vars(out);
                v.all_vars(out);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Comp::Unit(v) => 1 + v.size(),
            Comp::Bind(m, v) => 1 + m.size() + v.size(),
        }
    }

    /// Number of `*` occurrences.
    pub fn binds(&self) -> usize {
        fn val(v: &Value) -> usize {
            match v {
                Value::Var(_) => 0,
                Value::Lam(_, m) => m.binds(),
            }
        }
        match self {
            Comp::Unit(v) => val(v),
            Comp::Bind(m, v) => 1 + m.binds() + val(v),
        }
    }

    /// Capture-avoiding `self[v/x]`.
    pub fn subst(&self, x: &Var, v: &Value) -> Comp {
        let fv = v.free_vars();
        self.subst_with(x, v, &fv)
    }

    fn subst_with(&self, x: &Var, v: &Value, fv_v: &VarSet) -> Comp {
        match self {
            Comp::Unit(w) => Comp::Unit(Box::new(w.subst_with(x, v, fv_v))),
            Comp::Bind(m, w) => Comp::Bind(
                Box::new(m.subst_with(x, v, fv_v)),
                Box::new(w.subst_with(x, v, fv_v)),
            ),
        }
    }

    pub fn alpha_eq(&self, other: &Comp) -> bool {
        self.nameless() == other.nameless()
    }

    pub fn nameless(&self) -> NlComp {
        self.to_nl(&mut Vec::new())
    }

    fn to_nl(&self, env: &mut Vec<Var>) -> NlComp {
        match self {
            Comp::Unit(v) => NlComp::Unit(Box::new(v.to_nl(env))),
            Comp::Bind(m, v) => NlComp::Bind(Box::new(m.to_nl(env)), Box::new(v.to_nl(env))),
        }
    }
}

impl Term {
    pub fn free_vars(&self) -> VarSet {
        match self {
            Term::Value(v) => v.free_vars(),
            Term::Comp(m) => m.free_vars(),
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Value(a), Term::Value(b)) => a.alpha_eq(b),
            (Term::Comp(a), Term::Comp(b)) => a.alpha_eq(b),
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Value(v) => v.size(),
            Term::Comp(m) => m.size(),
        }
    }

    pub fn as_comp(&self) -> Option<&Comp> {
        match self {
            Term::Comp(m) => Some(m),
            Term::Value(_) => None,
        }
    }

    pub fn as_value(&self) -> Option<&Value> {
        match self {
            Term::Value(v) => Some(v),
            Term::Comp(_) => None,
        }
    }
}

/// De Bruijn form; structural equality is α-equivalence.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum NlValue {
    Free(Var),
    Bound(usize),
    Lam(Box<NlComp>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum NlComp {
    Unit(Box<NlValue>),
    Bind(Box<NlComp>, Box<NlValue>),
}

/// `M N` sugar: `M * \z. (N * z)` with `z` not free in `N`.
pub fn desugar_app(m: Comp, n: Comp) -> Comp {
    let z = fresh_var(&n.free_vars());
    let zv = Value::Var(z.clone());
    bind(m, Value::Lam(z, Box::new(bind(n, zv))))
}

// Printing. Unit arguments and bind right-hand sides that are lambdas get
// parentheses; bind left-hand sides never need them because `*` is
// left-associative and a lambda body extends as far right as possible.

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Var(x) => write!(f, "{x}"),
            Value::Lam(x, m) => write!(f, "\\{x}. {m}"),
        }
    }
}

impl fmt::Display for Comp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Comp::Unit(v) => match **v {
                Value::Var(_) => write!(f, "unit {v}"),
                Value::Lam(..) => write!(f, "unit ({v})"),
            },
            Comp::Bind(m, v) => {
                write!(f, "{m} * ")?;
                match **v {
                    Value::Var(_) => write!(f, "{v}"),
                    Value::Lam(..) => write!(f, "({v})"),
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Value(v) => v.fmt(f),
            Term::Comp(m) => m.fmt(f),
        }
    }
}

pub fn print_term(t: &Term) -> String {
    t.to_string()
}

/// `unit W * W` with `W = \x. unit x * x`.
pub fn omega_c() -> Comp {
    let w = lam("x", bind(unit(var("x")), var("x")));
    bind(unit(w.clone()), w)
}

/// `\x. unit x`.
pub fn identity() -> Value {
    lam("x", unit(var("x")))
}
