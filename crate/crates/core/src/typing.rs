//! Type assignment: bases, explicit derivations and their checker,
//! generation-lemma inversion, bounded inference, and the syntactic
//! subject reduction and expansion transformations.
//!
//! Transformations work on witnesses: derivations in syntax-directed
//! normal form, one node per term constructor, with all subsumption
//! folded into the node's proven type. Witnesses carry no variable
//! names, so they survive α-renaming of the subject.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::reduction::{subterm_at, Rule, Sel, Step};
use crate::term::{fresh_var, Comp, Term, Value, Var, VarSet};
use crate::types::{
    arrow, inter_c, inter_v, t_of, canon_c, canon_v, leq_c, leq_cc, leq_cv, leq_v, meet_cc, meet_cv, AtomTable, CType, CanonC, CanonV, Type,
    TypeUniverse, VType,
};

/// A finite map from variables to value types; unbound variables have type `ω_V`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Basis(pub BTreeMap<Var, VType>);

impl Basis {
    pub fn new() -> Basis {
        Basis::default()
    }

    pub fn get(&self, x: &Var) -> VType {
        self.0.get(x).cloned().unwrap_or(VType::Omega)
    }

    pub fn contains(&self, x: &Var) -> bool {
        self.0.contains_key(x)
    }

    /// `Γ, x:δ`; `None` if `x` is already bound.
    pub fn extend(&self, x: &Var, d: VType) -> Option<Basis> {
        if self.0.contains_key(x) {
            return None;
        }
        let mut b = self.clone();
        b.0.insert(x.clone(), d);
        Some(b)
    }

    /// Pointwise intersection.
    pub fn meet(&self, other: &Basis) -> Basis {
        let mut out = self.clone();
        for (x, d) in &other.0 {
            let e = match out.0.remove(x) {
                Some(c) => inter_v(c, d.clone()),
                None => d.clone(),
            };
            out.0.insert(x.clone(), e);
        }
        out
    }

    pub fn canon(&self, table: &AtomTable) -> CBasis {
        self.0.iter().map(|(x, d)| (x.clone(), canon_v(d, table))).collect()
    }

    pub fn domain(&self) -> VarSet {
        self.0.keys().cloned().collect()
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(x, d)| format!("{x}:{d}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// A basis over canonical types, with shadowing.
pub type CBasis = BTreeMap<Var, CanonV>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Judgment {
    pub basis: Basis,
    pub subject: Term,
    pub ty: Type,
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.basis.0.is_empty() {
            write!(f, "|- {} : {}", self.subject, self.ty)
        } else {
            write!(f, "{} |- {} : {}", self.basis, self.subject, self.ty)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RuleName {
    Ax,
    ArrowI,
    UnitI,
    ArrowE,
    Omega,
    InterI,
    Leq,
}

impl RuleName {
    pub fn name(self) -> &'static str {
        match self {
            RuleName::Ax => "ax",
            RuleName::ArrowI => "arrow-i",
            RuleName::UnitI => "unit-i",
            RuleName::ArrowE => "arrow-e",
            RuleName::Omega => "omega",
            RuleName::InterI => "inter-i",
            RuleName::Leq => "leq",
        }
    }

    pub fn from_name(s: &str) -> Option<RuleName> {
        Some(match s {
            "ax" => RuleName::Ax,
            "arrow-i" => RuleName::ArrowI,
            "unit-i" => RuleName::UnitI,
            "arrow-e" => RuleName::ArrowE,
            "omega" => RuleName::Omega,
            "inter-i" => RuleName::InterI,
            "leq" => RuleName::Leq,
            _ => return None,
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Derivation {
    pub rule: RuleName,
    pub concl: Judgment,
    pub premises: Vec<Derivation>,
    /// For `leq`: the inequality used.
    pub side: Option<(Type, Type)>,
}

impl Derivation {
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Derivation::height).max().unwrap_or(0)
    }

    fn node(rule: RuleName, basis: &Basis, subject: Term, ty: Type, premises: Vec<Derivation>) -> Derivation {
        Derivation { rule, concl: Judgment { basis: basis.clone(), subject, ty }, premises, side: None }
    }

    /// Wraps in a `leq` node unless the type is already `to`.
    fn leq_to(self, to: Type) -> Derivation {
        if self.concl.ty == to {
            return self;
        }
        let from = self.concl.ty.clone();
        let concl = Judgment { basis: self.concl.basis.clone(), subject: self.concl.subject.clone(), ty: to.clone() };
        Derivation { rule: RuleName::Leq, concl, premises: vec![self], side: Some((from, to)) }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Diagnostic {
    /// Premise indices from the root.
    pub path: Vec<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "at root: {}", self.message)
        } else {
            let p: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
            write!(f, "at {}: {}", p.join("."), self.message)
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CheckReport {
    pub errors: Vec<Diagnostic>,
}

impl CheckReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

fn same_subject(a: &Term, b: &Term) -> bool {
    a.alpha_eq(b)
}

/// Checks every node of `d` against its rule.
pub fn check_derivation(d: &Derivation, table: &AtomTable) -> CheckReport {
    let mut report = CheckReport::default();
    check_node(d, table, &mut Vec::new(), &mut report.errors);
    report
}

fn check_node(d: &Derivation, table: &AtomTable, path: &mut Vec<usize>, out: &mut Vec<Diagnostic>) {
    if let Err(msg) = check_local(d, table) {
        out.push(Diagnostic { path: path.clone(), message: msg });
    }
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_node(p, table, path, out);
        path.pop();
    }
}

fn arity(d: &Derivation, n: usize) -> std::result::Result<(), String> {
    if d.premises.len() == n {
        Ok(())
    } else {
        Err(format!("rule {} expects {} premises, found {}", d.rule.name(), n, d.premises.len()))
    }
}

fn check_local(d: &Derivation, table: &AtomTable) -> std::result::Result<(), String> {
    let j = &d.concl;
    let sort_ok = matches!((&j.subject, &j.ty), (Term::Value(_), Type::V(_)) | (Term::Comp(_), Type::C(_)));
    if !sort_ok {
        return Err("subject and type have different sorts".into());
    }
    if d.side.is_some() && d.rule != RuleName::Leq {
        return Err("only leq nodes carry a side condition".into());
    }
    let same_basis = |p: &Derivation| -> std::result::Result<(), String> {
        if p.concl.basis == j.basis {
            Ok(())
        } else {
            Err(format!("premise basis `{}` differs from `{}`", p.concl.basis, j.basis))
        }
    };
    match d.rule {
        RuleName::Ax => {
            arity(d, 0)?;
            let (Term::Value(Value::Var(x)), Type::V(t)) = (&j.subject, &j.ty) else {
                return Err("ax needs a variable subject".into());
            };
            match j.basis.0.get(x) {
                Some(b) if b == t => Ok(()),
                Some(b) => Err(format!("ax: basis gives {x}:{b}, conclusion has {t}")),
                None => Err(format!("ax: {x} is not in the basis")),
            }
        }
        RuleName::Omega => {
            arity(d, 0)?;
            match &j.ty {
                Type::V(VType::Omega) | Type::C(CType::Omega) => Ok(()),
                t => Err(format!("omega rule concludes {t}")),
            }
        }
        RuleName::ArrowI => {
            arity(d, 1)?;
            let p = &d.premises[0];
            let (Term::Value(Value::Lam(x, m)), Type::V(VType::Arrow(dom, cod))) = (&j.subject, &j.ty) else {
                return Err("arrow-i needs an abstraction typed by an arrow".into());
            };
            let Term::Comp(n) = &p.concl.subject else {
                return Err("arrow-i premise subject must be a computation".into());
            };
            let added: Vec<(&Var, &VType)> =
                p.concl.basis.0.iter().filter(|(y, _)| !j.basis.0.contains_key(*y)).collect();
            if added.len() != 1 || p.concl.basis.0.len() != j.basis.0.len() + 1 {
                return Err("arrow-i premise basis must extend the conclusion basis by one fresh variable".into());
            }
            for (y, t) in &j.basis.0 {
                if p.concl.basis.0.get(y) != Some(t) {
                    return Err(format!("arrow-i premise changes the type of {y}"));
                }
            }
            let (z, dz) = added[0];
            if dz != &**dom {
                return Err(format!("arrow-i binds {z}:{dz}, arrow domain is {dom}"));
            }
            let lhs = Value::Lam(z.clone(), Box::new(n.clone()));
            if !lhs.alpha_eq(&Value::Lam(x.clone(), m.clone())) {
                return Err("arrow-i premise subject is not the abstraction body".into());
            }
            if p.concl.ty != Type::C((**cod).clone()) {
                return Err(format!("arrow-i premise type {} differs from codomain {cod}", p.concl.ty));
            }
            Ok(())
        }
        RuleName::UnitI => {
            arity(d, 1)?;
            let p = &d.premises[0];
            same_basis(p)?;
            let (Term::Comp(Comp::Unit(v)), Type::C(CType::T(dl))) = (&j.subject, &j.ty) else {
                return Err("unit-i needs `unit V : T d`".into());
            };
            if !same_subject(&p.concl.subject, &Term::Value((**v).clone())) {
                return Err("unit-i premise subject differs".into());
            }
            if p.concl.ty != Type::V((**dl).clone()) {
                return Err("unit-i premise type differs".into());
            }
            Ok(())
        }
        RuleName::ArrowE => {
            arity(d, 2)?;
            let (pm, pv) = (&d.premises[0], &d.premises[1]);
            same_basis(pm)?;
            same_basis(pv)?;
            let (Term::Comp(Comp::Bind(m, v)), Type::C(tau)) = (&j.subject, &j.ty) else {
                return Err("arrow-e needs a bind subject".into());
            };
            if !same_subject(&pm.concl.subject, &Term::Comp((**m).clone())) {
                return Err("arrow-e first premise subject differs".into());
            }
            if !same_subject(&pv.concl.subject, &Term::Value((**v).clone())) {
                return Err("arrow-e second premise subject differs".into());
            }
            let Type::C(CType::T(dl)) = &pm.concl.ty else {
                return Err("arrow-e first premise must have a type T d".into());
            };
            match &pv.concl.ty {
                Type::V(VType::Arrow(d2, t2)) if **d2 == **dl && **t2 == *tau => Ok(()),
                t => Err(format!("arrow-e second premise has {t}, expected {} -> {tau}", dl)),
            }
        }
        RuleName::InterI => {
            arity(d, 2)?;
            let (a, b) = (&d.premises[0], &d.premises[1]);
            same_basis(a)?;
            same_basis(b)?;
            if !same_subject(&a.concl.subject, &j.subject) || !same_subject(&b.concl.subject, &j.subject) {
                return Err("inter-i premise subjects differ".into());
            }
            let ok = match (&a.concl.ty, &b.concl.ty, &j.ty) {
                (Type::V(x), Type::V(y), Type::V(VType::Inter(p, q))) => x == &**p && y == &**q,
                (Type::C(x), Type::C(y), Type::C(CType::Inter(p, q))) => x == &**p && y == &**q,
                _ => false,
            };
            if ok {
                Ok(())
            } else {
                Err("inter-i conclusion is not the intersection of the premise types".into())
            }
        }
        RuleName::Leq => {
            arity(d, 1)?;
            let p = &d.premises[0];
            same_basis(p)?;
            if !same_subject(&p.concl.subject, &j.subject) {
                return Err("leq premise subject differs".into());
            }
            if let Some((a, b)) = &d.side {
                if a != &p.concl.ty || b != &j.ty {
                    return Err("leq side condition does not match the judgments".into());
                }
            }
            let holds = match (&p.concl.ty, &j.ty) {
                (Type::V(a), Type::V(b)) => leq_v(a, b, table),
                (Type::C(a), Type::C(b)) => leq_c(a, b, table),
                _ => return Err("leq changes sort".into()),
            };
            match holds {
                Ok(true) => Ok(()),
                Ok(false) => Err(format!("side condition {} <= {} fails", p.concl.ty, j.ty)),
                Err(e) => Err(e.to_string()),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Witnesses

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WVal {
    Omega,
    /// `Γ(x) ≤ ty`.
    Var { ty: CanonV },
    /// The body is typed once per arrow, with the binder at the given type;
    /// `⋀ (d_i -> ty(body_i)) ≤ ty`.
    Lam { arrows: Vec<(CanonV, WComp)>, ty: CanonV },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WComp {
    Omega,
    /// `T(ty(w)) ≤ ty`.
    Unit { w: Box<WVal>, ty: CanonC },
    /// Each part types `M : T dom` and `V`; the part contributes
    /// `ty(V)` applied to `dom`, and the meet of contributions is `≤ ty`.
    Bind { parts: Vec<BindPart>, ty: CanonC },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BindPart {
    pub dom: CanonV,
    pub wm: WComp,
    pub wv: WVal,
}

impl WVal {
    pub fn ty(&self) -> CanonV {
        match self {
            WVal::Omega => CanonV::top(),
            WVal::Var { ty } | WVal::Lam { ty, .. } => ty.clone(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            WVal::Omega | WVal::Var { .. } => 1,
            WVal::Lam { arrows, .. } => 1 + arrows.iter().map(|(_, w)| w.size()).sum::<usize>(),
        }
    }
}

impl WComp {
    pub fn ty(&self) -> CanonC {
        match self {
            WComp::Omega => CanonC::Top,
            WComp::Unit { ty, .. } | WComp::Bind { ty, .. } => ty.clone(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            WComp::Omega => 1,
            WComp::Unit { w, .. } => 1 + w.size(),
            WComp::Bind { parts, .. } => 1 + parts.iter().map(|p| p.wm.size() + p.wv.size()).sum::<usize>(),
        }
    }
}

/// `⋀ (d_i -> ty_i)` of a lambda witness's arrows.
fn lam_type(arrows: &[(CanonV, WComp)], table: &AtomTable) -> CanonV {
    let parts: Vec<CanonV> = arrows.iter().map(|(d, w)| CanonV::arrow(d.clone(), w.ty(), table)).collect();
    crate::types::meet_all_cv(parts.iter(), table)
}

fn part_out(p: &BindPart, table: &AtomTable) -> CanonC {
    p.wv.ty().apply(&p.dom, table)
}

fn lookup(basis: &CBasis, x: &Var) -> CanonV {
    basis.get(x).cloned().unwrap_or_else(CanonV::top)
}

pub fn check_wv(basis: &CBasis, v: &Value, w: &WVal, table: &AtomTable) -> bool {
    match (v, w) {
        (_, WVal::Omega) => true,
        (Value::Var(x), WVal::Var { ty }) => leq_cv(&lookup(basis, x), ty, table),
        (Value::Lam(x, body), WVal::Lam { arrows, ty }) => {
            arrows.iter().all(|(d, wb)| {
                let mut b = basis.clone();
                b.insert(x.clone(), d.clone());
                check_wc(&b, body, wb, table)
            }) && leq_cv(&lam_type(arrows, table), ty, table)
        }
        _ => false,
    }
}

pub fn check_wc(basis: &CBasis, m: &Comp, w: &WComp, table: &AtomTable) -> bool {
    match (m, w) {
        (_, WComp::Omega) => true,
        (Comp::Unit(v), WComp::Unit { w, ty }) => {
            check_wv(basis, v, w, table) && leq_cc(&CanonC::T(w.ty()), ty, table)
        }
        (Comp::Bind(l, v), WComp::Bind { parts, ty }) => {
            let mut acc = CanonC::Top;
            for p in parts {
                if !check_wc(basis, l, &p.wm, table)
                    || !check_wv(basis, v, &p.wv, table)
                    || !leq_cc(&p.wm.ty(), &CanonC::T(p.dom.clone()), table)
                {
                    return false;
                }
                acc = meet_cc(&acc, &part_out(p, table), table);
            }
            leq_cc(&acc, ty, table)
        }
        _ => false,
    }
}

fn bad(msg: &str) -> Error {
    Error::InvalidDerivation(msg.to_string())
}

pub fn upcast_v(w: WVal, to: &CanonV, table: &AtomTable) -> Result<WVal> {
    if to.is_top() {
        return Ok(WVal::Omega);
    }
    if !leq_cv(&w.ty(), to, table) {
        return Err(bad(&format!("cannot weaken {} to {}", w.ty(), to)));
    }
    Ok(match w {
        WVal::Omega => unreachable!("top below a non-top type"),
        WVal::Var { .. } => WVal::Var { ty: to.clone() },
        WVal::Lam { arrows, .. } => WVal::Lam { arrows, ty: to.clone() },
    })
}

pub fn upcast_c(w: WComp, to: &CanonC, table: &AtomTable) -> Result<WComp> {
    if to.is_top() {
        return Ok(WComp::Omega);
    }
    if !leq_cc(&w.ty(), to, table) {
        return Err(bad(&format!("cannot weaken {} to {}", w.ty(), to)));
    }
    Ok(match w {
        WComp::Omega => unreachable!("top below a non-top type"),
        WComp::Unit { w, .. } => WComp::Unit { w, ty: to.clone() },
        WComp::Bind { parts, .. } => WComp::Bind { parts, ty: to.clone() },
    })
}

/// The intersection rule on witnesses for the same subject.
pub fn merge_v(a: WVal, b: WVal, table: &AtomTable) -> Result<WVal> {
    Ok(match (a, b) {
        (WVal::Omega, x) | (x, WVal::Omega) => x,
        (WVal::Var { ty: p }, WVal::Var { ty: q }) => WVal::Var { ty: meet_cv(&p, &q, table) },
        (WVal::Lam { arrows: mut p, ty: s }, WVal::Lam { arrows: q, ty: t }) => {
            p.extend(q);
            WVal::Lam { arrows: p, ty: meet_cv(&s, &t, table) }
        }
        _ => return Err(bad("merging witnesses of different shapes")),
    })
}

pub fn merge_c(a: WComp, b: WComp, table: &AtomTable) -> Result<WComp> {
    Ok(match (a, b) {
        (WComp::Omega, x) | (x, WComp::Omega) => x,
        (WComp::Unit { w: p, ty: s }, WComp::Unit { w: q, ty: t }) => {
            WComp::Unit { w: Box::new(merge_v(*p, *q, table)?), ty: meet_cc(&s, &t, table) }
        }
        (WComp::Bind { parts: mut p, ty: s }, WComp::Bind { parts: q, ty: t }) => {
            p.extend(q);
            WComp::Bind { parts: p, ty: meet_cc(&s, &t, table) }
        }
        _ => return Err(bad("merging witnesses of different shapes")),
    })
}

fn merge_all_c(ws: Vec<WComp>, table: &AtomTable) -> Result<WComp> {
    ws.into_iter().try_fold(WComp::Omega, |acc, w| merge_c(acc, w, table))
}

fn merge_all_v(ws: Vec<WVal>, table: &AtomTable) -> Result<WVal> {
    ws.into_iter().try_fold(WVal::Omega, |acc, w| merge_v(acc, w, table))
}

/// Reads a derivation as a witness. The derivation should be valid.
pub fn witness_of(d: &Derivation, table: &AtomTable) -> Result<Witness> {
    let cv = |t: &Type| match t {
        Type::V(v) => Ok(canon_v(v, table)),
        _ => Err(bad("expected a value type")),
    };
    let cc = |t: &Type| match t {
        Type::C(c) => Ok(canon_c(c, table)),
        _ => Err(bad("expected a computation type")),
    };
    let prem = |i: usize| d.premises.get(i).ok_or_else(|| bad("missing premise"));
    Ok(match d.rule {
        RuleName::Omega => match d.concl.ty {
            Type::V(_) => Witness::V(WVal::Omega),
            Type::C(_) => Witness::C(WComp::Omega),
        },
        RuleName::Ax => Witness::V(WVal::Var { ty: cv(&d.concl.ty)? }),
        RuleName::ArrowI => {
            let Type::V(VType::Arrow(dom, _)) = &d.concl.ty else { return Err(bad("arrow-i type")) };
            let body = witness_of(prem(0)?, table)?.into_c()?;
            let arrows = vec![(canon_v(dom, table), body)];
            let ty = lam_type(&arrows, table);
            Witness::V(WVal::Lam { arrows, ty })
        }
        RuleName::UnitI => {
            let w = witness_of(prem(0)?, table)?.into_v()?;
            Witness::C(WComp::Unit { ty: CanonC::T(w.ty()), w: Box::new(w) })
        }
        RuleName::ArrowE => {
            let wm = witness_of(prem(0)?, table)?.into_c()?;
            let wv = witness_of(prem(1)?, table)?.into_v()?;
            let Type::C(CType::T(dom)) = &prem(0)?.concl.ty else { return Err(bad("arrow-e type")) };
            let part = BindPart { dom: canon_v(dom, table), wm, wv };
            let ty = cc(&d.concl.ty)?;
            let out = part_out(&part, table);
            if !leq_cc(&out, &ty, table) {
                return Err(bad("arrow-e conclusion not justified"));
            }
            if ty.is_top() {
                Witness::C(WComp::Omega)
            } else {
                Witness::C(WComp::Bind { parts: vec![part], ty })
            }
        }
        RuleName::InterI => match (witness_of(prem(0)?, table)?, witness_of(prem(1)?, table)?) {
            (Witness::V(a), Witness::V(b)) => Witness::V(merge_v(a, b, table)?),
            (Witness::C(a), Witness::C(b)) => Witness::C(merge_c(a, b, table)?),
            _ => return Err(bad("inter-i premises of different sorts")),
        },
        RuleName::Leq => match witness_of(prem(0)?, table)? {
            Witness::V(w) => Witness::V(upcast_v(w, &cv(&d.concl.ty)?, table)?),
            Witness::C(w) => Witness::C(upcast_c(w, &cc(&d.concl.ty)?, table)?),
        },
    })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Witness {
    V(WVal),
    C(WComp),
}

impl Witness {
    pub fn into_c(self) -> Result<WComp> {
        match self {
            Witness::C(w) => Ok(w),
            Witness::V(_) => Err(bad("expected a computation witness")),
        }
    }

    pub fn into_v(self) -> Result<WVal> {
        match self {
            Witness::V(w) => Ok(w),
            Witness::C(_) => Err(bad("expected a value witness")),
        }
    }
}

/// Builds an explicit derivation from a witness.
pub fn assemble_c(basis: &Basis, m: &Comp, w: &WComp, table: &AtomTable) -> Result<Derivation> {
    let subject = Term::Comp(m.clone());
    match (m, w) {
        (_, WComp::Omega) => Ok(Derivation::node(RuleName::Omega, basis, subject, Type::C(CType::Omega), vec![])),
        (Comp::Unit(v), WComp::Unit { w, ty }) => {
            let dv = assemble_v(basis, v, w, table)?;
            let inner = match &dv.concl.ty {
                Type::V(t) => t.clone(),
                _ => unreachable!(),
            };
            let d = Derivation::node(RuleName::UnitI, basis, subject, Type::C(t_of(inner)), vec![dv]);
            Ok(d.leq_to(Type::C(ty.to_ctype())))
        }
        (Comp::Bind(l, v), WComp::Bind { parts, ty }) => {
            let mut acc: Option<Derivation> = None;
            for p in parts {
                let tau = part_out(p, table);
                if tau.is_top() {
                    continue;
                }
                let dom = p.dom.to_vtype();
                let dm = assemble_c(basis, l, &p.wm, table)?.leq_to(Type::C(t_of(dom.clone())));
                let dv = assemble_v(basis, v, &p.wv, table)?.leq_to(Type::V(arrow(dom, tau.to_ctype())));
                let tau = tau.to_ctype();
                let e = Derivation::node(RuleName::ArrowE, basis, subject.clone(), Type::C(tau), vec![dm, dv]);
                acc = Some(match acc {
                    None => e,
                    Some(prev) => {
                        let (Type::C(a), Type::C(b)) = (&prev.concl.ty, &e.concl.ty) else { unreachable!() };
                        let t = Type::C(inter_c(a.clone(), b.clone()));
                        Derivation::node(RuleName::InterI, basis, subject.clone(), t, vec![prev, e])
                    }
                });
            }
            match acc {
                None if ty.is_top() => {
                    Ok(Derivation::node(RuleName::Omega, basis, subject, Type::C(CType::Omega), vec![]))
                }
                None => Err(bad("bind witness without parts")),
                Some(d) => Ok(d.leq_to(Type::C(ty.to_ctype()))),
            }
        }
        _ => Err(bad("witness does not match the computation")),
    }
}

pub fn assemble_v(basis: &Basis, v: &Value, w: &WVal, table: &AtomTable) -> Result<Derivation> {
    let subject = Term::Value(v.clone());
    match (v, w) {
        (_, WVal::Omega) => Ok(Derivation::node(RuleName::Omega, basis, subject, Type::V(VType::Omega), vec![])),
        (Value::Var(x), WVal::Var { ty }) => {
            if !basis.contains(x) {
                return Err(bad(&format!("{x} is unbound but typed {ty}")));
            }
            let ax = Derivation::node(RuleName::Ax, basis, subject, Type::V(basis.get(x)), vec![]);
            Ok(ax.leq_to(Type::V(ty.to_vtype())))
        }
        (Value::Lam(x, body), WVal::Lam { arrows, ty }) => {
            let (z, body2) = if basis.contains(x) {
                let mut avoid = basis.domain();
                body.all_vars(&mut avoid);
                avoid.insert(x.clone());
                let z = fresh_var(&avoid);
                let b = body.subst(x, &Value::Var(z.clone()));
                (z, b)
            } else {
                (x.clone(), (**body).clone())
            };
            let mut acc: Option<Derivation> = None;
            for (d, wb) in arrows {
                let dv = d.to_vtype();
                let ext = basis.extend(&z, dv.clone()).expect("fresh binder");
                let db = assemble_c(&ext, &body2, wb, table)?;
                let Type::C(tau) = db.concl.ty.clone() else { unreachable!() };
                let e = Derivation::node(
                    RuleName::ArrowI,
                    basis,
                    subject.clone(),
                    Type::V(arrow(dv, tau)),
                    vec![db],
                );
                acc = Some(match acc {
                    None => e,
                    Some(prev) => {
                        let (Type::V(a), Type::V(b)) = (&prev.concl.ty, &e.concl.ty) else { unreachable!() };
                        let t = Type::V(inter_v(a.clone(), b.clone()));
                        Derivation::node(RuleName::InterI, basis, subject.clone(), t, vec![prev, e])
                    }
                });
            }
            match acc {
                None if ty.is_top() => {
                    Ok(Derivation::node(RuleName::Omega, basis, subject, Type::V(VType::Omega), vec![]))
                }
                None => Err(bad("lambda witness without arrows")),
                Some(d) => Ok(d.leq_to(Type::V(ty.to_vtype()))),
            }
        }
        _ => Err(bad("witness does not match the value")),
    }
}

// ---------------------------------------------------------------------------
// Substitution on witnesses

/// Witness for `m[v/x]` from a witness of `m` under `x:δ` and `wv` proving `δ`.
pub fn subst_wc(m: &Comp, x: &Var, wm: &WComp, wv: &WVal, table: &AtomTable) -> Result<WComp> {
    Ok(match (m, wm) {
        (_, WComp::Omega) => WComp::Omega,
        (Comp::Unit(u), WComp::Unit { w, ty }) => {
            WComp::Unit { w: Box::new(subst_wv(u, x, w, wv, table)?), ty: ty.clone() }
        }
        (Comp::Bind(l, u), WComp::Bind { parts, ty }) => {
            let parts = parts
                .iter()
                .map(|p| {
                    Ok(BindPart {
                        dom: p.dom.clone(),
                        wm: subst_wc(l, x, &p.wm, wv, table)?,
                        wv: subst_wv(u, x, &p.wv, wv, table)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            WComp::Bind { parts, ty: ty.clone() }
        }
        _ => return Err(bad("witness does not match the computation")),
    })
}

pub fn subst_wv(v: &Value, x: &Var, w: &WVal, wv: &WVal, table: &AtomTable) -> Result<WVal> {
    Ok(match (v, w) {
        (_, WVal::Omega) => WVal::Omega,
        (Value::Var(y), WVal::Var { ty }) if y == x => upcast_v(wv.clone(), ty, table)?,
        (Value::Var(_), WVal::Var { .. }) => w.clone(),
        (Value::Lam(y, _), WVal::Lam { .. }) if y == x => w.clone(),
        (Value::Lam(_, body), WVal::Lam { arrows, ty }) => {
            let arrows = arrows
                .iter()
                .map(|(d, wb)| Ok((d.clone(), subst_wc(body, x, wb, wv, table)?)))
                .collect::<Result<Vec<_>>>()?;
            WVal::Lam { arrows, ty: ty.clone() }
        }
        _ => return Err(bad("witness does not match the value")),
    })
}

// ---------------------------------------------------------------------------
// Subject reduction and expansion at the root

fn redex_parts(m: &Comp) -> Option<(&Comp, &Value)> {
    match m {
        Comp::Bind(l, v) => Some((l, v)),
        _ => None,
    }
}

fn reduce_root(m: &Comp, rule: Rule, w: &WComp, table: &AtomTable) -> Result<WComp> {
    let WComp::Bind { parts, ty } = w else {
        return match w {
            WComp::Omega => Ok(WComp::Omega),
            _ => Err(bad("redex witness is not a bind")),
        };
    };
    let (left, right) = redex_parts(m).ok_or_else(|| bad("redex is not a bind"))?;
    let mut out: Vec<WComp> = Vec::new();
    match rule {
        Rule::BetaC => {
            let (Comp::Unit(_), Value::Lam(x, body)) = (left, right) else { return Err(bad("not a betac redex")) };
            for p in parts {
                if part_out(p, table).is_top() {
                    continue;
                }
                let WComp::Unit { w: wval, .. } = &p.wm else { return Err(bad("unit premise lost")) };
                let WVal::Lam { arrows, .. } = &p.wv else { return Err(bad("abstraction premise lost")) };
                for (d, wb) in arrows {
                    if leq_cv(&p.dom, d, table) {
                        let arg = upcast_v((**wval).clone(), d, table)?;
                        out.push(subst_wc(body, x, wb, &arg, table)?);
                    }
                }
            }
        }
        Rule::Id => {
            for p in parts {
                let tau = part_out(p, table);
                if tau.is_top() {
                    continue;
                }
                out.push(upcast_c(p.wm.clone(), &tau, table)?);
            }
        }
        Rule::Ass => {
            let Comp::Bind(_, inner) = left else { return Err(bad("not an ass redex")) };
            if !matches!(&**inner, Value::Lam(..)) {
                return Err(bad("not an ass redex"));
            }
            let mut new_parts = Vec::new();
            for p in parts {
                let tau = part_out(p, table);
                if tau.is_top() {
                    continue;
                }
                let WComp::Bind { parts: qs, .. } = &p.wm else { return Err(bad("inner bind premise lost")) };
                let kept: Vec<&BindPart> = qs.iter().filter(|q| !part_out(q, table).is_top()).collect();
                let delta = crate::types::meet_all_cv(kept.iter().map(|q| &q.dom), table);
                let wl = merge_all_c(kept.iter().map(|q| q.wm.clone()).collect(), table)?;
                let wl = upcast_c(wl, &CanonC::T(delta.clone()), table)?;
                let mut bodies = Vec::new();
                for q in &kept {
                    let WVal::Lam { arrows, .. } = &q.wv else { return Err(bad("abstraction premise lost")) };
                    for (d, wb) in arrows {
                        if leq_cv(&q.dom, d, table) {
                            bodies.push(wb.clone());
                        }
                    }
                }
                let wb = upcast_c(merge_all_c(bodies, table)?, &CanonC::T(p.dom.clone()), table)?;
                let inner_bind =
                    WComp::Bind { parts: vec![BindPart { dom: p.dom.clone(), wm: wb, wv: p.wv.clone() }], ty: tau };
                let arrows = vec![(delta.clone(), inner_bind)];
                let lam = WVal::Lam { ty: lam_type(&arrows, table), arrows };
                new_parts.push(BindPart { dom: delta, wm: wl, wv: lam });
            }
            return finish_bind(new_parts, ty, table);
        }
        Rule::EtaC => return Err(bad("etac steps are not supported")),
    }
    upcast_c(merge_all_c(out, table)?, ty, table)
}

fn finish_bind(parts: Vec<BindPart>, ty: &CanonC, table: &AtomTable) -> Result<WComp> {
    if ty.is_top() {
        return Ok(WComp::Omega);
    }
    let mut acc = CanonC::Top;
    for p in &parts {
        acc = meet_cc(&acc, &part_out(p, table), table);
    }
    if !leq_cc(&acc, ty, table) {
        return Err(bad("rebuilt bind does not reach its type"));
    }
    Ok(WComp::Bind { parts, ty: ty.clone() })
}

/// Splits a witness for `template[V/x]` into one for `template` (with `x`
/// typed at each occurrence) and the witnesses used for `V`.
fn unsubst_c(template: &Comp, x: &Var, w: &WComp, occ: &mut Vec<WVal>) -> Result<WComp> {
    Ok(match (template, w) {
        (_, WComp::Omega) => WComp::Omega,
        (Comp::Unit(u), WComp::Unit { w, ty }) => WComp::Unit { w: Box::new(unsubst_v(u, x, w, occ)?), ty: ty.clone() },
        (Comp::Bind(l, u), WComp::Bind { parts, ty }) => {
            let parts = parts
                .iter()
                .map(|p| {
                    Ok(BindPart {
                        dom: p.dom.clone(),
                        wm: unsubst_c(l, x, &p.wm, occ)?,
                        wv: unsubst_v(u, x, &p.wv, occ)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            WComp::Bind { parts, ty: ty.clone() }
        }
        _ => return Err(bad("witness does not match the contractum")),
    })
}

fn unsubst_v(template: &Value, x: &Var, w: &WVal, occ: &mut Vec<WVal>) -> Result<WVal> {
    Ok(match (template, w) {
        (_, WVal::Omega) => WVal::Omega,
        (Value::Var(y), _) if y == x => {
            occ.push(w.clone());
            WVal::Var { ty: w.ty() }
        }
        (Value::Var(_), WVal::Var { .. }) => w.clone(),
        (Value::Lam(y, _), _) if y == x => w.clone(),
        (Value::Lam(_, body), WVal::Lam { arrows, ty }) => {
            let arrows = arrows
                .iter()
                .map(|(d, wb)| Ok((d.clone(), unsubst_c(body, x, wb, occ)?)))
                .collect::<Result<Vec<_>>>()?;
            WVal::Lam { arrows, ty: ty.clone() }
        }
        _ => return Err(bad("witness does not match the contractum")),
    })
}

fn expand_root(m: &Comp, rule: Rule, wn: &WComp, table: &AtomTable) -> Result<WComp> {
    let tau = wn.ty();
    if tau.is_top() {
        return Ok(WComp::Omega);
    }
    let (left, right) = redex_parts(m).ok_or_else(|| bad("redex is not a bind"))?;
    match rule {
        Rule::BetaC => {
            let (Comp::Unit(_), Value::Lam(x, body)) = (left, right) else { return Err(bad("not a betac redex")) };
            let mut occ = Vec::new();
            let wbody = unsubst_c(body, x, wn, &mut occ)?;
            let warg = merge_all_v(occ, table)?;
            let delta = warg.ty();
            let wunit = WComp::Unit { ty: CanonC::T(delta.clone()), w: Box::new(warg) };
            let arrows = vec![(delta.clone(), wbody)];
            let lam = WVal::Lam { ty: lam_type(&arrows, table), arrows };
            finish_bind(vec![BindPart { dom: delta, wm: wunit, wv: lam }], &tau, table)
        }
        Rule::Id => {
            let CanonC::T(delta) = &tau else { unreachable!() };
            let body = WComp::Unit { w: Box::new(WVal::Var { ty: delta.clone() }), ty: tau.clone() };
            let arrows = vec![(delta.clone(), body)];
            let lam = WVal::Lam { ty: lam_type(&arrows, table), arrows };
            finish_bind(vec![BindPart { dom: delta.clone(), wm: wn.clone(), wv: lam }], &tau, table)
        }
        Rule::Ass => {
            let WComp::Bind { parts, .. } = wn else { return Err(bad("contractum witness is not a bind")) };
            let mut new_parts = Vec::new();
            for p in parts {
                let tau_i = part_out(p, table);
                if tau_i.is_top() {
                    continue;
                }
                let WVal::Lam { arrows, .. } = &p.wv else { return Err(bad("abstraction premise lost")) };
                let mut inner: Vec<&BindPart> = Vec::new();
                for (d, wb) in arrows {
                    if !leq_cv(&p.dom, d, table) {
                        continue;
                    }
                    match wb {
                        WComp::Omega => {}
                        WComp::Bind { parts: qs, .. } => {
                            inner.extend(qs.iter().filter(|q| !part_out(q, table).is_top()))
                        }
                        WComp::Unit { .. } => return Err(bad("bind premise lost")),
                    }
                }
                let eps = crate::types::meet_all_cv(inner.iter().map(|q| &q.dom), table);
                let wm1 = merge_all_c(inner.iter().map(|q| q.wm.clone()).collect(), table)?;
                let wm1 = upcast_c(wm1, &CanonC::T(eps.clone()), table)?;
                let wn0 = merge_all_v(inner.iter().map(|q| q.wv.clone()).collect(), table)?;
                let arrows1 = vec![(p.dom.clone(), wm1)];
                let lam1 = WVal::Lam { ty: lam_type(&arrows1, table), arrows: arrows1 };
                let left_w = finish_bind(
                    vec![BindPart { dom: p.dom.clone(), wm: p.wm.clone(), wv: lam1 }],
                    &CanonC::T(eps.clone()),
                    table,
                )?;
                new_parts.push(BindPart { dom: eps, wm: left_w, wv: wn0 });
            }
            finish_bind(new_parts, &tau, table)
        }
        Rule::EtaC => Err(bad("etac steps are not supported")),
    }
}

type RootFn<'a> = dyn FnMut(&Comp, &WComp) -> Result<WComp> + 'a;

fn at_path_c(m: &Comp, w: &WComp, path: &[Sel], f: &mut RootFn<'_>) -> Result<WComp> {
    let Some((sel, rest)) = path.split_first() else { return f(m, w) };
    Ok(match (sel, m, w) {
        (_, _, WComp::Omega) => WComp::Omega,
        (Sel::UnitArg, Comp::Unit(v), WComp::Unit { w, ty }) => {
            WComp::Unit { w: Box::new(at_path_v(v, w, rest, f)?), ty: ty.clone() }
        }
        (Sel::BindLeft, Comp::Bind(l, _), WComp::Bind { parts, ty }) => {
            let mut ps = Vec::new();
            for p in parts {
                ps.push(BindPart { dom: p.dom.clone(), wm: at_path_c(l, &p.wm, rest, f)?, wv: p.wv.clone() });
            }
            WComp::Bind { parts: ps, ty: ty.clone() }
        }
        (Sel::BindRight, Comp::Bind(_, v), WComp::Bind { parts, ty }) => {
            let mut ps = Vec::new();
            for p in parts {
                ps.push(BindPart { dom: p.dom.clone(), wm: p.wm.clone(), wv: at_path_v(v, &p.wv, rest, f)? });
            }
            WComp::Bind { parts: ps, ty: ty.clone() }
        }
        _ => return Err(bad("position does not match the witness")),
    })
}

fn at_path_v(v: &Value, w: &WVal, path: &[Sel], f: &mut RootFn<'_>) -> Result<WVal> {
    let Some((sel, rest)) = path.split_first() else { return Err(bad("value positions are not redexes")) };
    Ok(match (sel, v, w) {
        (_, _, WVal::Omega) => WVal::Omega,
        (Sel::LamBody, Value::Lam(_, body), WVal::Lam { arrows, ty }) => {
            let mut out = Vec::new();
            for (d, wb) in arrows {
                out.push((d.clone(), at_path_c(body, wb, rest, f)?));
            }
            WVal::Lam { arrows: out, ty: ty.clone() }
        }
        _ => return Err(bad("position does not match the witness")),
    })
}

/// Witness for the reduct of `step` from a witness for its source `m`.
pub fn reduce_witness(m: &Comp, step: &Step, w: &WComp, table: &AtomTable) -> Result<WComp> {
    let rule = step.rule;
    at_path_c(m, w, &step.position.0, &mut |sub, w| reduce_root(sub, rule, w, table))
}

/// Witness for the source `m` of `step` from a witness for its reduct.
pub fn expand_witness(m: &Comp, step: &Step, wn: &WComp, table: &AtomTable) -> Result<WComp> {
    let rule = step.rule;
    let path = &step.position.0;
    subterm_at(m, path).ok_or_else(|| bad("step position is not in the term"))?;
    at_path_c(m, wn, path, &mut |sub, w| expand_root(sub, rule, w, table))
}

fn comp_judgment(d: &Derivation) -> Result<(&Basis, CType)> {
    match (&d.concl.subject, &d.concl.ty) {
        (Term::Comp(_), Type::C(t)) => Ok((&d.concl.basis, t.clone())),
        _ => Err(bad("expected a computation judgment")),
    }
}

/// From `Γ ⊢ M : τ` and a step `M → N`, a derivation of `Γ ⊢ N : τ`.
pub fn reduce_derivation(m: &Comp, step: &Step, d: &Derivation, table: &AtomTable) -> Result<Derivation> {
    let (basis, tau) = comp_judgment(d)?;
    let w = witness_of(d, table)?.into_c()?;
    let w2 = reduce_witness(m, step, &w, table)?;
    Ok(assemble_c(basis, &step.result, &w2, table)?.leq_to(Type::C(tau)))
}

/// From a step `M → N` and `Γ ⊢ N : τ`, a derivation of `Γ ⊢ M : τ`.
pub fn expand_derivation(m: &Comp, step: &Step, d: &Derivation, table: &AtomTable) -> Result<Derivation> {
    if step.rule == Rule::EtaC {
        return Err(bad("etac steps are not supported"));
    }
    let (basis, tau) = comp_judgment(d)?;
    if matches!(tau, CType::Omega) {
        return Ok(Derivation::node(RuleName::Omega, basis, Term::Comp(m.clone()), Type::C(CType::Omega), vec![]));
    }
    let wn = witness_of(d, table)?.into_c()?;
    let wm = expand_witness(m, step, &wn, table)?;
    Ok(assemble_c(basis, m, &wm, table)?.leq_to(Type::C(tau)))
}

/// Runs `m` leftmost-outermost until it has the shape `unit V` and types
/// it `T ω_V` by expanding back along the steps.
pub fn expansion_route(m: &Comp, fuel: usize, table: &AtomTable) -> Result<Option<Derivation>> {
    let mut terms = vec![m.clone()];
    let mut steps = Vec::new();
    let mut cur = m.clone();
    for _ in 0..=fuel {
        if let Comp::Unit(_) = cur {
            break;
        }
        match crate::reduction::first_step(&cur, crate::reduction::Rules::LAMBDA_C) {
            None => return Ok(None),
            Some(s) => {
                cur = s.result.clone();
                terms.push(cur.clone());
                steps.push(s);
            }
        }
    }
    if !matches!(cur, Comp::Unit(_)) {
        return Ok(None);
    }
    let mut w = WComp::Unit { w: Box::new(WVal::Omega), ty: CanonC::T(CanonV::top()) };
    for (src, step) in terms.iter().zip(&steps).rev() {
        w = expand_witness(src, step, &w, table)?;
    }
    Ok(Some(assemble_c(&Basis::new(), m, &w, table)?))
}

// ---------------------------------------------------------------------------
// Inversion

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Obligation {
    Sub(Type, Type),
    Judge(Judgment),
}

fn canon_type(t: &Type, table: &AtomTable) -> (bool, Type) {
    match t {
        Type::V(d) => {
            let c = canon_v(d, table);
            (c.is_top(), Type::V(c.to_vtype()))
        }
        Type::C(c) => {
            let k = canon_c(c, table);
            (k.is_top(), Type::C(k.to_ctype()))
        }
    }
}

fn rename_binder(basis: &Basis, x: &Var, body: &Comp) -> (Var, Comp) {
    if !basis.contains(x) {
        return (x.clone(), body.clone());
    }
    let mut avoid = basis.domain();
    body.all_vars(&mut avoid);
    avoid.insert(x.clone());
    let z = fresh_var(&avoid);
    let b = body.subst(x, &Value::Var(z.clone()));
    (z, b)
}

/// The generation lemma: a disjunction of obligation sets, one of which
/// holds iff the judgment is derivable (bind types ranging over the universe).
pub fn invert(
    basis: &Basis,
    subject: &Term,
    ty: &Type,
    universe: &TypeUniverse,
    table: &AtomTable,
) -> Vec<Vec<Obligation>> {
    let (trivial, _) = canon_type(ty, table);
    if trivial {
        return vec![vec![]];
    }
    let judge = |b: &Basis, s: Term, t: Type| Obligation::Judge(Judgment { basis: b.clone(), subject: s, ty: t });
    match (subject, ty) {
        (Term::Value(Value::Var(x)), Type::V(_)) => vec![vec![Obligation::Sub(Type::V(basis.get(x)), ty.clone())]],
        (Term::Value(Value::Lam(x, body)), Type::V(d)) => {
            let c = canon_v(d, table);
            if !c.atoms().is_empty() {
                return vec![];
            }
            let (z, body) = rename_binder(basis, x, body);
            let set = c
                .arrows()
                .iter()
                .map(|(a, t)| {
                    let ext = basis.extend(&z, a.to_vtype()).expect("fresh binder");
                    judge(&ext, Term::Comp(body.clone()), Type::C(t.to_ctype()))
                })
                .collect();
            vec![set]
        }
        (Term::Comp(Comp::Unit(v)), Type::C(t)) => match canon_c(t, table) {
            CanonC::T(g) => vec![vec![judge(basis, Term::Value((**v).clone()), Type::V(g.to_vtype()))]],
            CanonC::Top => vec![vec![]],
        },
        (Term::Comp(Comp::Bind(l, v)), Type::C(t)) => universe
            .values
            .iter()
            .map(|d| {
                vec![
                    judge(basis, Term::Comp((**l).clone()), Type::C(t_of(d.to_vtype()))),
                    judge(basis, Term::Value((**v).clone()), Type::V(arrow(d.to_vtype(), t.clone()))),
                ]
            })
            .collect(),
        _ => vec![],
    }
}

/// Rebuilds a derivation of the judgment from one obligation set of
/// [`invert`] and derivations of its `Judge` obligations, in order.
pub fn reassemble(
    basis: &Basis,
    subject: &Term,
    ty: &Type,
    set: &[Obligation],
    premises: Vec<Derivation>,
    table: &AtomTable,
) -> Result<Derivation> {
    let (trivial, _) = canon_type(ty, table);
    if trivial {
        let top = match ty {
            Type::V(_) => Type::V(VType::Omega),
            Type::C(_) => Type::C(CType::Omega),
        };
        return Ok(Derivation::node(RuleName::Omega, basis, subject.clone(), top, vec![]).leq_to(ty.clone()));
    }
    for o in set {
        if let Obligation::Sub(Type::V(a), Type::V(b)) = o {
            if !leq_v(a, b, table)? {
                return Err(bad("subtyping obligation fails"));
            }
        }
    }
    let mut premises = premises.into_iter();
    let mut next = || premises.next().ok_or_else(|| bad("missing premise derivation"));
    match subject {
        Term::Value(Value::Var(x)) => {
            let ax = Derivation::node(RuleName::Ax, basis, subject.clone(), Type::V(basis.get(x)), vec![]);
            if !basis.contains(x) {
                return Err(bad("unbound variable with a non-trivial type"));
            }
            Ok(ax.leq_to(ty.clone()))
        }
        Term::Value(Value::Lam(..)) => {
            let mut acc: Option<Derivation> = None;
            for _ in 0..set.len() {
                let p = next()?;
                let Some(dz) = p.concl.basis.0.iter().find(|(y, _)| !basis.contains(y)).map(|(_, d)| d.clone())
                else {
                    return Err(bad("premise basis does not extend the basis"));
                };
                let Type::C(t) = p.concl.ty.clone() else { return Err(bad("premise sort")) };
                let e = Derivation::node(RuleName::ArrowI, basis, subject.clone(), Type::V(arrow(dz, t)), vec![p]);
                acc = Some(match acc {
                    None => e,
                    Some(prev) => {
                        let (Type::V(a), Type::V(b)) = (&prev.concl.ty, &e.concl.ty) else { unreachable!() };
                        let t = Type::V(inter_v(a.clone(), b.clone()));
                        Derivation::node(RuleName::InterI, basis, subject.clone(), t, vec![prev, e])
                    }
                });
            }
            acc.map(|d| d.leq_to(ty.clone())).ok_or_else(|| bad("no premises for an abstraction"))
        }
        Term::Comp(Comp::Unit(_)) => {
            let p = next()?;
            let Type::V(g) = p.concl.ty.clone() else { return Err(bad("premise sort")) };
            Ok(Derivation::node(RuleName::UnitI, basis, subject.clone(), Type::C(t_of(g)), vec![p]).leq_to(ty.clone()))
        }
        Term::Comp(Comp::Bind(..)) => {
            let pm = next()?;
            let pv = next()?;
            let Type::V(VType::Arrow(_, t)) = pv.concl.ty.clone() else { return Err(bad("premise sort")) };
            Ok(Derivation::node(RuleName::ArrowE, basis, subject.clone(), Type::C(*t), vec![pm, pv]).leq_to(ty.clone()))
        }
    }
}

// ---------------------------------------------------------------------------
// Bounded inference

/// Derivability with every `arrow-e` type drawn from a finite universe.
pub struct Inferencer<'a> {
    universe: &'a TypeUniverse,
    table: &'a AtomTable,
    memo_c: HashMap<(usize, CBasis, CanonC), Option<WComp>>,
    memo_v: HashMap<(usize, CBasis, CanonV), Option<WVal>>,
}

impl<'a> Inferencer<'a> {
    pub fn new(universe: &'a TypeUniverse, table: &'a AtomTable) -> Inferencer<'a> {
        Inferencer { universe, table, memo_c: HashMap::new(), memo_v: HashMap::new() }
    }

    pub fn derive_c(&mut self, basis: &CBasis, m: &Comp, t: &CanonC) -> Option<WComp> {
        if t.is_top() {
            return Some(WComp::Omega);
        }
        let key = (m as *const Comp as usize, basis.clone(), t.clone());
        if let Some(r) = self.memo_c.get(&key) {
            return r.clone();
        }
        let r = match (m, t) {
            (Comp::Unit(v), CanonC::T(g)) => {
                self.derive_v(basis, v, g).map(|w| WComp::Unit { w: Box::new(w), ty: t.clone() })
            }
            (Comp::Bind(l, v), _) => {
                let mut found = None;
                for d in &self.universe.values {
                    let Some(wm) = self.derive_c(basis, l, &CanonC::T(d.clone())) else { continue };
                    let target = CanonV::arrow(d.clone(), t.clone(), self.table);
                    if let Some(wv) = self.derive_v(basis, v, &target) {
                        found = Some(WComp::Bind { parts: vec![BindPart { dom: d.clone(), wm, wv }], ty: t.clone() });
                        break;
                    }
                }
                found
            }
            _ => None,
        };
        self.memo_c.insert(key, r.clone());
        r
    }

    pub fn derive_v(&mut self, basis: &CBasis, v: &Value, d: &CanonV) -> Option<WVal> {
        if d.is_top() {
            return Some(WVal::Omega);
        }
        let key = (v as *const Value as usize, basis.clone(), d.clone());
        if let Some(r) = self.memo_v.get(&key) {
            return r.clone();
        }
        let r = match v {
            Value::Var(x) => {
                if leq_cv(&lookup(basis, x), d, self.table) {
                    Some(WVal::Var { ty: d.clone() })
                } else {
                    None
                }
            }
            Value::Lam(x, body) => {
                if !d.atoms().is_empty() {
                    None
                } else {
                    let mut arrows = Vec::new();
                    let mut ok = true;
                    for (a, t) in d.arrows() {
                        let mut b = basis.clone();
                        b.insert(x.clone(), a.clone());
                        match self.derive_c(&b, body, t) {
                            Some(w) => arrows.push((a.clone(), w)),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    ok.then(|| WVal::Lam { arrows, ty: d.clone() })
                }
            }
        };
        self.memo_v.insert(key, r.clone());
        r
    }
}

/// All computation types of the universe derivable for `m`.
pub fn infer_bounded_c(basis: &Basis, m: &Comp, universe: &TypeUniverse, table: &AtomTable) -> Vec<CanonC> {
    let cb = basis.canon(table);
    let mut inf = Inferencer::new(universe, table);
    universe.comps.iter().filter(|t| inf.derive_c(&cb, m, t).is_some()).cloned().collect()
}

/// All value types of the universe derivable for `v`.
pub fn infer_bounded_v(basis: &Basis, v: &Value, universe: &TypeUniverse, table: &AtomTable) -> Vec<CanonV> {
    let cb = basis.canon(table);
    let mut inf = Inferencer::new(universe, table);
    universe.values.iter().filter(|d| inf.derive_v(&cb, v, d).is_some()).cloned().collect()
}

pub fn infer_bounded(basis: &Basis, subject: &Term, universe: &TypeUniverse, table: &AtomTable) -> Vec<Type> {
    match subject {
        Term::Comp(m) => infer_bounded_c(basis, m, universe, table).iter().map(|t| Type::C(t.to_ctype())).collect(),
        Term::Value(v) => infer_bounded_v(basis, v, universe, table).iter().map(|d| Type::V(d.to_vtype())).collect(),
    }
}

/// A derivation of `Γ ⊢ P : σ` found by bounded search.
pub fn derive(
    basis: &Basis,
    subject: &Term,
    ty: &Type,
    universe: &TypeUniverse,
    table: &AtomTable,
) -> Result<Option<Derivation>> {
    let cb = basis.canon(table);
    let mut inf = Inferencer::new(universe, table);
    match (subject, ty) {
        (Term::Comp(m), Type::C(t)) => match inf.derive_c(&cb, m, &canon_c(t, table)) {
            Some(w) => Ok(Some(assemble_c(basis, m, &w, table)?.leq_to(ty.clone()))),
            None => Ok(None),
        },
        (Term::Value(v), Type::V(d)) => match inf.derive_v(&cb, v, &canon_v(d, table)) {
            Some(w) => Ok(Some(assemble_v(basis, v, &w, table)?.leq_to(ty.clone()))),
            None => Ok(None),
        },
        _ => Err(bad("subject and type have different sorts")),
    }
}

/// Some non-trivial type of the closed computation `m` within the universe.
pub fn typable_nontrivial(m: &Comp, universe: &TypeUniverse, table: &AtomTable) -> Result<Option<(CanonC, Derivation)>> {
    let fv = m.free_vars();
    if !fv.is_empty() {
        let names: Vec<&str> = fv.iter().map(|x| x.as_str()).collect();
        return Err(Error::OpenTerm(names.join(", ")));
    }
    let mut inf = Inferencer::new(universe, table);
    let empty = CBasis::new();
    for t in universe.comps.iter().filter(|t| !t.is_top()) {
        if let Some(w) = inf.derive_c(&empty, m, t) {
            return Ok(Some((t.clone(), assemble_c(&Basis::new(), m, &w, table)?)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_comp;
    use crate::reduction::{enumerate_steps, Rules};
    use crate::term::{identity, omega_c};
    use crate::types::enumerate_types;

    fn empty() -> AtomTable {
        AtomTable::empty()
    }

    #[test]
    fn identity_has_arrow_type() {
        let t = empty();
        let b = Basis::new();
        let x = Var::new("x");
        let bx = b.extend(&x, VType::Omega).unwrap();
        let ax = Derivation::node(RuleName::Ax, &bx, Term::Value(Value::Var(x.clone())), Type::V(VType::Omega), vec![]);
        let Value::Lam(_, body) = identity() else { unreachable!() };
        let u = Derivation::node(RuleName::UnitI, &bx, Term::Comp((*body).clone()), Type::C(t_of(VType::Omega)), vec![ax]);
        let ty = Type::V(arrow(VType::Omega, t_of(VType::Omega)));
        let d = Derivation::node(RuleName::ArrowI, &b, Term::Value(identity()), ty.clone(), vec![u.clone()]);
        assert!(check_derivation(&d, &t).is_valid());
        let wrong = Derivation::node(RuleName::ArrowI, &b, Term::Value(identity()), Type::V(VType::Omega), vec![u]);
        assert!(!check_derivation(&wrong, &t).is_valid());
    }

    #[test]
    fn omega_c_is_untypable() {
        let t = empty();
        let u = enumerate_types(2, Some(2), &t);
        assert!(typable_nontrivial(&omega_c(), &u, &t).unwrap().is_none());
        let m = parse_comp("unit (\\z. unit z) * \\x. unit x").unwrap();
        let (ty, d) = typable_nontrivial(&m, &u, &t).unwrap().unwrap();
        assert_eq!(ty, CanonC::T(CanonV::top()));
        assert!(check_derivation(&d, &t).is_valid());
    }

    fn all_reducts_typed(src: &str) {
        let t = empty();
        let u = enumerate_types(2, Some(2), &t);
        let m = parse_comp(src).unwrap();
        let b = Basis::new();
        for ty in infer_bounded(&b, &Term::Comp(m.clone()), &u, &t) {
            let d = derive(&b, &Term::Comp(m.clone()), &ty, &u, &t).unwrap().unwrap();
            assert!(check_derivation(&d, &t).is_valid());
            for s in enumerate_steps(&m, Rules::LAMBDA_C) {
                let d2 = reduce_derivation(&m, &s, &d, &t).unwrap();
                let r = check_derivation(&d2, &t);
                assert!(r.is_valid(), "{src} via {}: {:?}", s.trace_line(), r.errors);
                assert!(d2.concl.subject.alpha_eq(&Term::Comp(s.result.clone())));
                assert_eq!(d2.concl.ty, ty);
                let n = Term::Comp(s.result.clone());
                let dn = derive(&b, &n, &ty, &u, &t).unwrap().unwrap();
                let d3 = expand_derivation(&m, &s, &dn, &t).unwrap();
                let r = check_derivation(&d3, &t);
                assert!(r.is_valid(), "{src} back via {}: {:?}", s.trace_line(), r.errors);
                assert_eq!(d3.concl.ty, ty);
            }
        }
    }

    #[test]
    fn reduction_and_expansion_preserve_types() {
        all_reducts_typed("unit (\\z. unit z) * \\x. unit x");
        all_reducts_typed("(unit (\\y. unit y) * \\x. unit x) * \\z. unit z");
        all_reducts_typed("unit (\\y. unit y) * \\x. (unit x * \\w. unit w)");
        all_reducts_typed("unit (\\y. unit y) * \\x. (unit x * \\w. unit x)");
    }

    #[test]
    fn route_types_convergent_terms() {
        let t = empty();
        let m = parse_comp("(unit (\\y. unit y) * \\x. unit x) * \\z. (unit z * \\w. unit w)").unwrap();
        let d = expansion_route(&m, 100, &t).unwrap().unwrap();
        let r = check_derivation(&d, &t);
        assert!(r.is_valid(), "{:?}", r.errors);
        assert_eq!(d.concl.ty, Type::C(t_of(VType::Omega)));
        assert!(expansion_route(&omega_c(), 100, &t).unwrap().is_none());
    }

    #[test]
    fn inversion_round_trip() {
        let t = empty();
        let u = enumerate_types(2, Some(2), &t);
        let m = parse_comp("unit (\\y. unit y) * \\x. unit x").unwrap();
        let subj = Term::Comp(m);
        let b = Basis::new();
        let ty = Type::C(t_of(VType::Omega));
        let sets = invert(&b, &subj, &ty, &u, &t);
        let mut found = false;
        for set in sets {
            let mut prem = Vec::new();
            let mut ok = true;
            for o in &set {
                if let Obligation::Judge(j) = o {
                    match derive(&j.basis, &j.subject, &j.ty, &u, &t).unwrap() {
                        Some(d) => prem.push(d),
                        None => ok = false,
                    }
                }
            }
            if ok {
                let d = reassemble(&b, &subj, &ty, &set, prem, &t).unwrap();
                assert!(check_derivation(&d, &t).is_valid());
                found = true;
            }
        }
        assert!(found);
    }
}
