//! Intersection types for values and computations, canonical forms modulo
//! the type theories, subtyping and rank-bounded enumeration.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum VType {
    Atom(Arc<str>),
    Arrow(Box<VType>, Box<CType>),
    Inter(Box<VType>, Box<VType>),
    Omega,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum CType {
    T(Box<VType>),
    Inter(Box<CType>, Box<CType>),
    Omega,
}

pub fn atom(name: &str) -> VType {
    VType::Atom(Arc::from(name))
}

pub fn arrow(d: VType, t: CType) -> VType {
    VType::Arrow(Box::new(d), Box::new(t))
}

pub fn inter_v(a: VType, b: VType) -> VType {
    VType::Inter(Box::new(a), Box::new(b))
}

pub fn inter_c(a: CType, b: CType) -> CType {
    CType::Inter(Box::new(a), Box::new(b))
}

pub fn t_of(d: VType) -> CType {
    CType::T(Box::new(d))
}

impl VType {
    /// Right-nested intersection; `Omega` for an empty list.
    pub fn meet_all(parts: Vec<VType>) -> VType {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => VType::Omega,
            Some(last) => it.fold(last, |acc, p| inter_v(p, acc)),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            VType::Atom(_) | VType::Omega => 1,
            VType::Arrow(d, t) => 1 + d.size() + t.size(),
            VType::Inter(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            VType::Atom(_) | VType::Omega => 0,
            VType::Arrow(d, t) => (d.rank() + 1).max(t.rank()),
            VType::Inter(a, b) => a.rank().max(b.rank()),
        }
    }

    pub fn atoms(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            VType::Atom(a) => {
                out.insert(a.clone());
            }
            VType::Omega => {}
            VType::Arrow(d, t) => {
                d.atoms(out);
                t.atoms(out);
            }
            VType::Inter(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }
}

impl CType {
    pub fn meet_all(parts: Vec<CType>) -> CType {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => CType::Omega,
            Some(last) => it.fold(last, |acc, p| inter_c(p, acc)),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            CType::Omega => 1,
            CType::T(d) => 1 + d.size(),
            CType::Inter(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            CType::Omega => 0,
            CType::T(d) => d.rank() + 1,
            CType::Inter(a, b) => a.rank().max(b.rank()),
        }
    }

    pub fn atoms(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            CType::Omega => {}
            CType::T(d) => d.atoms(out),
            CType::Inter(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }
}

/// A value or computation type.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Type {
    V(VType),
    C(CType),
}

impl Type {
    pub fn rank(&self) -> usize {
        match self {
            Type::V(d) => d.rank(),
            Type::C(t) => t.rank(),
        }
    }
}

// Printing: `&` binds tighter than `->`, `T` tighter than `&`.

fn fmt_v(d: &VType, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
    match d {
        VType::Omega => f.write_str("Wv"),
        VType::Atom(a) => write!(f, "@{a}"),
        VType::Inter(a, b) => {
            if prec > 1 {
                f.write_str("(")?;
            }
            fmt_v(a, f, 1)?;
            f.write_str(" & ")?;
            fmt_v(b, f, 2)?;
            if prec > 1 {
                f.write_str(")")?;
            }
            Ok(())
        }
        VType::Arrow(dom, cod) => {
            if prec > 0 {
                f.write_str("(")?;
            }
            fmt_v(dom, f, 1)?;
            f.write_str(" -> ")?;
            fmt_c(cod, f, 0)?;
            if prec > 0 {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

fn fmt_c(t: &CType, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
    match t {
        CType::Omega => f.write_str("Wc"),
        CType::T(d) => {
            f.write_str("T ")?;
            fmt_v(d, f, 2)
        }
        CType::Inter(a, b) => {
            if prec > 1 {
                f.write_str("(")?;
            }
            fmt_c(a, f, 1)?;
            f.write_str(" & ")?;
            fmt_c(b, f, 2)?;
            if prec > 1 {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for VType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_v(self, f, 0)
    }
}

impl fmt::Display for CType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_c(self, f, 0)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::V(d) => d.fmt(f),
            Type::C(t) => t.fmt(f),
        }
    }
}

/// Atom names with a preorder, kept reflexive-transitive.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct AtomTable {
    atoms: BTreeSet<Arc<str>>,
    below: BTreeSet<(Arc<str>, Arc<str>)>,
}

impl AtomTable {
    pub fn empty() -> AtomTable {
        AtomTable::default()
    }

    /// Builds the table from declared atoms and generating pairs `a <= b`.
    pub fn new(atoms: &[&str], order: &[(&str, &str)]) -> Result<AtomTable> {
        let mut t = AtomTable::default();
        for a in atoms {
            t.atoms.insert(Arc::from(*a));
        }
        for (a, b) in order {
            for x in [a, b] {
                if !t.atoms.contains(*x) {
                    return Err(Error::UnknownAtom(x.to_string()));
                }
            }
            t.below.insert((Arc::from(*a), Arc::from(*b)));
        }
        t.close();
        Ok(t)
    }

    fn close(&mut self) {
        for a in &self.atoms {
            self.below.insert((a.clone(), a.clone()));
        }
        loop {
            let mut added = Vec::new();
            for (a, b) in &self.below {
                for (c, d) in self.below.range((b.clone(), Arc::from(""))..) {
                    if c != b {
                        break;
                    }
                    if !self.below.contains(&(a.clone(), d.clone())) {
                        added.push((a.clone(), d.clone()));
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            self.below.extend(added);
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Arc<str>> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, a: &str) -> bool {
        self.atoms.contains(a)
    }

    pub fn le(&self, a: &str, b: &str) -> bool {
        a == b || self.below.contains(&(Arc::from(a), Arc::from(b)))
    }

    /// Least name among the atoms equivalent to `a`.
    pub fn representative(&self, a: &Arc<str>) -> Arc<str> {
        self.atoms
            .iter()
            .find(|b| self.le(a, b) && self.le(b, a))
            .cloned()
            .unwrap_or_else(|| a.clone())
    }

    pub fn check_v(&self, d: &VType) -> Result<()> {
        let mut s = BTreeSet::new();
        d.atoms(&mut s);
        self.check_names(s)
    }

    pub fn check_c(&self, t: &CType) -> Result<()> {
        let mut s = BTreeSet::new();
        t.atoms(&mut s);
        self.check_names(s)
    }

    fn check_names(&self, s: BTreeSet<Arc<str>>) -> Result<()> {
        match s.into_iter().find(|a| !self.atoms.contains(a)) {
            Some(a) => Err(Error::UnknownAtom(a.to_string())),
            None => Ok(()),
        }
    }

    /// Parses `@a @b` declarations and `@a <= @b` lines; `#` comments.
    pub fn parse(src: &str) -> Result<AtomTable> {
        let mut atoms: Vec<String> = Vec::new();
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (i, line) in src.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let name = |s: &str| -> Result<String> {
                let s = s.trim();
                match s.strip_prefix('@') {
                    Some(n) if !n.is_empty() && n.chars().all(|c| c.is_alphanumeric() || c == '_') => {
                        Ok(n.to_string())
                    }
                    _ => Err(crate::error::SyntaxError::new(i + 1, 1, format!("bad atom `{s}`")).into()),
                }
            };
            if let Some((a, b)) = line.split_once("<=") {
                let (a, b) = (name(a)?, name(b)?);
                atoms.push(a.clone());
                atoms.push(b.clone());
                pairs.push((a, b));
            } else {
                for w in line.split_whitespace() {
                    atoms.push(name(w)?);
                }
            }
        }
        let a: Vec<&str> = atoms.iter().map(|s| s.as_str()).collect();
        let p: Vec<(&str, &str)> = pairs.iter().map(|(x, y)| (x.as_str(), y.as_str())).collect();
        AtomTable::new(&a, &p)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum EtaMode {
    #[default]
    None,
    /// `α = ω_V -> T α`
    Scott,
    /// `α = α -> T α`
    Park,
}

impl FromStr for EtaMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<EtaMode, String> {
        match s {
            "none" => Ok(EtaMode::None),
            "scott" => Ok(EtaMode::Scott),
            "park" => Ok(EtaMode::Park),
            other => Err(format!("unknown eta mode `{other}`")),
        }
    }
}

/// Canonical value type: a meet of minimal atoms and a saturated,
/// irredundant set of arrows. The empty meet is the top type.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonV {
    atoms: Vec<Arc<str>>,
    arrows: Vec<(CanonV, CanonC)>,
}

/// Canonical computation type: either `ω_C` or a single `T`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum CanonC {
    Top,
    T(CanonV),
}

impl CanonV {
    pub fn top() -> CanonV {
        CanonV { atoms: Vec::new(), arrows: Vec::new() }
    }

    pub fn is_top(&self) -> bool {
        self.atoms.is_empty() && self.arrows.is_empty()
    }

    pub fn atoms(&self) -> &[Arc<str>] {
        &self.atoms
    }

    pub fn arrows(&self) -> &[(CanonV, CanonC)] {
        &self.arrows
    }

    pub fn members(&self) -> usize {
        self.atoms.len() + self.arrows.len()
    }

    /// Largest member count of any meet inside the type.
    pub fn width(&self) -> usize {
        self.arrows
            .iter()
            .map(|(d, t)| d.width().max(t.width()))
            .fold(self.members(), usize::max)
    }

    pub fn rank(&self) -> usize {
        self.arrows.iter().map(|(d, t)| (d.rank() + 1).max(t.rank())).max().unwrap_or(0)
    }

    pub fn to_vtype(&self) -> VType {
        let mut parts: Vec<VType> = self.atoms.iter().map(|a| VType::Atom(a.clone())).collect();
        parts.extend(self.arrows.iter().map(|(d, t)| arrow(d.to_vtype(), t.to_ctype())));
        VType::meet_all(parts)
    }

    /// The single arrow `d -> t`.
    pub fn arrow(d: CanonV, t: CanonC, table: &AtomTable) -> CanonV {
        build(Vec::new(), vec![(d, t)], table)
    }

    pub fn atom(a: &str, table: &AtomTable) -> CanonV {
        build(vec![Arc::from(a)], Vec::new(), table)
    }

    /// `⋀{t_i | d ≤ d_i}` over the arrows, `ω_C` if none qualifies.
    pub fn apply(&self, d: &CanonV, table: &AtomTable) -> CanonC {
        let mut acc = CanonC::Top;
        for (di, ti) in &self.arrows {
            if leq_cv(d, di, table) {
                acc = meet_cc(&acc, ti, table);
            }
        }
        acc
    }
}

impl CanonC {
    pub fn is_top(&self) -> bool {
        matches!(self, CanonC::Top)
    }

    pub fn rank(&self) -> usize {
        match self {
            CanonC::Top => 0,
            CanonC::T(d) => d.rank() + 1,
        }
    }

    pub fn width(&self) -> usize {
        match self {
            CanonC::Top => 0,
            CanonC::T(d) => d.width(),
        }
    }

    pub fn to_ctype(&self) -> CType {
        match self {
            CanonC::Top => CType::Omega,
            CanonC::T(d) => t_of(d.to_vtype()),
        }
    }
}

impl fmt::Display for CanonV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_vtype().fmt(f)
    }
}

impl fmt::Display for CanonC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_ctype().fmt(f)
    }
}

fn build(atoms: Vec<Arc<str>>, arrows: Vec<(CanonV, CanonC)>, table: &AtomTable) -> CanonV {
    let reps: BTreeSet<Arc<str>> = atoms.iter().map(|a| table.representative(a)).collect();
    let atoms: Vec<Arc<str>> = reps
        .iter()
        .filter(|a| !reps.iter().any(|b| b != *a && table.le(b, a)))
        .cloned()
        .collect();

    let arrows: Vec<(CanonV, CanonC)> = arrows.into_iter().filter(|(_, t)| !t.is_top()).collect();
    // saturate: each codomain becomes the meet of the codomains of all arrows whose domain is above
    let mut sat: BTreeMap<CanonV, CanonC> = BTreeMap::new();
    for (d, _) in &arrows {
        if sat.contains_key(d) {
            continue;
        }
        let mut acc = CanonC::Top;
        for (e, s) in &arrows {
            if leq_cv(d, e, table) {
                acc = meet_cc(&acc, s, table);
            }
        }
        sat.insert(d.clone(), acc);
    }
    let sat: Vec<(CanonV, CanonC)> = sat.into_iter().collect();
    let mut keep = Vec::new();
    for (i, (d, t)) in sat.iter().enumerate() {
        let mut above = CanonC::Top;
        let mut any = false;
        for (j, (e, s)) in sat.iter().enumerate() {
            if i != j && leq_cv(d, e, table) {
                above = meet_cc(&above, s, table);
                any = true;
            }
        }
        if !(any && leq_cc(&above, t, table)) {
            keep.push((d.clone(), t.clone()));
        }
    }
    keep.sort();
    CanonV { atoms, arrows: keep }
}

pub fn canon_v(d: &VType, table: &AtomTable) -> CanonV {
    let mut atoms = Vec::new();
    let mut arrows = Vec::new();
    collect_v(d, table, &mut atoms, &mut arrows);
    build(atoms, arrows, table)
}

fn collect_v(d: &VType, table: &AtomTable, atoms: &mut Vec<Arc<str>>, arrows: &mut Vec<(CanonV, CanonC)>) {
    match d {
        VType::Omega => {}
        VType::Atom(a) => atoms.push(a.clone()),
        VType::Arrow(dom, cod) => arrows.push((canon_v(dom, table), canon_c(cod, table))),
        VType::Inter(a, b) => {
            collect_v(a, table, atoms, arrows);
            collect_v(b, table, atoms, arrows);
        }
    }
}

pub fn canon_c(t: &CType, table: &AtomTable) -> CanonC {
    match t {
        CType::Omega => CanonC::Top,
        CType::T(d) => CanonC::T(canon_v(d, table)),
        CType::Inter(a, b) => meet_cc(&canon_c(a, table), &canon_c(b, table), table),
    }
}

pub fn meet_cv(a: &CanonV, b: &CanonV, table: &AtomTable) -> CanonV {
    if a.is_top() {
        return b.clone();
    }
    if b.is_top() || a == b {
        return a.clone();
    }
    let atoms = a.atoms.iter().chain(&b.atoms).cloned().collect();
    let arrows = a.arrows.iter().chain(&b.arrows).cloned().collect();
    build(atoms, arrows, table)
}

pub fn meet_cc(a: &CanonC, b: &CanonC, table: &AtomTable) -> CanonC {
    match (a, b) {
        (CanonC::Top, x) | (x, CanonC::Top) => x.clone(),
        (CanonC::T(x), CanonC::T(y)) => CanonC::T(meet_cv(x, y, table)),
    }
}

pub fn meet_all_cv<'a>(it: impl IntoIterator<Item = &'a CanonV>, table: &AtomTable) -> CanonV {
    let mut atoms = Vec::new();
    let mut arrows = Vec::new();
    for d in it {
        atoms.extend(d.atoms.iter().cloned());
        arrows.extend(d.arrows.iter().cloned());
    }
    build(atoms, arrows, table)
}

/// Subtyping on canonical value types.
pub fn leq_cv(a: &CanonV, b: &CanonV, table: &AtomTable) -> bool {
    if a == b {
        return true;
    }
    b.atoms.iter().all(|y| a.atoms.iter().any(|x| table.le(x, y)))
        && b.arrows.iter().all(|(d, t)| leq_cc(&a.apply(d, table), t, table))
}

pub fn leq_cc(a: &CanonC, b: &CanonC, table: &AtomTable) -> bool {
    match (a, b) {
        (_, CanonC::Top) => true,
        (CanonC::Top, _) => false,
        (CanonC::T(x), CanonC::T(y)) => leq_cv(x, y, table),
    }
}

/// Unfolds every atom `depth` times with its η equation.
pub fn eta_unfold_v(d: &VType, mode: EtaMode, depth: usize) -> VType {
    match d {
        VType::Omega => VType::Omega,
        VType::Atom(_) => unfold_atom(d, mode, depth),
        VType::Arrow(a, t) => arrow(eta_unfold_v(a, mode, depth), eta_unfold_c(t, mode, depth)),
        VType::Inter(a, b) => inter_v(eta_unfold_v(a, mode, depth), eta_unfold_v(b, mode, depth)),
    }
}

pub fn eta_unfold_c(t: &CType, mode: EtaMode, depth: usize) -> CType {
    match t {
        CType::Omega => CType::Omega,
        CType::T(d) => t_of(eta_unfold_v(d, mode, depth)),
        CType::Inter(a, b) => inter_c(eta_unfold_c(a, mode, depth), eta_unfold_c(b, mode, depth)),
    }
}

fn unfold_atom(a: &VType, mode: EtaMode, depth: usize) -> VType {
    if depth == 0 {
        return a.clone();
    }
    let inner = unfold_atom(a, mode, depth - 1);
    match mode {
        EtaMode::None => a.clone(),
        EtaMode::Scott => inter_v(a.clone(), arrow(VType::Omega, t_of(inner))),
        EtaMode::Park => inter_v(a.clone(), arrow(inner.clone(), t_of(inner))),
    }
}

/// Decides `a ≤_V b`.
pub fn leq_v(a: &VType, b: &VType, table: &AtomTable) -> Result<bool> {
    table.check_v(a)?;
    table.check_v(b)?;
    Ok(leq_cv(&canon_v(a, table), &canon_v(b, table), table))
}

/// Decides `a ≤_C b`.
pub fn leq_c(a: &CType, b: &CType, table: &AtomTable) -> Result<bool> {
    table.check_c(a)?;
    table.check_c(b)?;
    Ok(leq_cc(&canon_c(a, table), &canon_c(b, table), table))
}

pub fn eq_v(a: &VType, b: &VType, table: &AtomTable) -> Result<bool> {
    Ok(leq_v(a, b, table)? && leq_v(b, a, table)?)
}

pub fn eq_c(a: &CType, b: &CType, table: &AtomTable) -> Result<bool> {
    Ok(leq_c(a, b, table)? && leq_c(b, a, table)?)
}

/// `≤_V` in the extensional theory: sound, possibly incomplete.
pub fn leq_v_eta(a: &VType, b: &VType, table: &AtomTable, mode: EtaMode, depth: usize) -> Result<bool> {
    if leq_v(a, b, table)? {
        return Ok(true);
    }
    if mode == EtaMode::None {
        return Ok(false);
    }
    let ua = eta_unfold_v(a, mode, depth);
    Ok(leq_v(&ua, b, table)? || leq_v(&ua, &eta_unfold_v(b, mode, depth), table)?)
}

pub fn leq_c_eta(a: &CType, b: &CType, table: &AtomTable, mode: EtaMode, depth: usize) -> Result<bool> {
    if leq_c(a, b, table)? {
        return Ok(true);
    }
    if mode == EtaMode::None {
        return Ok(false);
    }
    let ua = eta_unfold_c(a, mode, depth);
    Ok(leq_c(&ua, b, table)? || leq_c(&ua, &eta_unfold_c(b, mode, depth), table)?)
}

pub fn normalize_vtype(d: &VType, table: &AtomTable) -> CanonV {
    canon_v(d, table)
}

pub fn normalize_ctype(t: &CType, table: &AtomTable) -> CanonC {
    canon_c(t, table)
}

/// Canonical types of bounded rank and width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeUniverse {
    pub rank: usize,
    pub width: Option<usize>,
    pub values: Vec<CanonV>,
    pub comps: Vec<CanonC>,
}

impl TypeUniverse {
    pub fn contains_v(&self, d: &CanonV) -> bool {
        self.values.binary_search(d).is_ok()
    }

    pub fn contains_c(&self, t: &CanonC) -> bool {
        self.comps.binary_search(t).is_ok()
    }
}

/// Every canonical class of rank `<= rank` whose meets have at most
/// `width` members, once each. `None` means no width bound.
pub fn enumerate_types(rank: usize, width: Option<usize>, table: &AtomTable) -> TypeUniverse {
    let w = width.unwrap_or(usize::MAX);
    let atoms: Vec<CanonV> = table.atoms().map(|a| CanonV::atom(a, table)).collect();
    let mut values = closure(&atoms, w, table);
    for _ in 1..=rank {
        let comps: Vec<CanonC> = values.iter().map(|d| CanonC::T(d.clone())).collect();
        let mut parts = atoms.clone();
        for d in &values {
            for t in &comps {
                parts.push(CanonV::arrow(d.clone(), t.clone(), table));
            }
        }
        values = closure(&parts, w, table);
    }
    let mut comps: Vec<CanonC> = vec![CanonC::Top];
    if rank > 0 {
        let lower = enumerate_types(rank - 1, width, table);
        comps.extend(lower.values.into_iter().map(CanonC::T));
    }
    comps.sort();
    TypeUniverse { rank, width, values, comps }
}

/// Canonical meets of at most `w` members drawn from `parts`.
fn closure(parts: &[CanonV], w: usize, table: &AtomTable) -> Vec<CanonV> {
    let mut out: BTreeSet<CanonV> = BTreeSet::new();
    out.insert(CanonV::top());
    if w == usize::MAX {
        // the meet-closure: grow until stable
        let mut frontier: Vec<CanonV> = vec![CanonV::top()];
        while let Some(x) = frontier.pop() {
            for p in parts {
                let m = meet_cv(&x, p, table);
                if out.insert(m.clone()) {
                    frontier.push(m);
                }
            }
        }
        return out.into_iter().collect();
    }
    let mut layer: Vec<(usize, CanonV)> = vec![(0, CanonV::top())];
    for _ in 0..w {
        let mut next = Vec::new();
        for (start, x) in &layer {
            for (i, p) in parts.iter().enumerate().skip(*start) {
                let m = meet_cv(x, p, table);
                next.push((i + 1, m));
            }
        }
        for (_, m) in &next {
            if m.width() <= w {
                out.insert(m.clone());
            }
        }
        layer = next;
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> AtomTable {
        AtomTable::empty()
    }

    #[test]
    fn ranks() {
        assert_eq!(VType::Omega.rank(), 0);
        assert_eq!(t_of(VType::Omega).rank(), 1);
        let d = arrow(arrow(VType::Omega, CType::Omega), t_of(VType::Omega));
        assert_eq!(d.rank(), 2);
    }

    #[test]
    fn omega_arrow_is_top() {
        assert!(canon_v(&arrow(VType::Omega, CType::Omega), &t()).is_top());
        let d = arrow(t_of_arrow(), CType::Omega);
        assert!(canon_v(&d, &t()).is_top());
        assert!(eq_v(&VType::Omega, &arrow(VType::Omega, CType::Omega), &t()).unwrap());
    }

    fn t_of_arrow() -> VType {
        arrow(VType::Omega, t_of(VType::Omega))
    }

    #[test]
    fn t_meets_merge() {
        let tbl = AtomTable::new(&["a", "b"], &[]).unwrap();
        let x = inter_c(t_of(atom("a")), t_of(atom("b")));
        let y = t_of(inter_v(atom("a"), atom("b")));
        assert_eq!(canon_c(&x, &tbl), canon_c(&y, &tbl));
        assert!(eq_c(&x, &y, &tbl).unwrap());
    }

    #[test]
    fn arrow_meet_distributes() {
        let tbl = AtomTable::new(&["a", "b", "c"], &[]).unwrap();
        let l = inter_v(arrow(atom("a"), t_of(atom("b"))), arrow(atom("a"), t_of(atom("c"))));
        let r = arrow(atom("a"), inter_c(t_of(atom("b")), t_of(atom("c"))));
        assert!(leq_v(&l, &r, &tbl).unwrap());
        assert!(leq_v(&r, &l, &tbl).unwrap());
    }

    #[test]
    fn omega_c_not_below_t() {
        assert!(!leq_c(&CType::Omega, &t_of(VType::Omega), &t()).unwrap());
        assert!(leq_c(&t_of(VType::Omega), &CType::Omega, &t()).unwrap());
        assert!(!eq_c(&t_of(VType::Omega), &CType::Omega, &t()).unwrap());
    }

    #[test]
    fn unknown_atom() {
        assert!(matches!(leq_v(&atom("q"), &VType::Omega, &t()), Err(Error::UnknownAtom(_))));
    }

    #[test]
    fn table_closure() {
        let tbl = AtomTable::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        assert!(tbl.le("a", "c"));
        assert!(!tbl.le("c", "a"));
        assert!(leq_v(&atom("a"), &atom("c"), &tbl).unwrap());
        let parsed = AtomTable::parse("@a @b @c\n@a <= @b # x\n@b <= @c\n").unwrap();
        assert_eq!(parsed, tbl);
    }

    #[test]
    fn enumeration_small() {
        let u0 = enumerate_types(0, Some(1), &t());
        assert_eq!(u0.values, vec![CanonV::top()]);
        assert_eq!(u0.comps, vec![CanonC::Top]);
        let u1 = enumerate_types(1, Some(1), &t());
        let c = canon_v(&t_of_arrow(), &t());
        assert!(u1.contains_v(&c));
        assert_eq!(u1.values.len(), 2);
        assert_eq!(u1.comps.len(), 2);
        let u2 = enumerate_types(2, None, &t());
        assert_eq!(u2.values.len(), 6);
        for d in &u2.values {
            assert_eq!(&canon_v(&d.to_vtype(), &t()), d);
        }
    }

    #[test]
    fn printing() {
        let d = arrow(inter_v(atom("a"), VType::Omega), inter_c(t_of(atom("b")), CType::Omega));
        assert_eq!(d.to_string(), "@a & Wv -> T @b & Wc");
        let e = arrow(arrow(VType::Omega, CType::Omega), t_of(arrow(VType::Omega, CType::Omega)));
        assert_eq!(e.to_string(), "(Wv -> Wc) -> T (Wv -> Wc)");
    }

    #[test]
    fn eta_modes_are_sound_extensions() {
        let tbl = AtomTable::new(&["a"], &[]).unwrap();
        // a <= Wv -> T a holds only with the Scott equation
        let r = arrow(VType::Omega, t_of(atom("a")));
        assert!(!leq_v_eta(&atom("a"), &r, &tbl, EtaMode::None, 2).unwrap());
        assert!(leq_v_eta(&atom("a"), &r, &tbl, EtaMode::Scott, 2).unwrap());
    }
}
