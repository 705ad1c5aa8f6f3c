//! Finite-rank filter domains.
//!
//! In a finite lattice every filter is principal, so an element of `D_n`
//! (or `TD_n`) is stored as its generator: the canonical meet of all the
//! rank-`n` types it contains. Filter inclusion is reverse subtyping of
//! generators: `d ⊑ e` iff `gen(e) <= gen(d)`. The bottom of each side is
//! the `ω` class.
//!
//! The interpreter is rank-indexed: at rank `n` an abstraction is the meet
//! of `δ -> [[M]]_n[x:=δ]` over the rank `n-1` values `δ`, `unit` is
//! `T(π_{n-1} d)` and bind applies the function generator to the
//! argument's generator.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::term::{Comp, Value, Var};
use crate::types::{
    canon_c, canon_v, leq_cc, leq_cv, meet_cv, AtomTable, CanonC, CanonV, Type,
};

/// Default bound on the number of elements of a value lattice.
pub const DEFAULT_DOMAIN_CAP: usize = 20_000;

/// The value and computation lattices of one rank.
#[derive(Clone, Debug)]
pub struct Level {
    pub values: Vec<CanonV>,
    pub comps: Vec<CanonC>,
    /// `value_leq[i * len + j]` iff `values[i] <= values[j]`.
    value_leq: Vec<bool>,
    comp_leq: Vec<bool>,
}

impl Level {
    fn new(values: Vec<CanonV>, comps: Vec<CanonC>, table: &AtomTable) -> Level {
        let value_leq =
            values.iter().flat_map(|a| values.iter().map(move |b| (a, b))).map(|(a, b)| leq_cv(a, b, table)).collect();
        let comp_leq =
            comps.iter().flat_map(|a| comps.iter().map(move |b| (a, b))).map(|(a, b)| leq_cc(a, b, table)).collect();
        Level { values, comps, value_leq, comp_leq }
    }

    pub fn value_index(&self, d: &CanonV) -> Option<usize> {
        self.values.binary_search(d).ok()
    }

    pub fn comp_index(&self, t: &CanonC) -> Option<usize> {
        self.comps.binary_search(t).ok()
    }

    /// Subtyping between value elements by index.
    pub fn value_le(&self, i: usize, j: usize) -> bool {
        self.value_leq[i * self.values.len() + j]
    }

    pub fn comp_le(&self, i: usize, j: usize) -> bool {
        self.comp_leq[i * self.comps.len() + j]
    }
}

/// The domains `D_0 .. D_n` with their computation sides.
#[derive(Clone, Debug)]
pub struct RankDomain {
    pub n: usize,
    pub table: AtomTable,
    pub levels: Vec<Level>,
}

/// Environment for the interpreter: generators of value elements.
pub type EnvN = BTreeMap<Var, CanonV>;

pub fn build_domain(n: usize, table: &AtomTable) -> Result<RankDomain> {
    build_domain_capped(n, table, DEFAULT_DOMAIN_CAP)
}

/// Builds the lattices rank by rank, failing once a value side would
/// exceed `cap` elements.
pub fn build_domain_capped(n: usize, table: &AtomTable, cap: usize) -> Result<RankDomain> {
    let atoms: Vec<CanonV> = table.atoms().map(|a| CanonV::atom(a, table)).collect();
    let mut levels: Vec<Level> = Vec::new();
    for k in 0..=n {
        let mut parts = atoms.clone();
        let mut comps = vec![CanonC::Top];
        if let Some(prev) = levels.last() {
            comps.extend(prev.values.iter().cloned().map(CanonC::T));
            for d in &prev.values {
                for g in &prev.values {
                    let a = CanonV::arrow(d.clone(), CanonC::T(g.clone()), table);
                    if !a.is_top() {
                        parts.push(a);
                    }
                }
            }
        }
        parts.sort();
        parts.dedup();
        comps.sort();
        let values = meet_closure(&parts, cap, table).ok_or(Error::DomainTooLarge { rank: k, limit: cap })?;
        levels.push(Level::new(values, comps, table));
    }
    Ok(RankDomain { n, table: table.clone(), levels })
}

fn meet_closure(parts: &[CanonV], cap: usize, table: &AtomTable) -> Option<Vec<CanonV>> {
    let mut out: BTreeSet<CanonV> = BTreeSet::new();
    out.insert(CanonV::top());
    let mut frontier = vec![CanonV::top()];
    while let Some(x) = frontier.pop() {
        for p in parts {
            let m = meet_cv(&x, p, table);
            if out.insert(m.clone()) {
                if out.len() > cap {
                    return None;
                }
                frontier.push(m);
            }
        }
    }
    Some(out.into_iter().collect())
}

impl RankDomain {
    pub fn top_level(&self) -> &Level {
        &self.levels[self.n]
    }

    pub fn level(&self, k: usize) -> &Level {
        &self.levels[k]
    }

    /// `π_k`: the strongest rank-`k` consequence of `d`.
    pub fn project_v(&self, d: &CanonV, k: usize) -> CanonV {
        let lvl = &self.levels[k];
        if lvl.value_index(d).is_some() {
            return d.clone();
        }
        let mut acc = CanonV::top();
        for g in &lvl.values {
            if leq_cv(d, g, &self.table) {
                acc = meet_cv(&acc, g, &self.table);
            }
        }
        acc
    }

    pub fn project_c(&self, t: &CanonC, k: usize) -> CanonC {
        match t {
            CanonC::Top => CanonC::Top,
            CanonC::T(_) if k == 0 => CanonC::Top,
            CanonC::T(g) => CanonC::T(self.project_v(g, k - 1)),
        }
    }

    /// `ε_k`: generators are kept; the filter they generate at the higher
    /// rank is larger as a set.
    pub fn embed_v(&self, d: &CanonV) -> CanonV {
        d.clone()
    }

    pub fn embed_c(&self, t: &CanonC) -> CanonC {
        t.clone()
    }

    /// `unit` at rank `k`.
    pub fn unit_at(&self, d: &CanonV, k: usize) -> CanonC {
        if k == 0 {
            CanonC::Top
        } else {
            CanonC::T(self.project_v(d, k - 1))
        }
    }

    pub fn unit_f(&self, d: &CanonV) -> CanonC {
        self.unit_at(d, self.n)
    }

    /// `t ⋆ e`: the meet of the codomains of the arrows of `e` whose
    /// domain the content of `t` reaches.
    pub fn bind_f(&self, t: &CanonC, e: &CanonV) -> CanonC {
        match t {
            CanonC::Top => CanonC::Top,
            CanonC::T(g) => e.apply(g, &self.table),
        }
    }

    /// `u · d`.
    pub fn apply_f(&self, u: &CanonV, d: &CanonV) -> CanonC {
        u.apply(d, &self.table)
    }

    /// `Ψ`: a monotone table on the rank-`k` values (`k < n`) becomes a
    /// rank-`k+1` value.
    pub fn psi_f(&self, k: usize, f: &[CanonC]) -> Result<CanonV> {
        let lvl = &self.levels[k];
        if f.len() != lvl.values.len() {
            return Err(Error::NotMonotone);
        }
        for i in 0..f.len() {
            for j in 0..f.len() {
                if lvl.value_le(i, j) && !leq_cc(&f[i], &f[j], &self.table) {
                    return Err(Error::NotMonotone);
                }
            }
        }
        let mut acc = CanonV::top();
        for (d, t) in lvl.values.iter().zip(f) {
            acc = meet_cv(&acc, &CanonV::arrow(d.clone(), t.clone(), &self.table), &self.table);
        }
        Ok(acc)
    }

    /// `Φ`: the table `d ↦ u · d` on the rank-`k` values.
    pub fn phi_f(&self, k: usize, u: &CanonV) -> Vec<CanonC> {
        self.levels[k].values.iter().map(|d| u.apply(d, &self.table)).collect()
    }

    /// The function element `λd. f d ⋆ g` of rank `k+1` used by the third monad law.
    pub fn kleisli(&self, k: usize, f: &CanonV, g: &CanonV) -> CanonV {
        let table: Vec<CanonC> =
            self.levels[k].values.iter().map(|d| self.bind_f(&self.apply_f(f, d), g)).collect();
        self.psi_f(k, &table).expect("composite of monotone maps")
    }

    /// `Ψ(unit)` at rank `k+1`.
    pub fn unit_fn(&self, k: usize) -> CanonV {
        let table: Vec<CanonC> = self.levels[k].values.iter().map(|d| self.unit_at(d, k + 1)).collect();
        self.psi_f(k, &table).expect("unit is monotone")
    }

    /// Elements of the top level whose generator is below `sigma`.
    pub fn type_elems(&self, sigma: &Type) -> Result<Vec<Type>> {
        let r = sigma.rank();
        if r > self.n {
            return Err(Error::RankOverflow { found: r, limit: self.n });
        }
        let lvl = self.top_level();
        Ok(match sigma {
            Type::V(d) => {
                let c = canon_v(d, &self.table);
                lvl.values.iter().filter(|g| leq_cv(g, &c, &self.table)).map(|g| Type::V(g.to_vtype())).collect()
            }
            Type::C(t) => {
                let c = canon_c(t, &self.table);
                lvl.comps.iter().filter(|g| leq_cc(g, &c, &self.table)).map(|g| Type::C(g.to_ctype())).collect()
            }
        })
    }

    /// Interpretation of a value at the top rank.
    pub fn interp_value(&self, v: &Value, env: &EnvN) -> Result<CanonV> {
        Interp::new(self).value(v, env, self.n)
    }

    pub fn interp_comp(&self, m: &Comp, env: &EnvN) -> Result<CanonC> {
        Interp::new(self).comp(m, env, self.n)
    }

    /// The Hasse diagrams of both sides of the top level in DOT syntax.
    pub fn to_dot(&self) -> String {
        let lvl = self.top_level();
        let mut out = String::from("digraph rank {\n  rankdir=BT;\n");
        let nv = lvl.values.len();
        for (i, d) in lvl.values.iter().enumerate() {
            let _ = writeln!(out, "  v{i} [label=\"{}\"];", d.to_vtype());
        }
        for (i, t) in lvl.comps.iter().enumerate() {
            let _ = writeln!(out, "  c{i} [label=\"{}\"];", t.to_ctype());
        }
        // an edge from the weaker filter (larger type) to the covering stronger one
        let covers = |le: &dyn Fn(usize, usize) -> bool, len: usize, prefix: &str, out: &mut String| {
            for i in 0..len {
                for j in 0..len {
                    if i == j || !le(i, j) || le(j, i) {
                        continue;
                    }
                    let between = (0..len).any(|k| k != i && k != j && le(i, k) && le(k, j) && !le(k, i) && !le(j, k));
                    if !between {
                        let _ = writeln!(out, "  {prefix}{j} -> {prefix}{i};");
                    }
                }
            }
        };
        covers(&|i, j| lvl.value_le(i, j), nv, "v", &mut out);
        covers(&|i, j| lvl.comp_le(i, j), lvl.comps.len(), "c", &mut out);
        out.push_str("}\n");
        out
    }
}

struct Interp<'a> {
    dom: &'a RankDomain,
    memo: HashMap<(usize, usize, Vec<(Var, CanonV)>), CanonC>,
}

impl<'a> Interp<'a> {
    fn new(dom: &'a RankDomain) -> Interp<'a> {
        Interp { dom, memo: HashMap::new() }
    }

    fn value(&mut self, v: &Value, env: &EnvN, k: usize) -> Result<CanonV> {
        match v {
            Value::Var(x) => {
                let d = env.get(x).ok_or_else(|| Error::Unbound(x.to_string()))?;
                Ok(self.dom.project_v(d, k))
            }
            Value::Lam(_, _) if k == 0 => {
                let fv = v.free_vars();
                if let Some(x) = fv.iter().find(|x| !env.contains_key(*x)) {
                    return Err(Error::Unbound(x.to_string()));
                }
                Ok(CanonV::top())
            }
            Value::Lam(x, body) => {
                let table = &self.dom.table;
                let mut acc = CanonV::top();
                let mut env2 = env.clone();
                for d in &self.dom.levels[k - 1].values {
                    env2.insert(x.clone(), d.clone());
                    let t = self.comp(body, &env2, k)?;
                    acc = meet_cv(&acc, &CanonV::arrow(d.clone(), t, table), table);
                }
                Ok(acc)
            }
        }
    }

    fn comp(&mut self, m: &Comp, env: &EnvN, k: usize) -> Result<CanonC> {
        let fv = m.free_vars();
        let key_env: Vec<(Var, CanonV)> =
            fv.iter().filter_map(|x| env.get(x).map(|d| (x.clone(), d.clone()))).collect();
        let key = (m as *const Comp as usize, k, key_env);
        if let Some(t) = self.memo.get(&key) {
            return Ok(t.clone());
        }
        let t = match m {
            Comp::Unit(v) => {
                let d = self.value(v, env, k)?;
                self.dom.unit_at(&d, k)
            }
            Comp::Bind(l, v) => {
                let t = self.comp(l, env, k)?;
                let e = self.value(v, env, k)?;
                self.dom.bind_f(&t, &e)
            }
        };
        self.memo.insert(key, t.clone());
        Ok(t)
    }
}

/// Interpretation of a closed computation at rank `k <= dom.n`.
pub fn interp_closed(dom: &RankDomain, m: &Comp, k: usize) -> Result<CanonC> {
    Interp::new(dom).comp(m, &EnvN::new(), k)
}

pub fn interp_value_at(dom: &RankDomain, v: &Value, env: &EnvN, k: usize) -> Result<CanonV> {
    Interp::new(dom).value(v, env, k)
}

pub fn interp_comp_at(dom: &RankDomain, m: &Comp, env: &EnvN, k: usize) -> Result<CanonC> {
    Interp::new(dom).comp(m, env, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_comp;
    use crate::term::omega_c;

    #[test]
    fn small_levels() {
        let t = AtomTable::empty();
        let d = build_domain(2, &t).unwrap();
        assert_eq!(d.level(0).values, vec![CanonV::top()]);
        assert_eq!(d.level(0).comps, vec![CanonC::Top]);
        assert_eq!(d.level(1).comps.len(), 2);
        assert_eq!(d.level(2).values.len(), 6);
        assert_eq!(d.level(2).comps.len(), 3);
    }

    #[test]
    fn identity_bind_is_sound_at_rank_one() {
        let t = AtomTable::empty();
        let d = build_domain(1, &t).unwrap();
        let m = parse_comp("unit (\\y. unit y) * \\x. unit x").unwrap();
        let n = parse_comp("unit (\\y. unit y)").unwrap();
        assert_eq!(interp_closed(&d, &m, 1).unwrap(), interp_closed(&d, &n, 1).unwrap());
        assert!(!interp_closed(&d, &n, 1).unwrap().is_top());
    }

    #[test]
    fn omega_is_bottom() {
        let t = AtomTable::empty();
        let d = build_domain(2, &t).unwrap();
        for k in 0..=2 {
            assert!(interp_closed(&d, &omega_c(), k).unwrap().is_top());
        }
    }

    #[test]
    fn too_large() {
        let t = AtomTable::new(&["a", "b"], &[]).unwrap();
        assert!(matches!(build_domain_capped(2, &t, 500), Err(Error::DomainTooLarge { rank: 2, .. })));
    }

    #[test]
    fn dot_output() {
        let d = build_domain(1, &AtomTable::empty()).unwrap();
        let s = d.to_dot();
        assert!(s.starts_with("digraph"));
        assert!(s.contains("c1 -> c0") || s.contains("c0 -> c1"));
    }
}
