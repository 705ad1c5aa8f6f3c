//! Brute-force subtyping oracle: bounded search for cut-free derivations
//! working on syntax trees, independent of the canonical forms.
//!
//! Sequents have a list of types on the left (read as their meet) and a
//! single type on the right. Every rule strictly shrinks the total size
//! of the sequent, so a search of height `size(a) + size(b)` is exhaustive.

use crate::types::{AtomTable, CType, VType};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Res {
    Yes,
    No,
    /// Ran out of depth somewhere.
    Cut,
}

impl Res {
    fn or(self, other: impl FnOnce() -> Res) -> Res {
        match self {
            Res::Yes => Res::Yes,
            r => match other() {
                Res::Yes => Res::Yes,
                Res::Cut => Res::Cut,
                Res::No => r,
            },
        }
    }

    fn and(self, other: impl FnOnce() -> Res) -> Res {
        match self {
            Res::No => Res::No,
            r => match other() {
                Res::No => Res::No,
                Res::Cut => Res::Cut,
                Res::Yes => r,
            },
        }
    }
}

fn flatten_v<'a>(ds: &[&'a VType], out: &mut Vec<&'a VType>) {
    for d in ds {
        match d {
            VType::Inter(a, b) => flatten_v(&[a, b], out),
            VType::Omega => {}
            other => out.push(other),
        }
    }
}

fn flatten_c<'a>(ts: &[&'a CType], out: &mut Vec<&'a CType>) {
    for t in ts {
        match t {
            CType::Inter(a, b) => flatten_c(&[a, b], out),
            CType::Omega => {}
            other => out.push(other),
        }
    }
}

fn seq_v(left: &[&VType], right: &VType, depth: usize, table: &AtomTable) -> Res {
    if depth == 0 {
        return Res::Cut;
    }
    match right {
        VType::Omega => Res::Yes,
        VType::Inter(a, b) => {
            seq_v(left, a, depth - 1, table).and(|| seq_v(left, b, depth - 1, table))
        }
        VType::Atom(b) => {
            let mut flat = Vec::new();
            flatten_v(left, &mut flat);
            let hit = flat.iter().any(|d| matches!(d, VType::Atom(a) if table.le(a, b)));
            if hit {
                Res::Yes
            } else {
                Res::No
            }
        }
        VType::Arrow(d, t) => {
            // ω_V ≤ ω_V → ω_C ≤ d → t whenever t is trivial
            let trivial = seq_c(&[], t, depth - 1, table);
            trivial.or(|| {
                let mut flat = Vec::new();
                flatten_v(left, &mut flat);
                let arrows: Vec<(&VType, &CType)> = flat
                    .iter()
                    .filter_map(|x| match x {
                        VType::Arrow(a, b) => Some((&**a, &**b)),
                        _ => None,
                    })
                    .collect();
                // try every nonempty subset whose domains all lie above d
                let n = arrows.len().min(12);
                let mut acc = Res::No;
                for mask in 1u32..(1u32 << n) {
                    let chosen: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                    let r = chosen
                        .iter()
                        .fold(Res::Yes, |r, &i| r.and(|| seq_v(&[d], arrows[i].0, depth - 1, table)))
                        .and(|| {
                            let cods: Vec<&CType> = chosen.iter().map(|&i| arrows[i].1).collect();
                            seq_c(&cods, t, depth - 1, table)
                        });
                    acc = acc.or(|| r);
                    if acc == Res::Yes {
                        break;
                    }
                }
                acc
            })
        }
    }
}

fn seq_c(left: &[&CType], right: &CType, depth: usize, table: &AtomTable) -> Res {
    if depth == 0 {
        return Res::Cut;
    }
    match right {
        CType::Omega => Res::Yes,
        CType::Inter(a, b) => {
            seq_c(left, a, depth - 1, table).and(|| seq_c(left, b, depth - 1, table))
        }
        CType::T(b) => {
            let mut flat = Vec::new();
            flatten_c(left, &mut flat);
            let inner: Vec<&VType> = flat
                .iter()
                .filter_map(|x| match x {
                    CType::T(a) => Some(&**a),
                    _ => None,
                })
                .collect();
            let n = inner.len().min(12);
            let mut acc = Res::No;
            // T δ1 ∧ ... ∧ T δk ≤ T(δ1 ∧ ... ∧ δk), then covariance
            for mask in 1u32..(1u32 << n) {
                let chosen: Vec<&VType> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| inner[i]).collect();
                acc = acc.or(|| seq_v(&chosen, b, depth - 1, table));
                if acc == Res::Yes {
                    break;
                }
            }
            acc
        }
    }
}

/// `Some(true)` if a derivation of height at most `depth` exists,
/// `Some(false)` if the exhaustive search fails, `None` if the depth
/// bound cut the search short.
pub fn brute_subtype_oracle(a: &VType, b: &VType, depth: usize, table: &AtomTable) -> Option<bool> {
    verdict(seq_v(&[a], b, depth, table))
}

pub fn brute_subtype_oracle_c(a: &CType, b: &CType, depth: usize, table: &AtomTable) -> Option<bool> {
    verdict(seq_c(&[a], b, depth, table))
}

/// Depth at which the search is exhaustive for the pair.
pub fn completeness_bound_v(a: &VType, b: &VType) -> usize {
    a.size() + b.size() + 1
}

pub fn completeness_bound_c(a: &CType, b: &CType) -> usize {
    a.size() + b.size() + 1
}

fn verdict(r: Res) -> Option<bool> {
    match r {
        Res::Yes => Some(true),
        Res::No => Some(false),
        Res::Cut => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{arrow, atom, inter_c, inter_v, t_of};

    #[test]
    fn axioms() {
        let t = AtomTable::empty();
        let top_arrow = arrow(VType::Omega, CType::Omega);
        assert_eq!(brute_subtype_oracle(&VType::Omega, &top_arrow, 2, &t), Some(true));
        let b = completeness_bound_c(&CType::Omega, &t_of(VType::Omega));
        assert_eq!(brute_subtype_oracle_c(&CType::Omega, &t_of(VType::Omega), b, &t), Some(false));
        assert_eq!(brute_subtype_oracle_c(&CType::Omega, &t_of(VType::Omega), 0, &t), None);
    }

    #[test]
    fn reflexivity() {
        let t = AtomTable::new(&["a", "b"], &[]).unwrap();
        let d = arrow(inter_v(atom("a"), atom("b")), inter_c(t_of(atom("a")), CType::Omega));
        assert_eq!(brute_subtype_oracle(&d, &d, completeness_bound_v(&d, &d), &t), Some(true));
    }

    #[test]
    fn distribution() {
        let t = AtomTable::new(&["a", "b", "c"], &[]).unwrap();
        let l = inter_v(arrow(atom("a"), t_of(atom("b"))), arrow(atom("a"), t_of(atom("c"))));
        let r = arrow(atom("a"), t_of(inter_v(atom("b"), atom("c"))));
        assert_eq!(brute_subtype_oracle(&l, &r, completeness_bound_v(&l, &r), &t), Some(true));
        assert_eq!(brute_subtype_oracle(&r, &l, completeness_bound_v(&r, &l), &t), Some(true));
        let wrong = arrow(atom("b"), t_of(atom("b")));
        assert_eq!(brute_subtype_oracle(&l, &wrong, completeness_bound_v(&l, &wrong), &t), Some(false));
    }
}
