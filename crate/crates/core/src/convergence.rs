//! Big-step convergence for closed computations and the small-step check.

use std::collections::HashSet;
use std::fmt;

use crate::reduction::{first_step, Rules};
use crate::term::{Comp, NlComp, Value, Var};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EvalOutcome {
    Converges(Value),
    FuelExhausted { steps: usize },
    /// A configuration repeated up to renaming, so evaluation never terminates.
    Diverges { steps: usize },
    OpenTermError(Vec<Var>),
}

impl EvalOutcome {
    pub fn value(&self) -> Option<&Value> {
        match self {
            EvalOutcome::Converges(v) => Some(v),
            _ => None,
        }
    }

    pub fn converges(&self) -> bool {
        matches!(self, EvalOutcome::Converges(_))
    }

    /// Both sides converge to α-equal values, or neither converges.
    pub fn agrees_with(&self, other: &EvalOutcome) -> bool {
        match (self.value(), other.value()) {
            (Some(a), Some(b)) => a.alpha_eq(b),
            (None, None) => true,
            _ => false,
        }
    }
}

impl fmt::Display for EvalOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalOutcome::Converges(v) => write!(f, "converges: {v}"),
            EvalOutcome::FuelExhausted { steps } => write!(f, "fuel-exhausted after {steps}"),
            EvalOutcome::Diverges { steps } => write!(f, "diverges: cycle detected after {steps}"),
            EvalOutcome::OpenTermError(xs) => {
                let names: Vec<&str> = xs.iter().map(|x| x.as_str()).collect();
                write!(f, "open term: free variables {}", names.join(", "))
            }
        }
    }
}

fn open_check(m: &Comp) -> Option<EvalOutcome> {
    let fv = m.free_vars();
    if fv.is_empty() {
        None
    } else {
        Some(EvalOutcome::OpenTermError(fv.into_iter().collect()))
    }
}

/// Evaluates by the two big-step rules. `fuel` bounds the number of rule
/// applications in the derivation; cycle detection is on.
pub fn big_step(m: &Comp, fuel: usize) -> EvalOutcome {
    big_step_with(m, fuel, true)
}

pub fn big_step_with(m: &Comp, fuel: usize, detect_cycles: bool) -> EvalOutcome {
    if let Some(e) = open_check(m) {
        return e;
    }
    // Pending continuations `λx.N` of enclosing binds, innermost last.
    let mut frames: Vec<(Var, Comp)> = Vec::new();
    let mut seen: HashSet<(NlComp, usize)> = HashSet::new();
    let mut cur = m.clone();
    let mut steps = 0usize;
    loop {
        if detect_cycles && !seen.insert((plug(&cur, &frames).nameless(), frames.len())) {
            return EvalOutcome::Diverges { steps };
        }
        if steps >= fuel {
            return EvalOutcome::FuelExhausted { steps };
        }
        steps += 1;
        match cur {
            Comp::Unit(v) => match frames.pop() {
                None => return EvalOutcome::Converges(*v),
                Some((x, body)) => cur = body.subst(&x, &v),
            },
            Comp::Bind(l, v) => match *v {
                Value::Lam(x, body) => {
                    frames.push((x, *body));
                    cur = *l;
                }
                // unreachable for closed terms
                Value::Var(x) => return EvalOutcome::OpenTermError(vec![x]),
            },
        }
    }
}

fn plug(m: &Comp, frames: &[(Var, Comp)]) -> Comp {
    let mut out = m.clone();
    for (x, body) in frames.iter().rev() {
        out = Comp::Bind(Box::new(out), Box::new(Value::Lam(x.clone(), Box::new(body.clone()))));
    }
    out
}

/// Reduces leftmost-outermost until the term has the shape `unit V`.
pub fn small_step_converge(m: &Comp, fuel: usize) -> EvalOutcome {
    small_step_converge_with(m, fuel, true)
}

pub fn small_step_converge_with(m: &Comp, fuel: usize, detect_cycles: bool) -> EvalOutcome {
    if let Some(e) = open_check(m) {
        return e;
    }
    let mut seen: HashSet<NlComp> = HashSet::new();
    let mut cur = m.clone();
    let mut steps = 0usize;
    loop {
        if let Comp::Unit(v) = cur {
            return EvalOutcome::Converges(*v);
        }
        if detect_cycles && !seen.insert(cur.nameless()) {
            return EvalOutcome::Diverges { steps };
        }
        if steps >= fuel {
            return EvalOutcome::FuelExhausted { steps };
        }
        match first_step(&cur, Rules::LAMBDA_C) {
            Some(s) => cur = s.result,
            // a closed non-unit computation always has a redex
            None => return EvalOutcome::FuelExhausted { steps },
        }
        steps += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_comp, parse_value};
    use crate::term::*;

    #[test]
    fn unit_converges() {
        let v = identity();
        assert_eq!(big_step(&unit(v.clone()), 10), EvalOutcome::Converges(v.clone()));
        assert_eq!(small_step_converge(&unit(v.clone()), 10), EvalOutcome::Converges(v));
    }

    #[test]
    fn omega_diverges() {
        assert!(matches!(big_step(&omega_c(), 1000), EvalOutcome::Diverges { .. }));
        assert!(matches!(big_step_with(&omega_c(), 1000, false), EvalOutcome::FuelExhausted { steps: 1000 }));
        assert!(matches!(small_step_converge(&omega_c(), 1000), EvalOutcome::Diverges { .. }));
        assert!(matches!(small_step_converge_with(&omega_c(), 50, false), EvalOutcome::FuelExhausted { steps: 50 }));
    }

    #[test]
    fn identity_bind() {
        let m = parse_comp("unit (\\z. unit z) * \\x. unit x").unwrap();
        let expected = parse_value("\\z. unit z").unwrap();
        assert_eq!(big_step(&m, 10), EvalOutcome::Converges(expected.clone()));
        assert_eq!(small_step_converge(&m, 10), EvalOutcome::Converges(expected));
        // the two rule applications need three nodes
        assert!(matches!(big_step(&m, 2), EvalOutcome::FuelExhausted { .. }));
        assert!(big_step(&m, 3).converges());
    }

    #[test]
    fn open_terms_are_rejected() {
        assert!(matches!(big_step(&unit(var("y")), 10), EvalOutcome::OpenTermError(_)));
        assert!(matches!(small_step_converge(&unit(var("y")), 10), EvalOutcome::OpenTermError(_)));
    }

    #[test]
    fn display() {
        assert_eq!(EvalOutcome::FuelExhausted { steps: 7 }.to_string(), "fuel-exhausted after 7");
        assert_eq!(EvalOutcome::Converges(identity()).to_string(), "converges: \\x. unit x");
    }
}
