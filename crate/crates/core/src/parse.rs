//! Parser for the surface term grammar.
//!
//! ```text
//! Value ::= ident | "\" ident "." Comp
//! Comp  ::= "unit" Value | Comp "*" Value | "(" Comp ")" | Comp "@" Comp
//! ```

use crate::error::{Error, Result};
use crate::lexer::{Cursor, Tok};
use crate::term::{desugar_app, Comp, Term, Value, Var};

pub fn parse_term(src: &str) -> Result<Term> {
    let mut cur = Cursor::new(src)?;
    let t = expr(&mut cur)?;
    cur.finish()?;
    Ok(t)
}

pub fn parse_comp(src: &str) -> Result<Comp> {
    let mut cur = Cursor::new(src)?;
    let (l, c) = cur.here();
    let t = expr(&mut cur)?;
    cur.finish()?;
    match t {
        Term::Comp(m) => Ok(m),
        Term::Value(_) => Err(sort_err(l, c, "expected a computation, found a value")),
    }
}

pub fn parse_value(src: &str) -> Result<Value> {
    let mut cur = Cursor::new(src)?;
    let (l, c) = cur.here();
    let t = expr(&mut cur)?;
    cur.finish()?;
    match t {
        Term::Value(v) => Ok(v),
        Term::Comp(_) => Err(sort_err(l, c, "expected a value, found a computation")),
    }
}

fn sort_err(line: usize, col: usize, msg: &str) -> Error {
    Error::Sort { line, col, message: msg.to_string() }
}

fn keyword(s: &str) -> bool {
    s == "unit"
}

/// Parses as far right as possible.
pub(crate) fn expr(cur: &mut Cursor) -> Result<Term> {
    if cur.peek() == Some(&Tok::Backslash) {
        return Ok(Term::Value(lambda(cur)?));
    }
    let (l, c) = cur.here();
    let mut acc = primary(cur)?;
    loop {
        match cur.peek() {
            Some(Tok::Star) => {
                let left = match acc {
                    Term::Comp(m) => m,
                    Term::Value(_) => return Err(sort_err(l, c, "left operand of `*` must be a computation")),
                };
                cur.next();
                let (l2, c2) = cur.here();
                let right = match operand(cur)? {
                    Term::Value(v) => v,
                    Term::Comp(_) => return Err(sort_err(l2, c2, "right operand of `*` must be a value")),
                };
                acc = Term::Comp(Comp::Bind(Box::new(left), Box::new(right)));
            }
            Some(Tok::At) => {
                let left = match acc {
                    Term::Comp(m) => m,
                    Term::Value(_) => return Err(sort_err(l, c, "operands of `@` must be computations")),
                };
                cur.next();
                let (l2, c2) = cur.here();
                let right = match operand(cur)? {
                    Term::Comp(m) => m,
                    Term::Value(_) => return Err(sort_err(l2, c2, "operands of `@` must be computations")),
                };
                acc = Term::Comp(desugar_app(left, right));
            }
            // `@unit` lexes as a single atom-name token
            Some(Tok::AtomName(name)) => {
                let name = name.clone();
                let left = match acc {
                    Term::Comp(m) => m,
                    Term::Value(_) => return Err(sort_err(l, c, "operands of `@` must be computations")),
                };
                let (l2, c2) = cur.here();
                cur.next();
                if !keyword(&name) {
                    return Err(sort_err(l2, c2, "operands of `@` must be computations"));
                }
                acc = Term::Comp(desugar_app(left, unit_tail(cur)?));
            }
            _ => return Ok(acc),
        }
    }
}

fn lambda(cur: &mut Cursor) -> Result<Value> {
    cur.expect(Tok::Backslash, "`\\`")?;
    let x = cur.ident("a binder name")?;
    if keyword(&x) {
        return Err(cur.error("`unit` cannot be a binder").into());
    }
    cur.expect(Tok::Dot, "`.` after the binder")?;
    let (l, c) = cur.here();
    match expr(cur)? {
        Term::Comp(m) => Ok(Value::Lam(Var::new(&x), Box::new(m))),
        Term::Value(_) => Err(sort_err(l, c, "lambda body must be a computation")),
    }
}

/// Right operand of `*` or `@`: a lambda extends to the right, otherwise a primary.
fn operand(cur: &mut Cursor) -> Result<Term> {
    if cur.peek() == Some(&Tok::Backslash) {
        Ok(Term::Value(lambda(cur)?))
    } else {
        primary(cur)
    }
}

/// The operand of `unit`, after the keyword.
fn unit_tail(cur: &mut Cursor) -> Result<Comp> {
    let (l, c) = cur.here();
    match operand(cur)? {
        Term::Value(v) => Ok(Comp::Unit(Box::new(v))),
        Term::Comp(_) => Err(sort_err(l, c, "`unit` expects a value, found a computation")),
    }
}

fn primary(cur: &mut Cursor) -> Result<Term> {
    match cur.peek().cloned() {
        Some(Tok::Ident(s)) if keyword(&s) => {
            cur.next();
            Ok(Term::Comp(unit_tail(cur)?))
        }
        Some(Tok::Ident(s)) => {
            cur.next();
            Ok(Term::Value(Value::Var(Var::new(&s))))
        }
        Some(Tok::LParen) => {
            cur.next();
            let t = expr(cur)?;
            cur.expect(Tok::RParen, "`)`")?;
            Ok(t)
        }
        _ => Err(cur.error("expected a term").into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::*;

    #[test]
    fn unit_of_variable() {
        assert_eq!(parse_term("unit x").unwrap(), Term::Comp(unit(var("x"))));
    }

    #[test]
    fn omega_parses() {
        let t = parse_comp("unit (\\x. unit x * x) * (\\x. unit x * x)").unwrap();
        assert_eq!(t, omega_c());
        let t = parse_comp("unit (λx. unit x ⋆ x) ⋆ (λx. unit x ⋆ x)").unwrap();
        assert_eq!(t, omega_c());
    }

    #[test]
    fn lambda_extends_right() {
        let t = parse_term("\\x. unit x * y").unwrap();
        assert_eq!(t, Term::Value(lam("x", bind(unit(var("x")), var("y")))));
    }

    #[test]
    fn star_is_left_associative() {
        let t = parse_comp("unit a * f * g").unwrap();
        assert_eq!(t, bind(bind(unit(var("a")), var("f")), var("g")));
    }

    #[test]
    fn app_sugar_parses() {
        let t = parse_comp("unit f @ unit a").unwrap();
        assert_eq!(t, desugar_app(unit(var("f")), unit(var("a"))));
        assert_eq!(parse_comp("unit f @unit a").unwrap(), t);
        assert!(matches!(parse_comp("unit f @a"), Err(Error::Sort { .. })));
    }

    #[test]
    fn sort_errors() {
        assert!(matches!(parse_term("unit (unit x)"), Err(Error::Sort { .. })));
        assert!(matches!(parse_term("x * y"), Err(Error::Sort { .. })));
        assert!(matches!(parse_term("\\x. x"), Err(Error::Sort { .. })));
        assert!(matches!(parse_term("unit x * unit y"), Err(Error::Sort { .. })));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_term("unit x *\n  )") {
            Err(Error::Syntax(e)) => assert_eq!((e.line, e.col), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_term("").is_err());
        assert!(parse_term("unit x )").is_err());
    }
}
