//! Parser for the type grammar.
//!
//! ```text
//! type  ::= inter ("->" type)?
//! inter ::= prim ("&" prim)*
//! prim  ::= "Wv" | "Wc" | "@" ident | "T" prim | "(" type ")"
//! ```

use crate::error::{Error, Result};
use crate::lexer::{Cursor, Tok};
use crate::types::{arrow, inter_c, inter_v, t_of, CType, Type, VType};

pub fn parse_type(src: &str) -> Result<Type> {
    let mut cur = Cursor::new(src)?;
    let t = ty(&mut cur)?;
    cur.finish()?;
    Ok(t)
}

pub fn parse_vtype(src: &str) -> Result<VType> {
    let mut cur = Cursor::new(src)?;
    let (l, c) = cur.here();
    let t = ty(&mut cur)?;
    cur.finish()?;
    match t {
        Type::V(d) => Ok(d),
        Type::C(_) => Err(sort_err(l, c, "expected a value type, found a computation type")),
    }
}

pub fn parse_ctype(src: &str) -> Result<CType> {
    let mut cur = Cursor::new(src)?;
    let (l, c) = cur.here();
    let t = ty(&mut cur)?;
    cur.finish()?;
    match t {
        Type::C(t) => Ok(t),
        Type::V(_) => Err(sort_err(l, c, "expected a computation type, found a value type")),
    }
}

fn sort_err(line: usize, col: usize, msg: &str) -> Error {
    Error::Sort { line, col, message: msg.to_string() }
}

/// Parses a type, stopping before `,`, `)`, `|-`, `<=` and similar.
pub(crate) fn ty(cur: &mut Cursor) -> Result<Type> {
    let (l, c) = cur.here();
    let left = inter(cur)?;
    if cur.peek() != Some(&Tok::Arrow) {
        return Ok(left);
    }
    cur.next();
    let (l2, c2) = cur.here();
    let right = ty(cur)?;
    match (left, right) {
        (Type::V(d), Type::C(t)) => Ok(Type::V(arrow(d, t))),
        (Type::C(_), _) => Err(sort_err(l, c, "arrow domain must be a value type")),
        (_, Type::V(_)) => Err(sort_err(l2, c2, "arrow codomain must be a computation type")),
    }
}

fn inter(cur: &mut Cursor) -> Result<Type> {
    let (l, c) = cur.here();
    let mut acc = prim(cur)?;
    while cur.peek() == Some(&Tok::Amp) {
        cur.next();
        let rhs = prim(cur)?;
        acc = match (acc, rhs) {
            (Type::V(a), Type::V(b)) => Type::V(inter_v(a, b)),
            (Type::C(a), Type::C(b)) => Type::C(inter_c(a, b)),
            _ => return Err(sort_err(l, c, "both sides of `&` must have the same sort")),
        };
    }
    Ok(acc)
}

fn prim(cur: &mut Cursor) -> Result<Type> {
    match cur.peek().cloned() {
        Some(Tok::Ident(s)) if s == "Wv" => {
            cur.next();
            Ok(Type::V(VType::Omega))
        }
        Some(Tok::Ident(s)) if s == "Wc" => {
            cur.next();
            Ok(Type::C(CType::Omega))
        }
        Some(Tok::Ident(s)) if s == "T" => {
            cur.next();
            let (l, c) = cur.here();
            match prim(cur)? {
                Type::V(d) => Ok(Type::C(t_of(d))),
                Type::C(_) => Err(sort_err(l, c, "`T` expects a value type")),
            }
        }
        Some(Tok::AtomName(a)) => {
            cur.next();
            Ok(Type::V(VType::Atom(a.as_str().into())))
        }
        Some(Tok::LParen) => {
            cur.next();
            let t = ty(cur)?;
            cur.expect(Tok::RParen, "`)`")?;
            Ok(t)
        }
        _ => Err(cur.error("expected a type").into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::atom;

    #[test]
    fn basic() {
        assert_eq!(parse_type("Wv").unwrap(), Type::V(VType::Omega));
        assert_eq!(parse_type("Wv -> Wc").unwrap(), Type::V(arrow(VType::Omega, CType::Omega)));
        assert_eq!(
            parse_type("@a & @b -> T @a & T @b").unwrap(),
            Type::V(arrow(inter_v(atom("a"), atom("b")), inter_c(t_of(atom("a")), t_of(atom("b")))))
        );
    }

    #[test]
    fn round_trip_printing() {
        for s in ["(Wv -> Wc) -> T (Wv -> T Wv)", "T (@a & @b)", "@a & (Wv -> Wc)", "Wc & T Wv"] {
            let t = parse_type(s).unwrap();
            assert_eq!(t.to_string(), s);
            assert_eq!(parse_type(&t.to_string()).unwrap(), t);
        }
    }

    #[test]
    fn sort_errors() {
        assert!(matches!(parse_type("Wv -> Wv"), Err(Error::Sort { .. })));
        assert!(matches!(parse_type("T Wc"), Err(Error::Sort { .. })));
        assert!(matches!(parse_type("Wv & Wc"), Err(Error::Sort { .. })));
        assert!(parse_type("Wv ->").is_err());
        assert!(parse_vtype("T Wv").is_err());
        assert!(parse_ctype("T Wv").is_ok());
    }
}
