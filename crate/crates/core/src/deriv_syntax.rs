//! Text format for derivations.
//!
//! ```text
//! deriv ::= "(" "rule" name concl premises side? ")"
//! concl ::= "(" "concl" basis? "|-" term ":" type ")"
//! basis ::= ident ":" type ("," ident ":" type)*
//! premises ::= "(" "premises" deriv* ")"
//! side  ::= "(" "side" type "<=" type ")"
//! ```

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::lexer::{Cursor, Tok};
use crate::parse::expr;
use crate::term::Var;
use crate::type_parse::ty;
use crate::typing::{Basis, Derivation, Judgment, RuleName};

pub fn parse_derivation(src: &str) -> Result<Derivation> {
    let mut cur = Cursor::new(src)?;
    let d = deriv(&mut cur)?;
    cur.finish()?;
    Ok(d)
}

fn keyword(cur: &mut Cursor, kw: &str) -> Result<()> {
    match cur.peek() {
        Some(Tok::Ident(s)) if s == kw => {
            cur.next();
            Ok(())
        }
        _ => Err(cur.error(format!("expected `{kw}`")).into()),
    }
}

fn open(cur: &mut Cursor, kw: &str) -> Result<()> {
    cur.expect(Tok::LParen, "`(`")?;
    keyword(cur, kw)
}

fn deriv(cur: &mut Cursor) -> Result<Derivation> {
    open(cur, "rule")?;
    let (l, c) = cur.here();
    let name = cur.ident("a rule name")?;
    let rule = RuleName::from_name(&name)
        .ok_or_else(|| Error::from(crate::error::SyntaxError::new(l, c, format!("unknown rule `{name}`"))))?;
    let concl = judgment(cur)?;
    open(cur, "premises")?;
    let mut premises = Vec::new();
    while cur.peek() == Some(&Tok::LParen) {
        premises.push(deriv(cur)?);
    }
    cur.expect(Tok::RParen, "`)` after the premises")?;
    let mut side = None;
    if cur.peek() == Some(&Tok::LParen) {
        open(cur, "side")?;
        let a = ty(cur)?;
        cur.expect(Tok::Le, "`<=`")?;
        let b = ty(cur)?;
        cur.expect(Tok::RParen, "`)` after the side condition")?;
        side = Some((a, b));
    }
    cur.expect(Tok::RParen, "`)` closing the rule")?;
    Ok(Derivation { rule, concl, premises, side })
}

fn judgment(cur: &mut Cursor) -> Result<Judgment> {
    open(cur, "concl")?;
    let mut map = BTreeMap::new();
    if cur.peek() != Some(&Tok::Turnstile) {
        loop {
            let (l, c) = cur.here();
            let x = cur.ident("a variable")?;
            cur.expect(Tok::Colon, "`:`")?;
            let (lt, ct) = cur.here();
            let t = match ty(cur)? {
                crate::types::Type::V(d) => d,
                _ => {
                    return Err(Error::Sort { line: lt, col: ct, message: "basis types must be value types".into() })
                }
            };
            if map.insert(Var::new(&x), t).is_some() {
                return Err(crate::error::SyntaxError::new(l, c, format!("`{x}` appears twice in the basis")).into());
            }
            if cur.peek() != Some(&Tok::Comma) {
                break;
            }
            cur.next();
        }
    }
    cur.expect(Tok::Turnstile, "`|-`")?;
    let subject = expr(cur)?;
    cur.expect(Tok::Colon, "`:`")?;
    let t = ty(cur)?;
    cur.expect(Tok::RParen, "`)` closing the conclusion")?;
    Ok(Judgment { basis: Basis(map), subject, ty: t })
}

/// Prints one node per line, premises indented.
pub fn print_derivation(d: &Derivation) -> String {
    let mut out = String::new();
    print_at(d, 0, &mut out);
    out
}

fn print_at(d: &Derivation, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    let _ = write!(out, "{pad}(rule {} (concl {})", d.rule.name(), d.concl);
    if d.premises.is_empty() {
        out.push_str(" (premises)");
    } else {
        out.push_str("\n");
        let _ = write!(out, "{pad}  (premises");
        for p in &d.premises {
            out.push('\n');
            print_at(p, indent + 4, out);
        }
        out.push(')');
    }
    if let Some((a, b)) = &d.side {
        let _ = write!(out, " (side {a} <= {b})");
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::AtomTable;
    use crate::typing::check_derivation;

    const ID: &str = "(rule arrow-i (concl |- \\x. unit x : Wv -> T Wv)
      (premises
        (rule unit-i (concl x:Wv |- unit x : T Wv)
          (premises (rule ax (concl x:Wv |- x : Wv) (premises))))))";

    #[test]
    fn parses_and_checks() {
        let d = parse_derivation(ID).unwrap();
        assert_eq!(d.size(), 3);
        assert!(check_derivation(&d, &AtomTable::empty()).is_valid());
    }

    #[test]
    fn round_trip() {
        let d = parse_derivation(ID).unwrap();
        let s = print_derivation(&d);
        assert_eq!(parse_derivation(&s).unwrap(), d);
        let leq = "(rule leq (concl |- \\y. unit y : Wv) (premises (rule omega (concl |- \\y. unit y : Wv) (premises))) (side Wv <= Wv))";
        let d = parse_derivation(leq).unwrap();
        assert_eq!(parse_derivation(&print_derivation(&d)).unwrap(), d);
    }

    #[test]
    fn errors() {
        assert!(parse_derivation("(rule bogus (concl |- unit x : Wc) (premises))").is_err());
        assert!(parse_derivation("(rule ax (concl x:Wv, x:Wv |- x : Wv) (premises))").is_err());
        assert!(matches!(
            parse_derivation("(rule ax (concl x:T Wv |- x : Wv) (premises))"),
            Err(Error::Sort { .. })
        ));
        assert!(parse_derivation("(rule ax (concl |- x : Wv) (premises)").is_err());
    }
}
