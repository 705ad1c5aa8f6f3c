//! A small shared tokenizer for the term, type, Moggi and derivation grammars.

use crate::error::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `@name` in type syntax.
    AtomName(String),
    Backslash,
    Dot,
    Star,
    At,
    LParen,
    RParen,
    Arrow,
    Amp,
    Colon,
    Comma,
    Turnstile,
    Le,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() && c != 'λ' || c == '_'
}

fn is_ident_char(c: char) -> bool {
    (c.is_alphanumeric() && c != 'λ') || c == '_' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let push = |tok: Tok, out: &mut Vec<Spanned>| out.push(Spanned { tok, line: l0, col: c0 });
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let (tok, len) = match c {
            '\\' | 'λ' => (Tok::Backslash, 1),
            '.' => (Tok::Dot, 1),
            '*' | '⋆' => (Tok::Star, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '&' | '∧' => (Tok::Amp, 1),
            '→' => (Tok::Arrow, 1),
            ':' => (Tok::Colon, 1),
            ',' => (Tok::Comma, 1),
            '≤' => (Tok::Le, 1),
            '⊢' => (Tok::Turnstile, 1),
            '=' => (Tok::Eq, 1),
            '-' if two == "->" => (Tok::Arrow, 2),
            '|' if two == "|-" => (Tok::Turnstile, 2),
            '<' if two == "<=" => (Tok::Le, 2),
            '@' => {
                let mut j = i + 1;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                if j > i + 1 && is_ident_start(chars[i + 1]) {
                    let name: String = chars[i + 1..j].iter().collect();
                    (Tok::AtomName(name), j - i)
                } else {
                    (Tok::At, 1)
                }
            }
            c if is_ident_start(c) => {
                let mut j = i;
                // a dash joins two words (`arrow-i`) but never starts `->`
                while j < chars.len()
                    && (is_ident_char(chars[j])
                        || chars[j] == '-' && chars.get(j + 1).is_some_and(|&n| is_ident_start(n)))
                {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            other => {
                return Err(SyntaxError::new(l0, c0, format!("unexpected character {other:?}")));
            }
        };
        push(tok, &mut out);
        i += len;
        col += len;
    }
    Ok(out)
}

/// Cursor over a token stream with position-aware errors.
pub struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Cursor {
    pub fn new(src: &str) -> Result<Cursor, SyntaxError> {
        let toks = tokenize(src)?;
        let lines: Vec<&str> = src.split('\n').collect();
        let end = (lines.len(), lines.last().map_or(0, |l| l.chars().count()) + 1);
        Ok(Cursor { toks, pos: 0, end })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    pub fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |s| (s.line, s.col))
    }

    pub fn error(&self, msg: impl Into<String>) -> SyntaxError {
        let (l, c) = self.here();
        SyntaxError::new(l, c, msg.into())
    }

    pub fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    pub fn ident(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    pub fn finish(&self) -> Result<(), SyntaxError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}
