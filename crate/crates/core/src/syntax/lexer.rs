//! Tokens shared by every text format: s-expression formulas, braces for
//! blocks, `[..]` words, `<a,b>` pair tags and `,` separators. Comments run
//! from `;` to the end of the line.

use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
    Comma,
    Sym(String),
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, Error> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    let mut angle_depth = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let push = |tok: Tok, out: &mut Vec<Token>| {
            out.push(Token {
                tok,
                line: tl,
                column: tc,
            })
        };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {}
            ';' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => push(Tok::LParen, &mut out),
            ')' => push(Tok::RParen, &mut out),
            '{' => push(Tok::LBrace, &mut out),
            '}' => push(Tok::RBrace, &mut out),
            '[' => push(Tok::LBracket, &mut out),
            ']' => push(Tok::RBracket, &mut out),
            ',' => push(Tok::Comma, &mut out),
            '<' if chars.get(i + 1).is_some_and(|n| n.is_ascii_alphabetic() || *n == '<') => {
                angle_depth += 1;
                push(Tok::LAngle, &mut out);
            }
            '>' if angle_depth > 0 => {
                angle_depth -= 1;
                push(Tok::RAngle, &mut out);
            }
            _ => {
                let start = i;
                while i < chars.len() {
                    let d = chars[i];
                    if d.is_whitespace() || "(){}[],;".contains(d) || (d == '>' && angle_depth > 0) {
                        break;
                    }
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                push(Tok::Sym(s), &mut out);
                continue;
            }
        }
        i += 1;
        col += 1;
    }
    if angle_depth > 0 {
        return Err(Error::parse(line, col, "unclosed <..> tag"));
    }
    Ok(out)
}

pub struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Result<Self, Error> {
        Ok(Cursor {
            toks: tokenize(text)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    pub fn peek_sym(&self) -> Option<&str> {
        match self.peek() {
            Some(Tok::Sym(s)) => Some(s),
            _ => None,
        }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = match self.toks.get(self.pos) {
            Some(t) => (t.line, t.column),
            None => self.toks.last().map_or((1, 1), |t| (t.line, t.column + 1)),
        };
        Error::parse(line, column, message)
    }

    pub fn expect(&mut self, tok: Tok) -> Result<(), Error> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected {}, found {}", describe(&tok), describe(t)))),
            None => Err(self.error(format!("expected {}, found end of input", describe(&tok)))),
        }
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn sym(&mut self) -> Result<String, Error> {
        match self.peek().cloned() {
            Some(Tok::Sym(s)) => {
                self.pos += 1;
                Ok(s)
            }
            Some(t) => Err(self.error(format!("expected a symbol, found {}", describe(&t)))),
            None => Err(self.error("expected a symbol, found end of input")),
        }
    }

    pub fn keyword(&mut self, kw: &str) -> Result<(), Error> {
        match self.peek_sym() {
            Some(s) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected `{kw}`"))),
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.peek_sym() == Some(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn finish(&self) -> Result<(), Error> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::LAngle => "`<`".into(),
        Tok::RAngle => "`>`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Sym(s) => format!("`{s}`"),
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut it = s.chars();
    matches!(it.next(), Some(c) if c.is_ascii_alphabetic())
        && it.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}
