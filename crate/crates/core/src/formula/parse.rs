//! Recursive-descent parser.
//!
//! ```text
//! formula := or
//! or      := and ( ('|' | "OR") and )*
//! and     := atom ( ('&' | "AND") atom )*
//! atom    := IDENT | '(' or ')'
//! IDENT   := [A-Za-z_][A-Za-z0-9_:]*
//! ```

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::{Formula, Gate, Node};

/// What went wrong while parsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Input contains no tokens.
    Empty,
    /// A negation operator; formulas are monotone.
    NonMonotone(String),
    /// A character outside the grammar.
    InvalidCharacter(char),
    /// A token where something else was required.
    UnexpectedToken {
        /// Text of the offending token.
        found: String,
        /// What the parser wanted.
        expected: &'static str,
    },
    /// Input ended early.
    UnexpectedEnd {
        /// What the parser wanted.
        expected: &'static str,
    },
}

/// Parse failure with the byte offset where it was detected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Failure kind.
    pub kind: ParseErrorKind,
    /// Byte offset into the input.
    pub position: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Empty => write!(f, "empty formula"),
            ParseErrorKind::NonMonotone(op) => write!(
                f,
                "negation `{op}` at offset {} is not allowed in a monotone formula",
                self.position
            ),
            ParseErrorKind::InvalidCharacter(c) => {
                write!(f, "invalid character {c:?} at offset {}", self.position)
            }
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "expected {expected} at offset {}, found `{found}`", self.position)
            }
            ParseErrorKind::UnexpectedEnd { expected } => {
                write!(f, "expected {expected} at offset {}, found end of input", self.position)
            }
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok<'a> {
    Ident(&'a str),
    And,
    Or,
    Open,
    Close,
}

impl Tok<'_> {
    fn text(&self) -> String {
        match self {
            Tok::Ident(s) => s.to_string(),
            Tok::And => "&".into(),
            Tok::Or => "|".into(),
            Tok::Open => "(".into(),
            Tok::Close => ")".into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == ':'
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok<'_>)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((pos, c)) = chars.next() {
        let tok = match c {
            c if c.is_whitespace() => continue,
            '&' => Tok::And,
            '|' => Tok::Or,
            '(' => Tok::Open,
            ')' => Tok::Close,
            '!' | '~' | '¬' | '-' => {
                return Err(ParseError {
                    kind: ParseErrorKind::NonMonotone(c.to_string()),
                    position: pos,
                })
            }
            c if is_ident_start(c) => {
                let mut end = pos + c.len_utf8();
                while let Some(&(p, n)) = chars.peek() {
                    if !is_ident_continue(n) {
                        break;
                    }
                    end = p + n.len_utf8();
                    chars.next();
                }
                match &text[pos..end] {
                    "AND" => Tok::And,
                    "OR" => Tok::Or,
                    "NOT" => {
                        return Err(ParseError {
                            kind: ParseErrorKind::NonMonotone("NOT".into()),
                            position: pos,
                        })
                    }
                    ident => Tok::Ident(ident),
                }
            }
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::InvalidCharacter(other),
                    position: pos,
                })
            }
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(usize, Tok<'a>)>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok<'a>> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn fail(&self, expected: &'static str) -> ParseError {
        match self.tokens.get(self.pos) {
            Some((p, t)) => ParseError {
                kind: ParseErrorKind::UnexpectedToken {
                    found: t.text(),
                    expected,
                },
                position: *p,
            },
            None => ParseError {
                kind: ParseErrorKind::UnexpectedEnd { expected },
                position: self.end,
            },
        }
    }

    fn or(&mut self) -> Result<Arc<Node>, ParseError> {
        let mut terms = alloc::vec![self.and()?];
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            terms.push(self.and()?);
        }
        Ok(Node::gate(Gate::Or, terms))
    }

    fn and(&mut self) -> Result<Arc<Node>, ParseError> {
        let mut factors = alloc::vec![self.atom()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            factors.push(self.atom()?);
        }
        Ok(Node::gate(Gate::And, factors))
    }

    fn atom(&mut self) -> Result<Arc<Node>, ParseError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let leaf = Node::leaf(*name);
                self.pos += 1;
                Ok(leaf)
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let inner = self.or()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(self.fail("`)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.fail("attribute or `(`")),
        }
    }
}

pub(super) fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ParseError {
            kind: ParseErrorKind::Empty,
            position: 0,
        });
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let root = p.or()?;
    if p.pos < p.tokens.len() {
        return Err(p.fail("operator or end of input"));
    }
    Ok(Formula::new(root))
}
