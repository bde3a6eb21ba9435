//! Concrete ASCII syntax.
//!
//! ```text
//! sequent ::= [list] "|-" [list]
//! list    ::= formula ("," formula)*
//! formula ::= disj ("->" disj)*  |  disj ("-<" disj)*
//! disj    ::= conj ("|" conj)*
//! conj    ::= unary ("&" unary)*
//! unary   ::= "!" unary | "~" unary | atom | "true" | "false" | "(" formula ")"
//! atom    ::= [a-z][a-z0-9_]*
//! ```
//!
//! `->` associates to the right, `-<`, `&` and `|` to the left. An
//! unparenthesized chain mixing `->` and `-<` is rejected.

use crate::error::ParseError;
use crate::formula::Formula;
use crate::sequent::{ExtendedFormula, Sequent};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

/// Parse tree of the surface syntax, negations included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceFormula {
    pub pos: Pos,
    pub kind: SurfaceKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurfaceKind {
    Atom(String),
    Top,
    Bot,
    Not(Box<SurfaceFormula>),
    Tilde(Box<SurfaceFormula>),
    And(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Or(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Imp(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Excl(Box<SurfaceFormula>, Box<SurfaceFormula>),
}

impl SurfaceFormula {
    /// Replaces `!f` by `f -> false` and `~f` by `true -< f`.
    pub fn desugar(&self) -> Formula {
        let bin = |l: &SurfaceFormula, r: &SurfaceFormula| (l.desugar(), r.desugar());
        match &self.kind {
            SurfaceKind::Atom(a) => Formula::Atom(a.clone()),
            SurfaceKind::Top => Formula::Top,
            SurfaceKind::Bot => Formula::Bot,
            SurfaceKind::Not(f) => Formula::not(f.desugar()),
            SurfaceKind::Tilde(f) => Formula::tilde(f.desugar()),
            SurfaceKind::And(l, r) => {
                let (l, r) = bin(l, r);
                Formula::and(l, r)
            }
            SurfaceKind::Or(l, r) => {
                let (l, r) = bin(l, r);
                Formula::or(l, r)
            }
            SurfaceKind::Imp(l, r) => {
                let (l, r) = bin(l, r);
                Formula::imp(l, r)
            }
            SurfaceKind::Excl(l, r) => {
                let (l, r) = bin(l, r);
                Formula::excl(l, r)
            }
        }
    }
}

impl From<&Formula> for SurfaceFormula {
    fn from(f: &Formula) -> Self {
        let pos = Pos { line: 0, column: 0 };
        let b = |f: &Formula| Box::new(SurfaceFormula::from(f));
        let kind = match f {
            Formula::Atom(a) => SurfaceKind::Atom(a.clone()),
            Formula::Top => SurfaceKind::Top,
            Formula::Bot => SurfaceKind::Bot,
            Formula::And(l, r) => SurfaceKind::And(b(l), b(r)),
            Formula::Or(l, r) => SurfaceKind::Or(b(l), b(r)),
            Formula::Imp(l, r) => SurfaceKind::Imp(b(l), b(r)),
            Formula::Excl(l, r) => SurfaceKind::Excl(b(l), b(r)),
        };
        SurfaceFormula { pos, kind }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    And,
    Or,
    Imp,
    Excl,
    Not,
    Tilde,
    Turnstile,
    Comma,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(a) => format!("atom `{a}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Imp => "`->`".into(),
            Tok::Excl => "`-<`".into(),
            Tok::Not => "`!`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column };
        let next = chars.get(i + 1).copied();
        let (tok, width) = match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {
                column += 1;
                i += 1;
                continue;
            }
            '&' => (Tok::And, 1),
            '|' if next == Some('-') => (Tok::Turnstile, 2),
            '|' => (Tok::Or, 1),
            '-' if next == Some('>') => (Tok::Imp, 2),
            '-' if next == Some('<') => (Tok::Excl, 2),
            '!' => (Tok::Not, 1),
            '~' => (Tok::Tilde, 1),
            ',' => (Tok::Comma, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            c if c.is_ascii_lowercase() => {
                let start = i;
                let mut j = i + 1;
                while j < chars.len()
                    && (chars[j].is_ascii_lowercase()
                        || chars[j].is_ascii_digit()
                        || chars[j] == '_')
                {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                let tok = match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word),
                };
                (tok, j - start)
            }
            other => {
                return Err(ParseError {
                    line,
                    column,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, pos));
        i += width;
        column += width;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, ParseError> {
        let toks = lex(text)?;
        let line = text.lines().count().max(1);
        let column = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
        Ok(Parser {
            toks,
            at: 0,
            end: Pos { line, column },
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let pos = self.pos();
        Err(ParseError {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn formula(&mut self) -> Result<SurfaceFormula, ParseError> {
        let first = self.disj()?;
        let mut operands = vec![first];
        let mut arrow: Option<Tok> = None;
        while let Some(t @ (Tok::Imp | Tok::Excl)) = self.peek().cloned() {
            if let Some(prev) = &arrow {
                if *prev != t {
                    return self.error("ambiguous mix of `->` and `-<`; add parentheses");
                }
            }
            arrow = Some(t);
            self.at += 1;
            operands.push(self.disj()?);
        }
        Ok(match arrow {
            None => operands.pop().unwrap(),
            Some(Tok::Imp) => {
                let mut acc = operands.pop().unwrap();
                while let Some(l) = operands.pop() {
                    let pos = l.pos;
                    acc = SurfaceFormula {
                        pos,
                        kind: SurfaceKind::Imp(Box::new(l), Box::new(acc)),
                    };
                }
                acc
            }
            Some(_) => {
                let mut it = operands.into_iter();
                let mut acc = it.next().unwrap();
                for r in it {
                    acc = SurfaceFormula {
                        pos: acc.pos,
                        kind: SurfaceKind::Excl(Box::new(acc), Box::new(r)),
                    };
                }
                acc
            }
        })
    }

    fn disj(&mut self) -> Result<SurfaceFormula, ParseError> {
        let mut acc = self.conj()?;
        while self.peek() == Some(&Tok::Or) {
            self.at += 1;
            let r = self.conj()?;
            acc = SurfaceFormula {
                pos: acc.pos,
                kind: SurfaceKind::Or(Box::new(acc), Box::new(r)),
            };
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<SurfaceFormula, ParseError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.at += 1;
            let r = self.unary()?;
            acc = SurfaceFormula {
                pos: acc.pos,
                kind: SurfaceKind::And(Box::new(acc), Box::new(r)),
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<SurfaceFormula, ParseError> {
        let pos = self.pos();
        let kind = match self.peek().cloned() {
            Some(Tok::Not) => {
                self.at += 1;
                SurfaceKind::Not(Box::new(self.unary()?))
            }
            Some(Tok::Tilde) => {
                self.at += 1;
                SurfaceKind::Tilde(Box::new(self.unary()?))
            }
            Some(Tok::Ident(a)) => {
                self.at += 1;
                SurfaceKind::Atom(a)
            }
            Some(Tok::True) => {
                self.at += 1;
                SurfaceKind::Top
            }
            Some(Tok::False) => {
                self.at += 1;
                SurfaceKind::Bot
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.formula()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.unexpected("`)`");
                }
                self.at += 1;
                return Ok(SurfaceFormula { pos, ..inner });
            }
            _ => return self.unexpected("a formula"),
        };
        Ok(SurfaceFormula { pos, kind })
    }

    fn list(&mut self) -> Result<Vec<SurfaceFormula>, ParseError> {
        let mut out = Vec::new();
        if matches!(self.peek(), None | Some(Tok::Turnstile)) {
            return Ok(out);
        }
        out.push(self.formula()?);
        while self.peek() == Some(&Tok::Comma) {
            self.at += 1;
            out.push(self.formula()?);
        }
        Ok(out)
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => self.unexpected("end of input"),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<SurfaceFormula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses and desugars in one step.
pub fn parse_plain(text: &str) -> Result<Formula, ParseError> {
    parse_formula(text).map(|f| f.desugar())
}

pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let mut p = Parser::new(text)?;
    let lhs = p.list()?;
    if p.peek() != Some(&Tok::Turnstile) {
        return p.unexpected("`,` or `|-`");
    }
    p.at += 1;
    let rhs = p.list()?;
    p.finish()?;
    let plain = |v: Vec<SurfaceFormula>| {
        v.iter()
            .map(|f| ExtendedFormula::Plain(f.desugar()))
            .collect::<Vec<_>>()
    };
    Ok(Sequent::new(plain(lhs), plain(rhs)))
}

/// A sequent if the text contains `|-`, otherwise `|- formula`.
pub fn parse_input(text: &str) -> Result<Sequent, ParseError> {
    if text.contains("|-") {
        parse_sequent(text)
    } else {
        let f = parse_plain(text)?;
        Ok(Sequent::from_formulas([], [f]))
    }
}
