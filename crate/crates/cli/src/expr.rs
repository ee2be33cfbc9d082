//! S-expression syntax for sets.
//!
//! ```text
//! (interval 1/4 3/4)            open interval
//! (cinterval 1/3 2/3)           closed interval
//! (union e ...)                 union
//! (punctured q ...)             [0, 1] minus finitely many points
//! (full) (empty)
//! (complement-closed e)         [0, 1] minus e
//! (tail-cover)                  the stream (1/(n+2), 1)
//! (rational-complements)        the family [0, 1] \ {q_n}
//! ```

use std::fmt;

use opensets::enumerate::nth_rational;
use opensets::rational::{fmt_rat, parse_rat};
use opensets::{FinClosed, FinOpen, OpenR2, OpenR4, RatInterval, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetExpr {
    Interval(Rational, Rational),
    CInterval(Rational, Rational),
    Union(Vec<SetExpr>),
    Punctured(Vec<Rational>),
    Full,
    Empty,
    ComplementClosed(Box<SetExpr>),
    TailCover,
    RationalComplements,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Vec<Spanned> {
    let mut out = Vec::new();
    let mut atom = String::new();
    let mut start = (1, 1);
    let (mut line, mut column) = (1, 1);
    let flush = |atom: &mut String, start: (usize, usize), out: &mut Vec<Spanned>| {
        if !atom.is_empty() {
            out.push(Spanned { token: Token::Atom(std::mem::take(atom)), line: start.0, column: start.1 });
        }
    };
    for c in text.chars() {
        match c {
            '(' | ')' => {
                flush(&mut atom, start, &mut out);
                let token = if c == '(' { Token::Open } else { Token::Close };
                out.push(Spanned { token, line, column });
            }
            c if c.is_whitespace() => flush(&mut atom, start, &mut out),
            c => {
                if atom.is_empty() {
                    start = (line, column);
                }
                atom.push(c);
            }
        }
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    flush(&mut atom, start, &mut out);
    out
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn error<T>(&self, at: Option<&Spanned>, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, column) = at.map(|s| (s.line, s.column)).unwrap_or(self.end);
        Err(ParseError { line, column, message: message.into() })
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        match self.next() {
            Some(s @ Spanned { token: Token::Atom(_), .. }) => {
                let Token::Atom(a) = &s.token else { unreachable!() };
                parse_rat(a).or_else(|_| self.error(Some(&s), format!("expected a rational, found `{a}`")))
            }
            other => self.error(other.as_ref(), "expected a rational"),
        }
    }

    fn close(&mut self) -> Result<(), ParseError> {
        match self.next() {
            Some(Spanned { token: Token::Close, .. }) => Ok(()),
            other => self.error(other.as_ref(), "expected `)`"),
        }
    }

    fn at_close(&self) -> bool {
        matches!(self.peek(), Some(Spanned { token: Token::Close, .. }))
    }

    fn expr(&mut self) -> Result<SetExpr, ParseError> {
        let open = self.next();
        match &open {
            Some(Spanned { token: Token::Open, .. }) => {}
            Some(Spanned { token: Token::Atom(a), .. }) => {
                // Bare builtin names are accepted for convenience.
                if let Some(e) = builtin(a) {
                    return Ok(e);
                }
                return self.error(open.as_ref(), format!("expected `(`, found `{a}`"));
            }
            _ => return self.error(open.as_ref(), "expected `(`"),
        }
        let head = self.next();
        let name = match &head {
            Some(Spanned { token: Token::Atom(a), .. }) => a.clone(),
            _ => return self.error(head.as_ref(), "expected an operator name"),
        };
        let e = match name.as_str() {
            "interval" | "cinterval" => {
                let a = self.rational()?;
                let b = self.rational()?;
                if name == "interval" {
                    SetExpr::Interval(a, b)
                } else {
                    SetExpr::CInterval(a, b)
                }
            }
            "union" => {
                let mut parts = Vec::new();
                while !self.at_close() && self.peek().is_some() {
                    parts.push(self.expr()?);
                }
                SetExpr::Union(parts)
            }
            "punctured" => {
                let mut points = Vec::new();
                while !self.at_close() && self.peek().is_some() {
                    points.push(self.rational()?);
                }
                SetExpr::Punctured(points)
            }
            "complement-closed" => SetExpr::ComplementClosed(Box::new(self.expr()?)),
            other => match builtin(other) {
                Some(e) => e,
                None => return self.error(head.as_ref(), format!("unknown operator `{other}`")),
            },
        };
        self.close()?;
        Ok(e)
    }
}

fn builtin(name: &str) -> Option<SetExpr> {
    match name {
        "full" => Some(SetExpr::Full),
        "empty" => Some(SetExpr::Empty),
        "tail-cover" => Some(SetExpr::TailCover),
        "rational-complements" => Some(SetExpr::RationalComplements),
        _ => None,
    }
}

pub fn parse_set(text: &str) -> Result<SetExpr, ParseError> {
    let lines: Vec<&str> = text.split('\n').collect();
    let end = (lines.len(), lines.last().map_or(0, |l| l.chars().count()) + 1);
    let mut p = Parser { tokens: tokenize(text), pos: 0, end };
    let e = p.expr()?;
    if let Some(extra) = p.peek().cloned() {
        return p.error(Some(&extra), "trailing input");
    }
    Ok(e)
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetExpr::Interval(a, b) => write!(f, "(interval {} {})", fmt_rat(a), fmt_rat(b)),
            SetExpr::CInterval(a, b) => write!(f, "(cinterval {} {})", fmt_rat(a), fmt_rat(b)),
            SetExpr::Union(parts) => {
                write!(f, "(union")?;
                for p in parts {
                    write!(f, " {p}")?;
                }
                write!(f, ")")
            }
            SetExpr::Punctured(points) => {
                write!(f, "(punctured")?;
                for q in points {
                    write!(f, " {}", fmt_rat(q))?;
                }
                write!(f, ")")
            }
            SetExpr::Full => write!(f, "(full)"),
            SetExpr::Empty => write!(f, "(empty)"),
            SetExpr::ComplementClosed(e) => write!(f, "(complement-closed {e})"),
            SetExpr::TailCover => write!(f, "(tail-cover)"),
            SetExpr::RationalComplements => write!(f, "(rational-complements)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct EvalError(pub String);

fn expected(what: &str, e: &SetExpr) -> EvalError {
    EvalError(format!("expected {what}, found {e}"))
}

impl SetExpr {
    /// The open subset of `[0, 1]` this denotes.
    pub fn open_set(&self) -> Result<FinOpen, EvalError> {
        match self {
            SetExpr::Interval(a, b) => Ok(FinOpen::new([RatInterval::open(a.clone(), b.clone())])),
            SetExpr::Union(parts) => {
                let mut acc = FinOpen::empty();
                for p in parts {
                    acc = acc.union(&p.open_set()?);
                }
                Ok(acc)
            }
            SetExpr::Punctured(points) => Ok(FinOpen::punctured(points)),
            SetExpr::Full => Ok(FinOpen::full()),
            SetExpr::Empty => Ok(FinOpen::empty()),
            SetExpr::ComplementClosed(e) => Ok(e.closed_set()?.complement()),
            _ => Err(expected("an open set", self)),
        }
    }

    /// The closed subset of `[0, 1]` this denotes.
    pub fn closed_set(&self) -> Result<FinClosed, EvalError> {
        match self {
            SetExpr::CInterval(a, b) => Ok(FinClosed::new([RatInterval::closed(a.clone(), b.clone())])),
            SetExpr::Union(parts) => {
                let mut acc = FinClosed::empty();
                for p in parts {
                    acc = acc.union(&p.closed_set()?);
                }
                Ok(acc)
            }
            SetExpr::Full => Ok(FinClosed::unit()),
            SetExpr::Empty => Ok(FinClosed::empty()),
            SetExpr::ComplementClosed(e) => Ok(e.open_set()?.complement()),
            _ => Err(expected("a closed set", self)),
        }
    }

    /// A cover stream: the builtin tail cover, or the pieces of a union in
    /// the order written.
    pub fn stream(&self) -> Result<OpenR4, EvalError> {
        match self {
            SetExpr::TailCover => Ok(OpenR4::tail_cover()),
            SetExpr::Union(parts) if parts.iter().all(|p| matches!(p, SetExpr::Interval(..))) => {
                let pieces = parts
                    .iter()
                    .map(|p| match p {
                        SetExpr::Interval(a, b) => RatInterval::open(a.clone(), b.clone()),
                        _ => unreachable!(),
                    })
                    .collect();
                Ok(OpenR4::from_pieces(pieces))
            }
            _ => Ok(OpenR4::from_fin_open(&self.open_set()?)),
        }
    }

    /// A sequence of radius presentations: the rational complements, or one
    /// open set repeated.
    pub fn family(&self) -> Result<Box<dyn Fn(usize) -> OpenR2>, EvalError> {
        match self {
            SetExpr::RationalComplements => {
                Ok(Box::new(|n: usize| OpenR2::punctured(nth_rational(n as u64))))
            }
            _ => {
                let y = OpenR2::canonical(self.open_set()?);
                Ok(Box::new(move |_| y.clone()))
            }
        }
    }
}
