//! Polynomial expressions: integer and rational literals, declared
//! variables, `+ - * ^`, parentheses and unary minus.
//!
//! `^` binds tighter than unary minus and `*`, which bind tighter than
//! `+` and `-`. Exponents are nonnegative integer literals.

use std::fmt;

use expanderlab::poly::{Rat, RatPoly};
use num_traits::Zero;
use thiserror::Error;

/// Largest exponent accepted by the parser.
pub const MAX_EXPONENT: u32 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    fn join(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {span}: {message}")]
    SyntaxError { span: Span, message: String },
    #[error("unknown variable `{name}` at {span}")]
    UnknownVariable { name: String, span: Span },
    #[error("negative exponent at {span}")]
    NegativeExponent { span: Span },
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::SyntaxError { span, .. }
            | ParseError::UnknownVariable { span, .. }
            | ParseError::NegativeExponent { span } => *span,
        }
    }

    /// The message followed by the source line with the span underlined.
    pub fn render(&self, src: &str) -> String {
        let span = self.span();
        let width = span.end.saturating_sub(span.start).max(1);
        format!(
            "{self}\n  {src}\n  {}{}",
            " ".repeat(span.start),
            "^".repeat(width)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Number(Rat),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn to_poly(&self, arity: usize) -> RatPoly {
        match &self.kind {
            ExprKind::Number(r) => RatPoly::constant(arity, r.clone()),
            ExprKind::Var(i) => RatPoly::var(arity, *i),
            ExprKind::Neg(e) => -&e.to_poly(arity),
            ExprKind::Add(a, b) => &a.to_poly(arity) + &b.to_poly(arity),
            ExprKind::Sub(a, b) => &a.to_poly(arity) - &b.to_poly(arity),
            ExprKind::Mul(a, b) => &a.to_poly(arity) * &b.to_poly(arity),
            ExprKind::Pow(e, k) => e.to_poly(arity).pow(*k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '/' => Some(Tok::Slash),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, Span { start, end: i + 1 }));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(src[start..i].to_string()), Span { start, end: i }));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), Span { start, end: i }));
        } else {
            let end = start + src[start..].chars().next().map_or(1, char::len_utf8);
            return Err(ParseError::SyntaxError {
                span: Span { start, end },
                message: format!("unexpected character `{}`", &src[start..end]),
            });
        }
    }
    out.push((Tok::End, Span { start: src.len(), end: src.len() }));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::SyntaxError {
            span: self.span(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ExprKind::Add as fn(_, _) -> _,
                Tok::Minus => ExprKind::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr {
                kind: op(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.unary()?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr {
                kind: ExprKind::Mul(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Minus => {
                let (_, s) = self.bump();
                let inner = self.unary()?;
                let span = s.join(inner.span);
                Ok(Expr {
                    kind: ExprKind::Neg(Box::new(inner)),
                    span,
                })
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.atom()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let start = self.span();
            let negative = *self.peek() == Tok::Minus;
            if negative {
                self.bump();
            }
            let (tok, s) = self.bump();
            let Tok::Num(digits) = tok else {
                return Err(ParseError::SyntaxError {
                    span: s,
                    message: "expected an integer exponent".into(),
                });
            };
            if negative {
                return Err(ParseError::NegativeExponent { span: start.join(s) });
            }
            let k: u32 = match digits.parse() {
                Ok(k) if k <= MAX_EXPONENT => k,
                _ => {
                    return Err(ParseError::SyntaxError {
                        span: s,
                        message: format!("exponent exceeds {MAX_EXPONENT}"),
                    })
                }
            };
            let span = base.span.join(s);
            base = Expr {
                kind: ExprKind::Pow(Box::new(base), k),
                span,
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, span) = self.bump();
        match tok {
            Tok::Num(n) => {
                let num: Rat = Rat::from_integer(n.parse().expect("digits"));
                if *self.peek() != Tok::Slash {
                    return Ok(Expr {
                        kind: ExprKind::Number(num),
                        span,
                    });
                }
                self.bump();
                let (dtok, dspan) = self.bump();
                let Tok::Num(d) = dtok else {
                    return Err(ParseError::SyntaxError {
                        span: dspan,
                        message: "expected a denominator".into(),
                    });
                };
                let den: Rat = Rat::from_integer(d.parse().expect("digits"));
                if den.is_zero() {
                    return Err(ParseError::SyntaxError {
                        span: dspan,
                        message: "zero denominator".into(),
                    });
                }
                Ok(Expr {
                    kind: ExprKind::Number(num / den),
                    span: span.join(dspan),
                })
            }
            Tok::Ident(name) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => Ok(Expr {
                    kind: ExprKind::Var(i),
                    span,
                }),
                None => Err(ParseError::UnknownVariable { name, span }),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                let (close, cspan) = self.bump();
                if close != Tok::RParen {
                    return Err(ParseError::SyntaxError {
                        span: cspan,
                        message: "expected `)`".into(),
                    });
                }
                Ok(Expr {
                    kind: inner.kind,
                    span: span.join(cspan),
                })
            }
            Tok::End => Err(ParseError::SyntaxError {
                span,
                message: "unexpected end of input".into(),
            }),
            other => Err(ParseError::SyntaxError {
                span,
                message: format!("unexpected {}", describe(&other)),
            }),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Num(_) => "number",
        Tok::Ident(_) => "identifier",
        Tok::Plus => "`+`",
        Tok::Minus => "`-`",
        Tok::Star => "`*`",
        Tok::Caret => "`^`",
        Tok::Slash => "`/`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::End => "end of input",
    }
}

pub fn parse_expr(src: &str, vars: &[&str]) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, vars };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        let what = describe(p.peek());
        return p.error(format!("unexpected {what}; expected an operator"));
    }
    Ok(e)
}

/// Parses `src` into a polynomial whose variables are `vars`, in order.
pub fn parse_poly(src: &str, vars: &[&str]) -> Result<RatPoly, ParseError> {
    Ok(parse_expr(src, vars)?.to_poly(vars.len()))
}

/// Splits a comma-separated variable list.
pub fn var_list(spec: &str) -> Vec<&str> {
    spec.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use expanderlab::poly::rat;

    const XY: &[&str] = &["x", "y"];

    #[test]
    fn examples() {
        let p = parse_poly("x^2 + x*y", XY).unwrap();
        assert_eq!(p, RatPoly::from_int_terms(2, &[(&[2, 0], 1), (&[1, 1], 1)]));
        assert_eq!(parse_poly("(x+y)^0", XY).unwrap(), RatPoly::one(2));
        assert!(matches!(
            parse_poly("x^-1", XY),
            Err(ParseError::NegativeExponent { span: Span { start: 2, end: 4 } })
        ));
    }

    #[test]
    fn precedence_and_rationals() {
        let p = parse_poly("-x^2 + 3/4*y - -1", XY).unwrap();
        let want = RatPoly::from_terms(
            2,
            [
                (vec![2, 0], rat(-1)),
                (vec![0, 1], Rat::new(3.into(), 4.into())),
                (vec![0, 0], rat(1)),
            ],
        );
        assert_eq!(p, want);
        assert_eq!(parse_poly("2*(x+1)^2", XY).unwrap(), parse_poly("2*x^2+4*x+2", XY).unwrap());
    }

    #[test]
    fn errors_carry_spans() {
        assert_eq!(
            parse_poly("x + z", XY),
            Err(ParseError::UnknownVariable {
                name: "z".into(),
                span: Span { start: 4, end: 5 }
            })
        );
        let e = parse_poly("2x", XY).unwrap_err();
        assert_eq!(e.span(), Span { start: 1, end: 2 });
        let e = parse_poly("(x + y", XY).unwrap_err();
        assert!(matches!(e, ParseError::SyntaxError { .. }));
        assert!(parse_poly("x $ y", XY).unwrap_err().render("x $ y").contains("  ^"));
        assert!(parse_poly("1/0", XY).is_err());
        assert!(parse_poly("", XY).is_err());
    }

    #[test]
    fn canonical_round_trip() {
        let p = parse_poly("3*x^2*y - 1/2*y", XY).unwrap();
        assert_eq!(p.to_string(), "3*x^2*y - 1/2*y");
        assert_eq!(parse_poly(&p.to_string(), XY).unwrap(), p);
    }
}
