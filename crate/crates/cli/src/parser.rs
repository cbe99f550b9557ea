//! Recursive descent parser for the session syntax.
//!
//! Precedence, tightest first: `^`, unary minus, `*` `/`, `.`, `+` `-`.
//! Both the input notation (`d`, `a`, `e(c)`) and the printed notation
//! (`D`, `A`, `E[c]`) are accepted, so printed output parses back.

use std::fmt;
use std::str::FromStr;

use greenop_core::Rat;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::ast::{BinOp, Expr};

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at line {}, column {}: {}",
            self.line, self.col, self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
                self.bump();
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else {
                out.push(Spanned {
                    tok: Tok::Eof,
                    line,
                    col,
                });
                return Ok(out);
            };
            let tok = match c {
                b'0'..=b'9' => {
                    let mut digits = String::new();
                    while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                        digits.push(self.bump().unwrap() as char);
                    }
                    Tok::Int(BigInt::from_str(&digits).unwrap())
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let mut name = String::new();
                    while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_')
                    {
                        name.push(self.bump().unwrap() as char);
                    }
                    Tok::Ident(name)
                }
                _ => {
                    self.bump();
                    match c {
                        b'+' => Tok::Plus,
                        b'-' => Tok::Minus,
                        b'*' => Tok::Star,
                        b'/' => Tok::Slash,
                        b'^' => Tok::Caret,
                        b'.' => Tok::Dot,
                        b'(' => Tok::LParen,
                        b')' => Tok::RParen,
                        b'[' => Tok::LBracket,
                        b']' => Tok::RBracket,
                        b',' => Tok::Comma,
                        other => {
                            return Err(ParseError {
                                message: format!("unexpected character {:?}", other as char),
                                line,
                                col,
                            })
                        }
                    }
                }
            };
            out.push(Spanned { tok, line, col });
        }
    }
}

pub struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let tokens = Lexer::new(src).tokens()?;
    let mut p = Parser { tokens, pos: 0 };
    let expr = p.additive()?;
    p.expect_eof()?;
    Ok(expr)
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.tokens[self.pos.min(self.tokens.len() - 1)].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError {
            message: message.into(),
            line: t.line,
            col: t.col,
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {}", what)))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Eof {
            Ok(())
        } else {
            Err(self.error("trailing input"))
        }
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.composed()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::bin(BinOp::Add, lhs, self.composed()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::bin(BinOp::Sub, lhs, self.composed()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn composed(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.multiplicative()?;
        while self.peek().tok == Tok::Dot {
            self.bump();
            lhs = Expr::bin(BinOp::Compose, lhs, self.multiplicative()?);
        }
        Ok(lhs)
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::bin(BinOp::Mul, lhs, self.unary()?);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::bin(BinOp::Div, lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            let arg = self.unary()?;
            return Ok(Expr::Neg { arg: Box::new(arg) });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while self.peek().tok == Tok::Caret {
            self.bump();
            let at = self.peek().clone();
            let exp_expr = self.primary()?;
            let exp = const_fold(&exp_expr)
                .filter(|r| r.is_integer() && !r.is_negative())
                .and_then(|r| r.to_integer().to_u32())
                .ok_or(ParseError {
                    message: "exponent must be a nonnegative integer".into(),
                    line: at.line,
                    col: at.col,
                })?;
            base = Expr::Pow {
                base: Box::new(base),
                exp,
            };
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.peek().clone();
        match self.bump().tok {
            Tok::Int(n) => Ok(Expr::Rat {
                value: Rat::from_integer(n),
            }),
            Tok::LParen => {
                let e = self.additive()?;
                self.expect(Tok::RParen, "closing parenthesis")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::X),
                "d" | "D" => Ok(Expr::D),
                "a" | "A" => Ok(Expr::A),
                "e" | "E" => {
                    let bracket = self.peek().tok == Tok::LBracket;
                    if bracket {
                        self.bump();
                    } else {
                        self.expect(Tok::LParen, "evaluation point")?;
                    }
                    let inner_at = self.peek().clone();
                    let inner = self.additive()?;
                    let point = const_fold(&inner).ok_or(ParseError {
                        message: "evaluation point must be rational".into(),
                        line: inner_at.line,
                        col: inner_at.col,
                    })?;
                    if bracket {
                        self.expect(Tok::RBracket, "closing bracket")?;
                    } else {
                        self.expect(Tok::RParen, "closing parenthesis")?;
                    }
                    Ok(Expr::Eval { point })
                }
                "exp" => {
                    self.expect(Tok::LParen, "exp argument")?;
                    let inner = self.additive()?;
                    self.expect(Tok::RParen, "closing parenthesis")?;
                    Ok(Expr::Exp {
                        arg: Box::new(inner),
                    })
                }
                "BP" | "bp" => {
                    self.expect(Tok::LParen, "BP arguments")?;
                    let op = self.additive()?;
                    self.expect(Tok::Comma, "comma")?;
                    let conds = self.additive()?;
                    self.expect(Tok::RParen, "closing parenthesis")?;
                    Ok(Expr::Bp {
                        op: Box::new(op),
                        conds: Box::new(conds),
                    })
                }
                "GBP" | "gbp" => {
                    self.expect(Tok::LParen, "GBP arguments")?;
                    let op = self.additive()?;
                    self.expect(Tok::Comma, "comma")?;
                    let conds = self.additive()?;
                    self.expect(Tok::Comma, "comma")?;
                    let exc = self.additive()?;
                    self.expect(Tok::RParen, "closing parenthesis")?;
                    Ok(Expr::Gbp {
                        op: Box::new(op),
                        conds: Box::new(conds),
                        exc: Box::new(exc),
                    })
                }
                "BC" | "bc" => Ok(Expr::Bc {
                    items: self.argument_list()?,
                }),
                "ES" | "es" => Ok(Expr::Es {
                    items: self.argument_list()?,
                }),
                other => Err(ParseError {
                    message: format!("unknown symbol {:?}", other),
                    line: at.line,
                    col: at.col,
                }),
            },
            _ => Err(ParseError {
                message: "expected an expression".into(),
                line: at.line,
                col: at.col,
            }),
        }
    }

    fn argument_list(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect(Tok::LParen, "argument list")?;
        let mut items = Vec::new();
        if self.peek().tok == Tok::RParen {
            self.bump();
            return Ok(items);
        }
        loop {
            items.push(self.additive()?);
            match self.bump().tok {
                Tok::Comma => {}
                Tok::RParen => return Ok(items),
                _ => return Err(self.error("expected comma or closing parenthesis")),
            }
        }
    }
}

/// Fold a purely numeric expression to a rational.
pub fn const_fold(e: &Expr) -> Option<Rat> {
    match e {
        Expr::Rat { value } => Some(value.clone()),
        Expr::Neg { arg } => Some(-const_fold(arg)?),
        Expr::Bin { op, lhs, rhs } => {
            let l = const_fold(lhs)?;
            let r = const_fold(rhs)?;
            match op {
                BinOp::Add => Some(l + r),
                BinOp::Sub => Some(l - r),
                BinOp::Mul => Some(l * r),
                BinOp::Div => {
                    if r.is_zero() {
                        None
                    } else {
                        Some(l / r)
                    }
                }
                BinOp::Compose => None,
            }
        }
        Expr::Pow { base, exp } => {
            let b = const_fold(base)?;
            let mut out = Rat::from_integer(1.into());
            for _ in 0..*exp {
                out *= &b;
            }
            Some(out)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(src: &str) {
        let ast = parse(src).unwrap();
        let printed = ast.to_string();
        let reparsed = parse(&printed)
            .unwrap_or_else(|e| panic!("reparse of {:?} failed: {}", printed, e));
        assert_eq!(ast, reparsed, "round trip through {:?}", printed);
    }

    #[test]
    fn parses_operator_powers() {
        assert_eq!(
            parse("d^2").unwrap(),
            Expr::Pow {
                base: Box::new(Expr::D),
                exp: 2
            }
        );
    }

    #[test]
    fn parses_composition() {
        assert_eq!(
            parse("e(1).d").unwrap(),
            Expr::bin(
                BinOp::Compose,
                Expr::Eval {
                    point: Rat::from_integer(1.into())
                },
                Expr::D
            )
        );
    }

    #[test]
    fn precedence_of_division_over_composition() {
        // coefficient fraction binds before the composition dot
        let ast = parse("d-exp(2*x)/(exp(x)-1).d").unwrap();
        let Expr::Bin { op: BinOp::Sub, rhs, .. } = ast else {
            panic!("expected subtraction");
        };
        let Expr::Bin { op: BinOp::Compose, lhs, .. } = *rhs else {
            panic!("expected composition on the right");
        };
        assert!(matches!(*lhs, Expr::Bin { op: BinOp::Div, .. }));
    }

    #[test]
    fn rational_evaluation_points() {
        assert_eq!(
            parse("e(1/2)").unwrap(),
            Expr::Eval {
                point: Rat::new(1.into(), 2.into())
            }
        );
        assert_eq!(parse("E[1/2]").unwrap(), parse("e(1/2)").unwrap());
    }

    #[test]
    fn rejects_bad_exponent() {
        assert!(parse("d^x").is_err());
        assert!(parse("d^(-1)").is_err());
    }

    #[test]
    fn error_carries_position() {
        let err = parse("d +\n ?").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.col, 2);
    }

    #[test]
    fn round_trips() {
        for src in [
            "d^2",
            "e(1).d",
            "x.A - A.x + (-1/2*x^2 - 1/2).E[1].A + E[1].A.x",
            "GBP(d^2, BC(e(1), e(1).d, e(0).d), ES(1))",
            "BP(d^2 - 1, BC(e(0).d))",
            "d-exp(2*x)/(exp(x)-1)",
            "e(1).a.exp(-x)+e(1).a.exp(x)",
            "ES(x, exp(x), exp(-x))",
            "D^4 - D^2",
            "BC(E[0].D, E[0].D^3, E[1], E[1].D, E[1].D^3)",
            "2*exp(1) + exp(-1)",
            "exp(2*x)/(exp(x) - 1)",
            "-x^2",
            "e(2).a.exp(-x) - e(3).a.exp(-x)",
        ] {
            roundtrip(src);
        }
    }

    #[test]
    fn empty_constructors() {
        assert_eq!(parse("ES()").unwrap(), Expr::Es { items: vec![] });
        assert_eq!(parse("BC()").unwrap(), Expr::Bc { items: vec![] });
    }
}
