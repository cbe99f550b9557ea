//! Expression syntax tree shared by the parser, the printer and the
//! JSON format.

use std::fmt;

use greenop_core::Rat;
use serde::{Deserialize, Serialize};

/// Rationals travel through JSON as `"p/q"` strings.
mod rat_string {
    use super::Rat;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        Rat::from_str(&s).map_err(|e| D::Error::custom(format!("bad rational {:?}: {}", s, e)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Compose,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Expr {
    Rat {
        #[serde(with = "rat_string")]
        value: Rat,
    },
    X,
    D,
    A,
    Eval {
        #[serde(with = "rat_string")]
        point: Rat,
    },
    Exp {
        arg: Box<Expr>,
    },
    Neg {
        arg: Box<Expr>,
    },
    Bin {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Pow {
        base: Box<Expr>,
        exp: u32,
    },
    Bp {
        op: Box<Expr>,
        conds: Box<Expr>,
    },
    Gbp {
        op: Box<Expr>,
        conds: Box<Expr>,
        exc: Box<Expr>,
    },
    Bc {
        items: Vec<Expr>,
    },
    Es {
        items: Vec<Expr>,
    },
}

impl Expr {
    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Bin {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin { op, .. } => match op {
                BinOp::Add | BinOp::Sub => 1,
                BinOp::Compose => 2,
                BinOp::Mul | BinOp::Div => 3,
            },
            Expr::Neg { .. } => 4,
            Expr::Pow { .. } => 5,
            Expr::Rat { value } => {
                // negative literals and fractions print with an operator
                if value.to_string().contains('/') || value.to_string().starts_with('-') {
                    3
                } else {
                    6
                }
            }
            _ => 6,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Expr::Rat { value } => write!(f, "{}", value)?,
            Expr::X => write!(f, "x")?,
            Expr::D => write!(f, "D")?,
            Expr::A => write!(f, "A")?,
            Expr::Eval { point } => write!(f, "E[{}]", point)?,
            Expr::Exp { arg } => {
                write!(f, "exp(")?;
                arg.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
            Expr::Neg { arg } => {
                write!(f, "-")?;
                arg.fmt_prec(f, 4)?;
            }
            Expr::Bin { op, lhs, rhs } => {
                let (sym, p) = match op {
                    BinOp::Add => (" + ", 1),
                    BinOp::Sub => (" - ", 1),
                    BinOp::Compose => (".", 2),
                    BinOp::Mul => ("*", 3),
                    BinOp::Div => ("/", 3),
                };
                lhs.fmt_prec(f, p)?;
                write!(f, "{}", sym)?;
                rhs.fmt_prec(f, p + 1)?;
            }
            Expr::Pow { base, exp } => {
                base.fmt_prec(f, 6)?;
                write!(f, "^{}", exp)?;
            }
            Expr::Bp { op, conds } => {
                write!(f, "BP(")?;
                op.fmt_prec(f, 0)?;
                write!(f, ", ")?;
                conds.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
            Expr::Gbp { op, conds, exc } => {
                write!(f, "GBP(")?;
                op.fmt_prec(f, 0)?;
                write!(f, ", ")?;
                conds.fmt_prec(f, 0)?;
                write!(f, ", ")?;
                exc.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
            Expr::Bc { items } => {
                write!(f, "BC(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    item.fmt_prec(f, 0)?;
                }
                write!(f, ")")?;
            }
            Expr::Es { items } => {
                write!(f, "ES(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    item.fmt_prec(f, 0)?;
                }
                write!(f, ")")?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
