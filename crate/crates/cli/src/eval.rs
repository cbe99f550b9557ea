//! Evaluation of expression trees into domain values.

use std::fmt;

use greenop_core::{
    BoundaryCondition, BoundaryProblem, CondSpace, Error as MathError, ExpConstant, FuncSpace,
    FunctionExpr, IdOperator, Rat,
};
use num_traits::Zero;

use crate::ast::{BinOp, Expr};

/// A fully evaluated expression.
#[derive(Debug, Clone)]
pub enum Value {
    Fn(FunctionExpr),
    Op(IdOperator),
    Conds(CondSpace),
    Funcs(FuncSpace),
    Problem(BoundaryProblem),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Fn(_) => "function",
            Value::Op(_) => "operator",
            Value::Conds(_) => "condition space",
            Value::Funcs(_) => "function space",
            Value::Problem(_) => "boundary problem",
        }
    }
}

/// Evaluation failure: either an ill-typed expression or a mathematical
/// error from the engine.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    Type(String),
    Math(MathError),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Type(m) => write!(f, "type error: {}", m),
            EvalError::Math(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for EvalError {}

impl From<MathError> for EvalError {
    fn from(e: MathError) -> Self {
        EvalError::Math(e)
    }
}

fn type_err<T>(msg: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError::Type(msg.into()))
}

fn as_fn(v: Value) -> Result<FunctionExpr, EvalError> {
    match v {
        Value::Fn(f) => Ok(f),
        other => type_err(format!("expected a function, found a {}", other.kind())),
    }
}

fn as_op(v: Value) -> Result<IdOperator, EvalError> {
    match v {
        Value::Op(op) => Ok(op),
        Value::Fn(f) => Ok(IdOperator::from_fn(f)),
        other => type_err(format!("expected an operator, found a {}", other.kind())),
    }
}

/// The argument of `exp`: a linear polynomial `c + l*x` with rational
/// coefficients, yielding `exp(c) * exp(l*x)`.
fn eval_exp(arg: &Expr) -> Result<FunctionExpr, EvalError> {
    let f = as_fn(eval(arg)?)?;
    let Some(p) = f.as_polynomial() else {
        return type_err("exp argument must be linear in x");
    };
    let mut shift = Rat::zero();
    let mut freq = Rat::zero();
    for (lambda, poly) in p.terms() {
        if !lambda.is_zero() || poly.degree().unwrap_or(0) > 1 {
            return type_err("exp argument must be linear in x");
        }
        let get_rat = |c: ExpConstant| {
            c.as_rational()
                .ok_or_else(|| EvalError::Type("exp argument must be rational".into()))
        };
        shift = get_rat(poly.coeff(0))?;
        if poly.degree() == Some(1) {
            freq = get_rat(poly.coeff(1))?;
        }
    }
    let factor = ExpConstant::exp(shift);
    Ok(FunctionExpr::exp(freq).scale(&factor))
}

fn eval_condition(e: &Expr) -> Result<BoundaryCondition, EvalError> {
    let op = as_op(eval(e)?)?;
    BoundaryCondition::new(op).map_err(|_| {
        EvalError::Type(format!(
            "{} is not a Stieltjes boundary condition",
            e
        ))
    })
}

fn eval_cond_space(e: &Expr) -> Result<CondSpace, EvalError> {
    match e {
        Expr::Bc { items } => {
            let conds = items
                .iter()
                .map(eval_condition)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(CondSpace::new(conds)?)
        }
        _ => type_err("expected BC(...)"),
    }
}

fn eval_func_space(e: &Expr) -> Result<FuncSpace, EvalError> {
    match e {
        Expr::Es { items } => {
            let funcs = items
                .iter()
                .map(|i| as_fn(eval(i)?))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(FuncSpace::new(funcs)?)
        }
        _ => type_err("expected ES(...)"),
    }
}

/// Evaluate an expression tree, enforcing all domain invariants.
pub fn eval(e: &Expr) -> Result<Value, EvalError> {
    match e {
        Expr::Rat { value } => Ok(Value::Fn(FunctionExpr::constant(ExpConstant::from_rat(
            value.clone(),
        )))),
        Expr::X => Ok(Value::Fn(FunctionExpr::var())),
        Expr::D => Ok(Value::Op(IdOperator::deriv())),
        Expr::A => Ok(Value::Op(IdOperator::integral())),
        Expr::Eval { point } => Ok(Value::Op(IdOperator::eval_point(point.clone()))),
        Expr::Exp { arg } => Ok(Value::Fn(eval_exp(arg)?)),
        Expr::Neg { arg } => match eval(arg)? {
            Value::Fn(f) => Ok(Value::Fn(f.neg())),
            Value::Op(op) => Ok(Value::Op(op.neg())),
            other => type_err(format!("cannot negate a {}", other.kind())),
        },
        Expr::Bin { op, lhs, rhs } => {
            let l = eval(lhs)?;
            let r = eval(rhs)?;
            match op {
                BinOp::Add | BinOp::Sub => match (l, r) {
                    (Value::Fn(a), Value::Fn(b)) => Ok(Value::Fn(match op {
                        BinOp::Add => a.add(&b),
                        _ => a.sub(&b),
                    })),
                    (l, r) => {
                        let a = as_op(l)?;
                        let b = as_op(r)?;
                        Ok(Value::Op(match op {
                            BinOp::Add => a.add(&b),
                            _ => a.sub(&b),
                        }))
                    }
                },
                BinOp::Mul | BinOp::Compose => match (l, r) {
                    (Value::Fn(a), Value::Fn(b)) => Ok(Value::Fn(a.mul(&b))),
                    (l, r) => {
                        let a = as_op(l)?;
                        let b = as_op(r)?;
                        Ok(Value::Op(a.multiply(&b)?))
                    }
                },
                BinOp::Div => {
                    let a = as_fn(l)?;
                    let b = as_fn(r)?;
                    Ok(Value::Fn(a.div(&b)?))
                }
            }
        }
        Expr::Pow { base, exp } => match eval(base)? {
            Value::Fn(f) => {
                let mut out = FunctionExpr::one();
                for _ in 0..*exp {
                    out = out.mul(&f);
                }
                Ok(Value::Fn(out))
            }
            Value::Op(op) => Ok(Value::Op(op.pow(*exp)?)),
            other => type_err(format!("cannot raise a {} to a power", other.kind())),
        },
        Expr::Bp { op, conds } => {
            let t = as_op(eval(op)?)?;
            let conds = eval_cond_space(conds)?;
            Ok(Value::Problem(BoundaryProblem::new(
                t,
                conds,
                FuncSpace::empty(),
            )?))
        }
        Expr::Gbp { op, conds, exc } => {
            let t = as_op(eval(op)?)?;
            let conds = eval_cond_space(conds)?;
            let exc = eval_func_space(exc)?;
            Ok(Value::Problem(BoundaryProblem::new(t, conds, exc)?))
        }
        Expr::Bc { .. } => Ok(Value::Conds(eval_cond_space(e)?)),
        Expr::Es { .. } => Ok(Value::Funcs(eval_func_space(e)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;
    use greenop_core::rat_int;

    fn eval_str(s: &str) -> Result<Value, EvalError> {
        eval(&parse(s).unwrap())
    }

    #[test]
    fn evaluates_operators() {
        let Value::Op(op) = eval_str("d.a").unwrap() else {
            panic!("expected operator");
        };
        assert_eq!(op, IdOperator::one());
    }

    #[test]
    fn evaluates_problem() {
        let Value::Problem(p) = eval_str("GBP(d^2, BC(e(1), e(1).d, e(0).d), ES(1))").unwrap()
        else {
            panic!("expected problem");
        };
        assert_eq!(p.order(), 2);
        assert_eq!(p.conds().dim(), 3);
        assert_eq!(p.exc().dim(), 1);
        assert!(p.is_regular().unwrap());
    }

    #[test]
    fn evaluates_exp_forms() {
        let Value::Fn(f) = eval_str("exp(-x)").unwrap() else {
            panic!();
        };
        assert_eq!(f, FunctionExpr::exp(rat_int(-1)));
        let Value::Fn(f) = eval_str("exp(2)").unwrap() else {
            panic!();
        };
        assert_eq!(
            f,
            FunctionExpr::constant(ExpConstant::exp(rat_int(2)))
        );
        assert!(matches!(
            eval_str("exp(x^2)"),
            Err(EvalError::Type(_))
        ));
    }

    #[test]
    fn rejects_ill_typed_conditions() {
        assert!(matches!(
            eval_str("BP(d^2, BC(d))"),
            Err(EvalError::Type(_))
        ));
        assert!(matches!(
            eval_str("BP(d^2, BC(x.e(1)))"),
            Err(EvalError::Type(_))
        ));
    }

    #[test]
    fn rejects_dependent_conditions() {
        assert!(matches!(
            eval_str("BC(e(0), e(0), e(1))"),
            Err(EvalError::Math(MathError::InvalidBasis(_)))
        ));
    }

    #[test]
    fn division_by_operator_rejected() {
        assert!(matches!(eval_str("1/d"), Err(EvalError::Type(_))));
    }
}
