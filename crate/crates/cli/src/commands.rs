//! Subcommand implementations.
//!
//! Every argument slot that expects a problem, operator, space or
//! function accepts the session syntax, the JSON rendering of an
//! expression tree, or `-` for stdin. Output is the session notation or
//! the expression tree as JSON (`--format json`); JSON output parses
//! back into the same slot it came from.

use std::io::Read;

use clap::error::ErrorKind;
use clap::{Parser as ClapParser, Subcommand, ValueEnum};
use greenop_core::{
    check_reverse_order_law, compose, factor_left_regular, factor_right_regular, inverse_image,
    BoundaryProblem, Error as MathError, FuncSpace, FunctionExpr, IdOperator,
};

use crate::ast::Expr;
use crate::eval::{eval, EvalError, Value};
use crate::parser::parse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, ClapParser)]
#[command(
    name = "greenop",
    version,
    about = "Exact Green's operators, compatibility conditions, composition and factorization of linear ordinary boundary problems"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Seed for randomized helpers; accepted for reproducibility,
    /// the shipped subcommands are fully deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Green's operator of a regular (generalized) boundary problem.
    Green { problem: String },
    /// Compatibility conditions of a semi-regular boundary problem.
    Compat { problem: String },
    /// Composition of two boundary problems.
    Compose { p1: String, p2: String },
    /// Whether the product of the Green's operators solves the composite.
    CheckRol { p1: String, p2: String },
    /// Split a problem along a factorization T = T1.T2 into a
    /// generalized left factor and a regular right factor.
    Factor {
        problem: String,
        #[arg(long)]
        t1: Option<String>,
        #[arg(long)]
        t2: Option<String>,
        /// Fundamental system of T2, comma separated.
        #[arg(long)]
        fundsys2: Option<String>,
    },
    /// Split a semi-regular pair into a regular left factor and a
    /// generalized right factor, searching for an exceptional space.
    FactorLeft {
        problem: String,
        #[arg(long)]
        t1: String,
        #[arg(long)]
        t2: String,
        /// Fundamental system of T1, comma separated.
        #[arg(long)]
        fundsys1: Option<String>,
        /// Fundamental system of T2, comma separated.
        #[arg(long)]
        fundsys2: Option<String>,
        /// Candidate exceptional-space generators, comma separated.
        #[arg(long)]
        pool: Option<String>,
    },
    /// Basis of the inverse image of a function space.
    InverseImage {
        op: String,
        space: String,
        /// Fundamental system of the operator, comma separated.
        #[arg(long)]
        fundsys: Option<String>,
    },
    /// Regularity of a boundary problem.
    IsRegular { problem: String },
    /// Apply an operator to a function.
    Apply { op: String, func: String },
    /// Normal form of an operator expression.
    Simplify { op: String },
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn ok(stdout: String) -> Outcome {
    Outcome {
        code: 0,
        stdout,
        stderr: String::new(),
    }
}

enum CmdError {
    Usage(String),
    Math(String),
}

impl From<EvalError> for CmdError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Type(_) => CmdError::Usage(e.to_string()),
            EvalError::Math(_) => CmdError::Math(e.to_string()),
        }
    }
}

impl From<MathError> for CmdError {
    fn from(e: MathError) -> Self {
        CmdError::Math(e.to_string())
    }
}

type CmdResult = Result<String, CmdError>;

fn read_source(arg: &str) -> Result<String, CmdError> {
    if arg == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CmdError::Usage(format!("cannot read stdin: {}", e)))?;
        Ok(buf.trim().to_string())
    } else {
        Ok(arg.to_string())
    }
}

/// Parse an argument: JSON when it looks like JSON, session syntax
/// otherwise.
fn parse_arg(arg: &str) -> Result<Expr, CmdError> {
    let src = read_source(arg)?;
    if src.trim_start().starts_with('{') {
        serde_json::from_str(&src).map_err(|e| CmdError::Usage(format!("bad JSON input: {}", e)))
    } else {
        parse(&src).map_err(|e| CmdError::Usage(e.to_string()))
    }
}

fn eval_arg(arg: &str) -> Result<Value, CmdError> {
    Ok(eval(&parse_arg(arg)?)?)
}

fn problem_arg(arg: &str) -> Result<BoundaryProblem, CmdError> {
    match eval_arg(arg)? {
        Value::Problem(p) => Ok(p),
        v => Err(CmdError::Usage(format!(
            "expected BP(...) or GBP(...), found a {}",
            v.kind()
        ))),
    }
}

fn operator_arg(arg: &str) -> Result<IdOperator, CmdError> {
    match eval_arg(arg)? {
        Value::Op(op) => Ok(op),
        Value::Fn(f) => Ok(IdOperator::from_fn(f)),
        v => Err(CmdError::Usage(format!(
            "expected an operator, found a {}",
            v.kind()
        ))),
    }
}

fn function_arg(arg: &str) -> Result<FunctionExpr, CmdError> {
    match eval_arg(arg)? {
        Value::Fn(f) => Ok(f),
        v => Err(CmdError::Usage(format!(
            "expected a function, found a {}",
            v.kind()
        ))),
    }
}

fn funcspace_arg(arg: &str) -> Result<FuncSpace, CmdError> {
    match eval_arg(arg)? {
        Value::Funcs(s) => Ok(s),
        v => Err(CmdError::Usage(format!(
            "expected ES(...), found a {}",
            v.kind()
        ))),
    }
}

/// Comma separated list of functions, e.g. `exp(x),exp(-x)`.
fn function_list(arg: &str) -> Result<Vec<FunctionExpr>, CmdError> {
    let src = read_source(arg)?;
    let wrapped = format!("ES({})", src);
    let ast = parse(&wrapped).map_err(|e| CmdError::Usage(e.to_string()))?;
    let Expr::Es { items } = ast else {
        return Err(CmdError::Usage("expected a function list".into()));
    };
    items
        .iter()
        .map(|i| match eval(i) {
            Ok(Value::Fn(f)) => Ok(f),
            Ok(v) => Err(CmdError::Usage(format!(
                "expected a function in the list, found a {}",
                v.kind()
            ))),
            Err(e) => Err(e.into()),
        })
        .collect()
}

/// Re-parse a rendered value so JSON output mirrors the printed syntax.
fn to_expr(rendered: String) -> Expr {
    parse(&rendered).expect("printed notation parses back")
}

fn render_expr(format: Format, rendered: String) -> String {
    match format {
        Format::Text => rendered,
        Format::Json => serde_json::to_string(&to_expr(rendered)).expect("serializable tree"),
    }
}

fn render_bool(format: Format, b: bool) -> String {
    match format {
        Format::Text => b.to_string(),
        Format::Json => serde_json::to_string(&b).unwrap(),
    }
}

fn render_pair(format: Format, left: &BoundaryProblem, right: &BoundaryProblem) -> String {
    match format {
        Format::Text => format!("{}\n{}", left, right),
        Format::Json => {
            let pair = vec![to_expr(left.to_string()), to_expr(right.to_string())];
            serde_json::to_string(&pair).unwrap()
        }
    }
}

fn run_cmd(cli: &Cli) -> CmdResult {
    let format = cli.format;
    match &cli.cmd {
        Cmd::Green { problem } => {
            let p = problem_arg(problem)?;
            let g = p.greens_operator()?;
            Ok(render_expr(format, g.to_string()))
        }
        Cmd::Compat { problem } => {
            let p = problem_arg(problem)?;
            let c = p.compatibility_conditions()?;
            Ok(render_expr(format, c.to_string()))
        }
        Cmd::Compose { p1, p2 } => {
            let p1 = problem_arg(p1)?;
            let p2 = problem_arg(p2)?;
            let c = compose(&p1, &p2)?;
            Ok(render_expr(format, c.to_string()))
        }
        Cmd::CheckRol { p1, p2 } => {
            let p1 = problem_arg(p1)?;
            let p2 = problem_arg(p2)?;
            Ok(render_bool(format, check_reverse_order_law(&p1, &p2)?))
        }
        Cmd::Factor {
            problem,
            t1,
            t2,
            fundsys2,
        } => {
            let p = problem_arg(problem)?;
            let (Some(t1), Some(t2)) = (t1, t2) else {
                return Err(CmdError::Usage(
                    "factor requires --t1 and --t2: factoring the operator itself is not \
                     performed here"
                        .into(),
                ));
            };
            let t1 = operator_arg(t1)?;
            let t2 = operator_arg(t2)?;
            let fs2 = fundsys2.as_deref().map(function_list).transpose()?;
            let (left, right) = factor_right_regular(&p, &t1, &t2, fs2.as_deref())?;
            Ok(render_pair(format, &left, &right))
        }
        Cmd::FactorLeft {
            problem,
            t1,
            t2,
            fundsys1,
            fundsys2,
            pool,
        } => {
            let p = problem_arg(problem)?;
            let t1 = operator_arg(t1)?;
            let t2 = operator_arg(t2)?;
            let fs1 = fundsys1.as_deref().map(function_list).transpose()?;
            let fs2 = fundsys2.as_deref().map(function_list).transpose()?;
            let pool = pool.as_deref().map(function_list).transpose()?;
            let (left, right) = factor_left_regular(
                &p,
                &t1,
                &t2,
                fs1.as_deref(),
                fs2.as_deref(),
                pool.as_deref(),
            )?;
            Ok(render_pair(format, &left, &right))
        }
        Cmd::InverseImage { op, space, fundsys } => {
            let t = operator_arg(op)?;
            let e = funcspace_arg(space)?;
            let fs = fundsys.as_deref().map(function_list).transpose()?;
            let img = inverse_image(&t, &e, fs.as_deref())?;
            Ok(render_expr(format, img.to_string()))
        }
        Cmd::IsRegular { problem } => {
            let p = problem_arg(problem)?;
            Ok(render_bool(format, p.is_regular()?))
        }
        Cmd::Apply { op, func } => {
            let t = operator_arg(op)?;
            let f = function_arg(func)?;
            Ok(render_expr(format, t.apply(&f)?.to_string()))
        }
        Cmd::Simplify { op } => {
            let t = operator_arg(op)?;
            Ok(render_expr(format, t.to_string()))
        }
    }
}

/// Run the command line; returns the exit code and captured streams.
///
/// Exit codes: 0 on success, 1 on a mathematical failure, 2 on usage,
/// parse or type errors.
pub fn run_command<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: rendered,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: rendered,
                },
            };
        }
    };
    match run_cmd(&cli) {
        Ok(mut stdout) => {
            if !stdout.ends_with('\n') {
                stdout.push('\n');
            }
            ok(stdout)
        }
        Err(CmdError::Usage(m)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {}\n", m),
        },
        Err(CmdError::Math(m)) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {}\n", m),
        },
    }
}
