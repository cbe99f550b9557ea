//! Session syntax parser, evaluator and command line for the exact
//! boundary-problem engine.

pub mod ast;
pub mod commands;
pub mod eval;
pub mod parser;

pub use ast::{BinOp, Expr};
pub use commands::{run_command, Outcome};
pub use eval::{eval, EvalError, Value};
pub use parser::{parse, ParseError};
