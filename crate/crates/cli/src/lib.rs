//! Expression language over generalized scalars and quaternions: parser,
//! printer, evaluator and the batch runner behind the `gq` binary.

pub mod ast;
pub mod batch;
pub mod eval;
pub mod parser;
pub mod value;

pub use ast::{Expr, Stmt};
pub use eval::{CommandError, EvalError, Session};
pub use parser::{parse_expr, parse_program, parse_statement, ParseError};
pub use value::Value;
