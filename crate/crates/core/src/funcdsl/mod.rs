//! A minimal infix expression language for positive scalar functions of one
//! variable `t`, plus monotone-function machinery built on top of it:
//! numerical inversion, almost-semi-multiplicativity and quasi-scaling scans.
//!
//! Grammar (EBNF):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' factor)?
//! base   := number | ident | '(' expr ')' | func '(' expr ')'
//! func   := 'log' | 'exp' | 'min' | 'max'      -- min/max take two args
//! ```
//!
//! `log` is the natural logarithm, `e` is Euler's constant, number literals
//! are positive decimals without exponent notation. Named parameters are
//! resolved to finite reals at parse time; no symbolic parameters survive
//! past parsing.

mod eval;
mod monotone;
mod parser;

pub use eval::EvalError;
pub use monotone::{
    check_almost_semimultiplicative, check_quasi_scaling, invert_monotone, invert_monotone_ln,
    BijectionReport, MonotoneFunction, Monotonicity, NumericError, ScanReport,
    DEFAULT_INVERSION_REL_TOL,
};
pub use parser::{parse_expression, Expression, Node, ParseError};
