use std::fmt;

use super::parser::{Expression, Node};

/// Runtime evaluation failure of an expression or a derived evaluator.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalError {
    /// `log` of a zero or negative quantity.
    LogOfNonPositive,
    /// Division where the denominator evaluates to zero.
    DivisionByZero,
    /// Power with a negative base and non-integer behaviour, or 0^negative.
    InvalidPower,
    /// The value is not a positive real where one is required.
    NonPositiveValue,
    /// NaN appeared during evaluation.
    NotANumber,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EvalError::LogOfNonPositive => "log of a non-positive value",
            EvalError::DivisionByZero => "division by zero",
            EvalError::InvalidPower => "invalid power operation",
            EvalError::NonPositiveValue => "value is not a positive real",
            EvalError::NotANumber => "NaN during evaluation",
        };
        f.write_str(s)
    }
}

impl std::error::Error for EvalError {}

/// Sign-and-log representation of a real value: `sign * exp(ln_abs)`.
///
/// Keeps evaluation stable when values range far beyond f64, e.g. when the
/// input is given as `ln t` with |ln t| up to several hundred, or when an
/// `exp` node produces a value whose logarithm is itself astronomically
/// large.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LnVal {
    sign: i8,
    ln: f64,
}

impl LnVal {
    pub(crate) const ZERO: LnVal = LnVal { sign: 0, ln: f64::NEG_INFINITY };

    pub(crate) fn positive(ln: f64) -> LnVal {
        LnVal { sign: 1, ln }
    }

    pub(crate) fn from_plain(v: f64) -> Result<LnVal, EvalError> {
        if v.is_nan() {
            return Err(EvalError::NotANumber);
        }
        Ok(if v == 0.0 {
            LnVal::ZERO
        } else if v > 0.0 {
            LnVal { sign: 1, ln: v.ln() }
        } else {
            LnVal { sign: -1, ln: (-v).ln() }
        })
    }

    pub(crate) fn plain(self) -> f64 {
        self.sign as f64 * self.ln.exp()
    }

    pub(crate) fn is_zero(self) -> bool {
        self.sign == 0 || self.ln == f64::NEG_INFINITY
    }

    /// Natural log of the value; error unless strictly positive.
    pub(crate) fn ln_positive(self) -> Result<f64, EvalError> {
        if self.sign > 0 && !self.ln.is_nan() {
            Ok(self.ln)
        } else {
            Err(EvalError::NonPositiveValue)
        }
    }

    fn add(self, other: LnVal) -> LnVal {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.ln >= other.ln { (self, other) } else { (other, self) };
        let d = lo.ln - hi.ln; // <= 0
        if self.sign == other.sign {
            LnVal { sign: hi.sign, ln: hi.ln + d.exp().ln_1p() }
        } else {
            let r = d.exp();
            if r >= 1.0 {
                LnVal::ZERO
            } else {
                LnVal { sign: hi.sign, ln: hi.ln + (-r).ln_1p() }
            }
        }
    }

    fn mul(self, other: LnVal) -> LnVal {
        if self.is_zero() || other.is_zero() {
            return LnVal::ZERO;
        }
        LnVal { sign: self.sign * other.sign, ln: self.ln + other.ln }
    }

    fn div(self, other: LnVal) -> Result<LnVal, EvalError> {
        if other.is_zero() {
            return Err(EvalError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(LnVal::ZERO);
        }
        Ok(LnVal { sign: self.sign * other.sign, ln: self.ln - other.ln })
    }

    fn pow(self, exponent: f64) -> Result<LnVal, EvalError> {
        if exponent.is_nan() {
            return Err(EvalError::NotANumber);
        }
        if exponent == 0.0 {
            return Ok(LnVal { sign: 1, ln: 0.0 });
        }
        if self.is_zero() {
            return if exponent > 0.0 { Ok(LnVal::ZERO) } else { Err(EvalError::InvalidPower) };
        }
        if self.sign < 0 {
            // Positive-function DSL: fractional powers of negatives are out.
            return Err(EvalError::InvalidPower);
        }
        Ok(LnVal { sign: 1, ln: exponent * self.ln })
    }

    fn lt(self, other: LnVal) -> bool {
        match (self.sign, other.sign) {
            (a, b) if a < b => true,
            (a, b) if a > b => false,
            (1, 1) => self.ln < other.ln,
            (-1, -1) => self.ln > other.ln,
            _ => false,
        }
    }
}

fn eval_ln_node(node: &Node, ln_t: f64) -> Result<LnVal, EvalError> {
    match node {
        Node::Var => Ok(LnVal::positive(ln_t)),
        Node::Num(v) => LnVal::from_plain(*v),
        Node::Add(a, b) => Ok(eval_ln_node(a, ln_t)?.add(eval_ln_node(b, ln_t)?)),
        Node::Sub(a, b) => {
            let rhs = eval_ln_node(b, ln_t)?;
            let neg = LnVal { sign: -rhs.sign, ln: rhs.ln };
            Ok(eval_ln_node(a, ln_t)?.add(neg))
        }
        Node::Mul(a, b) => Ok(eval_ln_node(a, ln_t)?.mul(eval_ln_node(b, ln_t)?)),
        Node::Div(a, b) => eval_ln_node(a, ln_t)?.div(eval_ln_node(b, ln_t)?),
        Node::Pow(a, b) => {
            let exponent = eval_ln_node(b, ln_t)?.plain();
            eval_ln_node(a, ln_t)?.pow(exponent)
        }
        Node::Log(a) => {
            let v = eval_ln_node(a, ln_t)?;
            if v.sign <= 0 {
                return Err(EvalError::LogOfNonPositive);
            }
            LnVal::from_plain(v.ln)
        }
        Node::Exp(a) => {
            let v = eval_ln_node(a, ln_t)?.plain();
            if v.is_nan() {
                return Err(EvalError::NotANumber);
            }
            Ok(LnVal { sign: 1, ln: v })
        }
        Node::Min(a, b) => {
            let (x, y) = (eval_ln_node(a, ln_t)?, eval_ln_node(b, ln_t)?);
            Ok(if x.lt(y) { x } else { y })
        }
        Node::Max(a, b) => {
            let (x, y) = (eval_ln_node(a, ln_t)?, eval_ln_node(b, ln_t)?);
            Ok(if x.lt(y) { y } else { x })
        }
    }
}

fn eval_plain_node(node: &Node, t: f64) -> f64 {
    match node {
        Node::Var => t,
        Node::Num(v) => *v,
        Node::Add(a, b) => eval_plain_node(a, t) + eval_plain_node(b, t),
        Node::Sub(a, b) => eval_plain_node(a, t) - eval_plain_node(b, t),
        Node::Mul(a, b) => eval_plain_node(a, t) * eval_plain_node(b, t),
        Node::Div(a, b) => eval_plain_node(a, t) / eval_plain_node(b, t),
        Node::Pow(a, b) => eval_plain_node(a, t).powf(eval_plain_node(b, t)),
        Node::Log(a) => eval_plain_node(a, t).ln(),
        Node::Exp(a) => eval_plain_node(a, t).exp(),
        Node::Min(a, b) => eval_plain_node(a, t).min(eval_plain_node(b, t)),
        Node::Max(a, b) => eval_plain_node(a, t).max(eval_plain_node(b, t)),
    }
}

impl Expression {
    /// Direct f64 evaluation. May return non-finite values for arguments
    /// outside the representable range; use [`Expression::eval_ln`] there.
    pub fn eval(&self, t: f64) -> f64 {
        eval_plain_node(&self.root, t)
    }

    /// Log-space evaluation: given `ln t`, returns `ln f(t)`.
    /// Errors if the value is not a positive real.
    pub fn eval_ln(&self, ln_t: f64) -> Result<f64, EvalError> {
        eval_ln_node(&self.root, ln_t)?.ln_positive()
    }

    /// Checks that the expression is finite and strictly positive on a
    /// geometric sample grid over the declared domain (0, inf).
    pub fn check_positive_on_grid(&self, grid: &crate::grid::GeometricGrid) -> Result<(), EvalError> {
        for x in grid.ln_points() {
            let ln_v = self.eval_ln(x)?;
            if !ln_v.is_finite() {
                return Err(EvalError::NonPositiveValue);
            }
        }
        Ok(())
    }
}
