//! Exact leading-order calculus on three-level power-log scales, and the
//! decision procedure for convergence of improper integrals at infinity.
//!
//! An [`AsymptoticAtom`] `(alpha, beta, gamma)` stands for the leading
//! behaviour `t^alpha (log t)^beta (log log t)^gamma` with multiplicative
//! constants deliberately dropped; at the 0-end the same triple is read in
//! powers of `t`, `log(1/t)`, `log log(1/t)`. Convergence verdicts are
//! invariant under bounded constant factors, so only the exponents matter.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Leading-order exponent triple on the scale (t, log t, log log t).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct AsymptoticAtom {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl From<[f64; 3]> for AsymptoticAtom {
    fn from(v: [f64; 3]) -> Self {
        AsymptoticAtom { alpha: v[0], beta: v[1], gamma: v[2] }
    }
}

impl From<AsymptoticAtom> for [f64; 3] {
    fn from(a: AsymptoticAtom) -> Self {
        [a.alpha, a.beta, a.gamma]
    }
}

impl fmt::Display for AsymptoticAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.alpha, self.beta, self.gamma)
    }
}

pub const CONST_ATOM: AsymptoticAtom = AsymptoticAtom { alpha: 0.0, beta: 0.0, gamma: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineOp {
    Multiply,
    Divide,
}

/// End of the domain (0, inf) an atom refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Zero,
    Infinity,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AsymError {
    /// Profile not invertible within the scale (needs alpha > 0 at both ends).
    UnsupportedProfile { detail: String },
    /// The inner argument tends to a positive constant; outside the scale.
    ConstantArgument,
    /// Composition would need a fourth logarithm level.
    FourthLogLevel,
}

impl fmt::Display for AsymError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AsymError::UnsupportedProfile { detail } => write!(f, "unsupported profile: {detail}"),
            AsymError::ConstantArgument => {
                write!(f, "argument tends to a positive constant, outside the power-log scale")
            }
            AsymError::FourthLogLevel => {
                write!(f, "composition needs a fourth logarithm level, outside the scale")
            }
        }
    }
}

impl std::error::Error for AsymError {}

impl AsymptoticAtom {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        debug_assert!(alpha.is_finite() && beta.is_finite() && gamma.is_finite());
        AsymptoticAtom { alpha, beta, gamma }
    }

    /// Lexicographic domination order: larger means asymptotically larger
    /// (at the infinity end) up to constants.
    pub fn lex_cmp(&self, other: &AsymptoticAtom) -> Ordering {
        self.alpha
            .total_cmp(&other.alpha)
            .then(self.beta.total_cmp(&other.beta))
            .then(self.gamma.total_cmp(&other.gamma))
    }

    pub fn is_const(&self) -> bool {
        *self == CONST_ATOM
    }

    pub fn neg(&self) -> Self {
        AsymptoticAtom::new(-self.alpha, -self.beta, -self.gamma)
    }

    pub fn mul(&self, other: &AsymptoticAtom) -> Self {
        AsymptoticAtom::new(
            self.alpha + other.alpha,
            self.beta + other.beta,
            self.gamma + other.gamma,
        )
    }

    pub fn div(&self, other: &AsymptoticAtom) -> Self {
        self.mul(&other.neg())
    }

    pub fn pow(&self, q: f64) -> Self {
        AsymptoticAtom::new(q * self.alpha, q * self.beta, q * self.gamma)
    }

    /// Reconstructs `alpha ln t + beta ln ln t + gamma ln ln ln t` at the
    /// infinity end; used by the numeric-consistency checks.
    pub fn log_reconstruction(&self, ln_t: f64) -> f64 {
        self.alpha * ln_t + self.beta * ln_t.ln() + self.gamma * ln_t.ln().ln()
    }
}

/// Componentwise exponent arithmetic for products and quotients.
pub fn atom_combine(a: AsymptoticAtom, b: AsymptoticAtom, op: CombineOp) -> AsymptoticAtom {
    match op {
        CombineOp::Multiply => a.mul(&b),
        CombineOp::Divide => a.div(&b),
    }
}

pub fn atom_power(a: AsymptoticAtom, q: f64) -> AsymptoticAtom {
    a.pow(q)
}

/// Leading behaviour at both ends of (0, inf).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticProfile {
    pub at_zero: AsymptoticAtom,
    pub at_infinity: AsymptoticAtom,
}

impl AsymptoticProfile {
    pub fn new(at_zero: AsymptoticAtom, at_infinity: AsymptoticAtom) -> Self {
        AsymptoticProfile { at_zero, at_infinity }
    }

    pub fn end(&self, end: End) -> AsymptoticAtom {
        match end {
            End::Zero => self.at_zero,
            End::Infinity => self.at_infinity,
        }
    }
}

/// Functional inverse of a power-log profile. If `f ~ t^a log^b t loglog^c t`
/// at infinity with `a > 0`, the inverse behaves like
/// `s^(1/a) log^(-b/a) s loglog^(-c/a) s`; the mirrored rule holds at the
/// 0-end. An increasing bijection maps each end to itself, so the ends do
/// not swap.
pub fn profile_invert(pr: &AsymptoticProfile) -> Result<AsymptoticProfile, AsymError> {
    fn invert_end(a: AsymptoticAtom, which: &str) -> Result<AsymptoticAtom, AsymError> {
        if a.alpha <= 0.0 {
            return Err(AsymError::UnsupportedProfile {
                detail: format!("alpha = {} at the {which} end; pure-log bijections are not invertible within the scale", a.alpha),
            });
        }
        Ok(AsymptoticAtom::new(1.0 / a.alpha, -a.beta / a.alpha, -a.gamma / a.alpha))
    }
    Ok(AsymptoticProfile {
        at_zero: invert_end(pr.at_zero, "zero")?,
        at_infinity: invert_end(pr.at_infinity, "infinity")?,
    })
}

/// Core substitution: `u^za (log u)^zb (loglog u)^zg` where the argument `u`
/// has lex-positive atom `w` (so `u -> inf`), everything in the infinity-end
/// t-scale. Uses `log(t^a log^b t) ~ a log t` for `a != 0` and
/// `log(log^b t) ~ loglog t` to leading order, coefficients dropped.
fn compose_pos(
    za: f64,
    zb: f64,
    zg: f64,
    w: AsymptoticAtom,
) -> Result<AsymptoticAtom, AsymError> {
    let mut result = w.pow(za);
    if zb != 0.0 {
        let log_w = if w.alpha > 0.0 {
            AsymptoticAtom::new(0.0, 1.0, 0.0)
        } else if w.alpha == 0.0 && w.beta > 0.0 {
            AsymptoticAtom::new(0.0, 0.0, 1.0)
        } else {
            return Err(AsymError::FourthLogLevel);
        };
        result = result.mul(&log_w.pow(zb));
    }
    if zg != 0.0 {
        if w.alpha > 0.0 {
            result = result.mul(&AsymptoticAtom::new(0.0, 0.0, zg));
        } else {
            return Err(AsymError::FourthLogLevel);
        }
    }
    Ok(result)
}

fn compose_at_infinity(
    outer: &AsymptoticProfile,
    inner: AsymptoticAtom,
) -> Result<AsymptoticAtom, AsymError> {
    if inner.is_const() {
        return Err(AsymError::ConstantArgument);
    }
    match inner.lex_cmp(&CONST_ATOM) {
        Ordering::Greater => {
            // Argument tends to infinity: route to the outer infinity end.
            let z = outer.at_infinity;
            compose_pos(z.alpha, z.beta, z.gamma, inner)
        }
        Ordering::Less => {
            // Argument tends to zero. With v = 1/u (lex-positive atom -inner),
            // outer(u) ~ u^A (log 1/u)^B (loglog 1/u)^G = v^(-A) (log v)^B (loglog v)^G.
            let z = outer.at_zero;
            compose_pos(-z.alpha, z.beta, z.gamma, inner.neg())
        }
        Ordering::Equal => Err(AsymError::ConstantArgument),
    }
}

/// Atom of `outer(inner(t))` as `t` tends to `inner_end`, where `inner` is
/// the atom of the argument at that end (in the end's own scale).
///
/// Routing: a lex-positive inner atom means the argument escapes to the
/// outer function's matching end; lex-negative means the opposite end; the
/// zero atom means the argument tends to a positive constant, which is
/// outside the scale.
pub fn profile_compose(
    outer: &AsymptoticProfile,
    inner: AsymptoticAtom,
    inner_end: End,
) -> Result<AsymptoticAtom, AsymError> {
    match inner_end {
        End::Infinity => compose_at_infinity(outer, inner),
        End::Zero => {
            // Reflect t -> 1/t: the 0-end atom of inner(t) equals the
            // infinity-end atom of inner(1/u) with alpha negated.
            let reflected = AsymptoticAtom::new(-inner.alpha, inner.beta, inner.gamma);
            let res = compose_at_infinity(outer, reflected)?;
            Ok(AsymptoticAtom::new(-res.alpha, res.beta, res.gamma))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convergence {
    Converges,
    Diverges,
}

/// Classifies the improper integral of `t^alpha log^beta t loglog^gamma t dt`
/// at infinity; the atom must include any `1/t` factor of the integrand.
///
/// Boundary equality at the deepest level (-1, -1, -1) diverges: the
/// iterated-log substitution leaves a harmonic tail, and any deeper
/// correction is outside the scale.
pub fn integral_converges_at_infinity(integrand: AsymptoticAtom) -> Convergence {
    let a = integrand;
    let converges = a.alpha < -1.0
        || (a.alpha == -1.0 && a.beta < -1.0)
        || (a.alpha == -1.0 && a.beta == -1.0 && a.gamma < -1.0);
    if converges {
        Convergence::Converges
    } else {
        Convergence::Diverges
    }
}

/// Relative log-ratio consistency between a function and a declared atom at
/// the infinity end: `ln f(t) / reconstruction` should tend to 1.
pub fn log_ratio_at(
    f: &crate::funcdsl::MonotoneFunction,
    atom: AsymptoticAtom,
    t: f64,
) -> Result<f64, crate::funcdsl::NumericError> {
    let ln_f = f.eval_ln(t.ln())?;
    Ok(ln_f / atom.log_reconstruction(t.ln()))
}
