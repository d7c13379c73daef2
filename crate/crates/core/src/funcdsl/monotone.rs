use std::fmt;
use std::sync::Arc;

use super::eval::EvalError;
use super::parser::Expression;
use crate::asymptotics::AsymptoticProfile;
use crate::grid::GeometricGrid;

pub const DEFAULT_INVERSION_REL_TOL: f64 = 1e-12;

/// Bracket limits for inversion, in the plain domain: [1e-300, 1e300].
const LN_BRACKET_MAX: f64 = 690.0;
/// Bracket expansion factor 4 per probe, i.e. additive ln 4 steps in log space.
const LN_EXPANSION_STEP: f64 = 1.3862943611198906;
const MAX_ITERATIONS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    /// No declared direction (admissible for coefficient lower bounds).
    Unconstrained,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NumericError {
    Eval(EvalError),
    /// No sign change found within [1e-300, 1e300].
    BracketNotFound { target_ln: f64 },
    /// Iteration cap reached before the tolerance.
    ToleranceNotReached { best_rel: f64 },
    NotDeclaredIncreasing,
    NotStrictlyMonotone { at: f64 },
    /// Grid-end values do not escape to 0 and infinity (ratio below 1e6).
    NotSurjective { end_ratio_ln: f64 },
    QuadratureNonConvergence { detail: String },
    InvalidInput { msg: String },
}

impl fmt::Display for NumericError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericError::Eval(e) => write!(f, "evaluation failed: {e}"),
            NumericError::BracketNotFound { target_ln } => {
                write!(f, "no bracket within [1e-300, 1e300] for ln-target {target_ln}")
            }
            NumericError::ToleranceNotReached { best_rel } => {
                write!(f, "inversion tolerance not reached in {MAX_ITERATIONS} iterations (best {best_rel:.3e})")
            }
            NumericError::NotDeclaredIncreasing => write!(f, "function is not declared increasing"),
            NumericError::NotStrictlyMonotone { at } => {
                write!(f, "sampled values not strictly monotone near t = {at:.6e}")
            }
            NumericError::NotSurjective { end_ratio_ln } => {
                write!(f, "grid end values span only e^{end_ratio_ln:.3} (< 1e6 ratio)")
            }
            NumericError::QuadratureNonConvergence { detail } => {
                write!(f, "quadrature did not converge: {detail}")
            }
            NumericError::InvalidInput { msg } => write!(f, "invalid input: {msg}"),
        }
    }
}

impl std::error::Error for NumericError {}

impl From<EvalError> for NumericError {
    fn from(e: EvalError) -> Self {
        NumericError::Eval(e)
    }
}

type LnEvaluator = Arc<dyn Fn(f64) -> Result<f64, NumericError> + Send + Sync>;

/// A positive function of one positive variable with a declared monotonicity
/// direction, an optional defining expression, and an optional asymptotic
/// profile.
///
/// The forward evaluator works in log space (`ln t -> ln f(t)`), which keeps
/// every derived computation (inversion, eta construction, tail quadrature)
/// stable over the full bracket range.
#[derive(Clone)]
pub struct MonotoneFunction {
    eval_ln: LnEvaluator,
    pub expr: Option<Expression>,
    pub profile: Option<AsymptoticProfile>,
    pub direction: Monotonicity,
}

impl fmt::Debug for MonotoneFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneFunction")
            .field("expr", &self.expr.as_ref().map(|e| e.to_string()))
            .field("profile", &self.profile)
            .field("direction", &self.direction)
            .finish()
    }
}

impl MonotoneFunction {
    pub fn from_expression(expr: Expression, direction: Monotonicity) -> Self {
        let captured = expr.clone();
        MonotoneFunction {
            eval_ln: Arc::new(move |x| captured.eval_ln(x).map_err(NumericError::from)),
            expr: Some(expr),
            profile: None,
            direction,
        }
    }

    pub fn from_ln_closure<F>(f: F, direction: Monotonicity) -> Self
    where
        F: Fn(f64) -> Result<f64, NumericError> + Send + Sync + 'static,
    {
        MonotoneFunction { eval_ln: Arc::new(f), expr: None, profile: None, direction }
    }

    pub fn with_profile(mut self, profile: AsymptoticProfile) -> Self {
        self.profile = Some(profile);
        self
    }

    /// `ln t -> ln f(t)`.
    pub fn eval_ln(&self, ln_t: f64) -> Result<f64, NumericError> {
        (self.eval_ln)(ln_t)
    }

    /// Plain evaluation; `t` must be positive.
    pub fn eval(&self, t: f64) -> Result<f64, NumericError> {
        if t == 0.0 {
            // Limit value at the origin for bijections of (0, inf).
            return Ok(0.0);
        }
        if !(t > 0.0) {
            return Err(NumericError::InvalidInput { msg: format!("t = {t} not positive") });
        }
        Ok(self.eval_ln(t.ln())?.exp())
    }

    /// Samples the function on `grid` and checks it is strictly increasing
    /// with end values spanning at least a 1e6 ratio.
    pub fn validate_increasing_bijection(
        &self,
        grid: &GeometricGrid,
    ) -> Result<BijectionReport, NumericError> {
        if self.direction != Monotonicity::Increasing {
            return Err(NumericError::NotDeclaredIncreasing);
        }
        let xs = grid.ln_points();
        let mut prev = self.eval_ln(xs[0])?;
        let first = prev;
        for &x in &xs[1..] {
            let v = self.eval_ln(x)?;
            if !(v > prev) {
                return Err(NumericError::NotStrictlyMonotone { at: x.exp() });
            }
            prev = v;
        }
        let end_ratio_ln = prev - first;
        if end_ratio_ln < (1e6_f64).ln() {
            return Err(NumericError::NotSurjective { end_ratio_ln });
        }
        Ok(BijectionReport { grid: *grid, end_ratio_ln })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BijectionReport {
    pub grid: GeometricGrid,
    pub end_ratio_ln: f64,
}

/// Solves `f(t) = y` for a strictly increasing `f` given `ln y`; returns
/// `ln t`. Tolerance is relative in the value domain, which in log space is
/// `|ln f - ln y| <= rel_tol` to first order.
pub fn invert_monotone_ln(
    f: &MonotoneFunction,
    target_ln: f64,
    rel_tol: f64,
) -> Result<f64, NumericError> {
    if !target_ln.is_finite() {
        return Err(NumericError::InvalidInput { msg: format!("ln y = {target_ln}") });
    }
    let mut evals = 0usize;
    macro_rules! value_at {
        ($x:expr) => {{
            evals += 1;
            if evals > MAX_ITERATIONS {
                return Err(NumericError::ToleranceNotReached { best_rel: f64::NAN });
            }
            f.eval_ln($x)
        }};
    }

    // Expand geometrically from t = 1 until the target is bracketed.
    let v0 = value_at!(0.0)?;
    let (mut lo, mut hi, mut vlo, mut vhi);
    if v0 == target_ln {
        return Ok(0.0);
    } else if v0 < target_ln {
        (lo, vlo) = (0.0, v0);
        let mut x = LN_EXPANSION_STEP;
        loop {
            if x > LN_BRACKET_MAX {
                return Err(NumericError::BracketNotFound { target_ln });
            }
            let v = value_at!(x)?;
            if v >= target_ln {
                (hi, vhi) = (x, v);
                break;
            }
            (lo, vlo) = (x, v);
            x += LN_EXPANSION_STEP;
        }
    } else {
        (hi, vhi) = (0.0, v0);
        let mut x = -LN_EXPANSION_STEP;
        loop {
            if x < -LN_BRACKET_MAX {
                return Err(NumericError::BracketNotFound { target_ln });
            }
            let v = value_at!(x)?;
            if v <= target_ln {
                (lo, vlo) = (x, v);
                break;
            }
            (hi, vhi) = (x, v);
            x -= LN_EXPANSION_STEP;
        }
    }

    // Bisection with a secant polish once the bracket is tight.
    let mut best = (lo, (vlo - target_ln).abs());
    loop {
        if evals >= MAX_ITERATIONS {
            return Err(NumericError::ToleranceNotReached { best_rel: best.1 });
        }
        let mid = if hi - lo < 0.25 && vhi > vlo {
            // Derivative-free secant step, clamped inside the bracket.
            let s = lo + (target_ln - vlo) * (hi - lo) / (vhi - vlo);
            if s > lo && s < hi { s } else { 0.5 * (lo + hi) }
        } else {
            0.5 * (lo + hi)
        };
        let v = value_at!(mid)?;
        let err = (v - target_ln).abs();
        if err < best.1 {
            best = (mid, err);
        }
        if err <= rel_tol {
            return Ok(mid);
        }
        if v < target_ln {
            (lo, vlo) = (mid, v);
        } else {
            (hi, vhi) = (mid, v);
        }
        if hi - lo <= f64::EPSILON * (1.0 + lo.abs().max(hi.abs())) {
            // Interval exhausted at machine precision.
            if best.1 <= rel_tol.max(1e-9) {
                return Ok(best.0);
            }
            return Err(NumericError::ToleranceNotReached { best_rel: best.1 });
        }
    }
}

/// Solves `f(t) = y` for a strictly increasing `f`; plain-domain wrapper.
pub fn invert_monotone(f: &MonotoneFunction, y: f64, rel_tol: f64) -> Result<f64, NumericError> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(NumericError::InvalidInput { msg: format!("y = {y} not a positive real") });
    }
    Ok(invert_monotone_ln(f, y.ln(), rel_tol)?.exp())
}

/// Outcome of a grid scan of a pointwise ratio: extremes over valid points
/// plus the number of points excluded because evaluation failed.
#[derive(Clone, Copy, Debug)]
pub struct ScanReport {
    pub infimum: f64,
    pub supremum: f64,
    pub warnings: usize,
}

/// Scans `f(t1) f(t2) / f(t1 t2)` over a geometric product grid and returns
/// the infimum ratio. A value bounded away from zero (>= 1e-6, stable under
/// refinement) certifies almost semi-multiplicativity on the sampled range.
pub fn check_almost_semimultiplicative(f: &MonotoneFunction, axis: &GeometricGrid) -> ScanReport {
    let xs = axis.ln_points();
    let mut inf = f64::INFINITY;
    let mut sup = f64::NEG_INFINITY;
    let mut warnings = 0usize;
    for &x1 in &xs {
        for &x2 in &xs {
            let ratio_ln = match (f.eval_ln(x1), f.eval_ln(x2), f.eval_ln(x1 + x2)) {
                (Ok(a), Ok(b), Ok(c)) => a + b - c,
                _ => {
                    warnings += 1;
                    continue;
                }
            };
            if ratio_ln.is_nan() {
                warnings += 1;
                continue;
            }
            let ratio = ratio_ln.exp();
            inf = inf.min(ratio);
            sup = sup.max(ratio);
        }
    }
    ScanReport { infimum: inf, supremum: sup, warnings }
}

/// Scans `f(c t) / f(t)` over a geometric grid; both extremes finite and
/// positive (stable under refinement) certify the quasi-scaling property.
pub fn check_quasi_scaling(f: &MonotoneFunction, c: f64, axis: &GeometricGrid) -> ScanReport {
    assert!(c > 0.0);
    let ln_c = c.ln();
    let mut inf = f64::INFINITY;
    let mut sup = f64::NEG_INFINITY;
    let mut warnings = 0usize;
    for x in axis.ln_points() {
        let ratio_ln = match (f.eval_ln(x + ln_c), f.eval_ln(x)) {
            (Ok(a), Ok(b)) => a - b,
            _ => {
                warnings += 1;
                continue;
            }
        };
        if ratio_ln.is_nan() {
            warnings += 1;
            continue;
        }
        let ratio = ratio_ln.exp();
        inf = inf.min(ratio);
        sup = sup.max(ratio);
    }
    ScanReport { infimum: inf, supremum: sup, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcdsl::parse_expression;
    use crate::grid;
    use std::collections::BTreeMap;

    fn mono(text: &str) -> MonotoneFunction {
        let e = parse_expression(text, &BTreeMap::new()).unwrap();
        MonotoneFunction::from_expression(e, Monotonicity::Increasing)
    }

    /// Plain-domain bisection, independent of the log-space implementation.
    fn bisect_oracle(f: impl Fn(f64) -> f64, y: f64, mut lo: f64, mut hi: f64) -> f64 {
        assert!(f(lo) < y && f(hi) > y);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn invert_square() {
        let f = mono("t^2");
        let t = invert_monotone(&f, 4.0, 1e-12).unwrap();
        assert!((t - 2.0).abs() < 1e-11);
    }

    #[test]
    fn invert_identity() {
        let f = mono("t");
        let t = invert_monotone(&f, 7.0, 1e-12).unwrap();
        assert!((t - 7.0).abs() < 1e-11);
    }

    #[test]
    fn invert_cubic_log_against_bisection_oracle() {
        let f = mono("t^3 * log(e + t)");
        let oracle = bisect_oracle(|t: f64| t.powi(3) * (std::f64::consts::E + t).ln(), 10.0, 1.0, 3.0);
        let t = invert_monotone(&f, 10.0, 1e-12).unwrap();
        assert!((t - oracle).abs() <= 1e-9 * oracle, "{t} vs oracle {oracle}");
    }

    #[test]
    fn invert_far_targets() {
        let f = mono("t^2 * log(2 + t)");
        for y in [1e-30, 1e-6, 1.0, 1e8, 1e30, 1e120] {
            let t = invert_monotone(&f, y, 1e-12).unwrap();
            let back = f.eval(t).unwrap();
            assert!((back - y).abs() <= 1e-9 * y, "y={y}: f(t)={back}");
        }
    }

    #[test]
    fn bracket_failure_reported() {
        // Bounded above by 1, so y = 10 is unreachable.
        let f = mono("t / (1 + t)");
        assert!(matches!(
            invert_monotone(&f, 10.0, 1e-12),
            Err(NumericError::BracketNotFound { .. })
        ));
    }

    #[test]
    fn round_trip_and_order_preservation() {
        let f = mono("t^1.7 * log(2 + t)^2");
        let mut prev_t = 0.0;
        for i in 0..40 {
            let y = 10f64.powf(-8.0 + 16.0 * i as f64 / 39.0);
            let t = invert_monotone(&f, y, 1e-10).unwrap();
            assert!((f.eval(t).unwrap() - y).abs() <= 1e-9 * y);
            assert!(t > prev_t, "inversion not monotone at y = {y}");
            prev_t = t;
        }
    }

    #[test]
    fn validates_bijection() {
        let g = grid::validation_grid();
        assert!(mono("t^2").validate_increasing_bijection(&g).is_ok());
        assert!(matches!(
            mono("t/(1+t)").validate_increasing_bijection(&g),
            Err(NumericError::NotSurjective { .. })
        ));
        // Guard too weak for the log weight: not monotone on the grid.
        let bad = mono("t * log(2+t)^(3-6)");
        assert!(matches!(
            bad.validate_increasing_bijection(&g),
            Err(NumericError::NotStrictlyMonotone { .. })
        ));
    }

    #[test]
    fn power_functions_are_exactly_multiplicative() {
        let f = mono("t^2");
        let rep = check_almost_semimultiplicative(&f, &grid::semimultiplicative_grid());
        assert_eq!(rep.warnings, 0);
        assert!((rep.infimum - 1.0).abs() < 1e-12, "inf = {}", rep.infimum);
        assert!((rep.supremum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_weighted_power_is_almost_semimultiplicative() {
        let f = mono("t * log(2 + t)");
        let coarse = check_almost_semimultiplicative(&f, &grid::semimultiplicative_grid());
        let fine =
            check_almost_semimultiplicative(&f, &grid::semimultiplicative_grid().refined());
        assert!(coarse.infimum > 1e-6 && fine.infimum > 1e-6);
        assert!(fine.infimum >= 0.5 * coarse.infimum, "unstable under refinement");
    }

    #[test]
    fn exponential_fails_semimultiplicativity() {
        let f = MonotoneFunction::from_expression(
            parse_expression("exp(t)", &BTreeMap::new()).unwrap(),
            Monotonicity::Increasing,
        );
        let narrow = check_almost_semimultiplicative(&f, &GeometricGrid::new(0.5, 2.0, 11));
        let wide = check_almost_semimultiplicative(&f, &grid::semimultiplicative_grid());
        assert!(wide.infimum < 1e-3 * narrow.infimum, "{} vs {}", wide.infimum, narrow.infimum);
    }

    #[test]
    fn quasi_scaling_of_homogeneous_function_is_constant() {
        let f = mono("t^2");
        let rep = check_quasi_scaling(&f, 2.0, &grid::semimultiplicative_grid());
        assert!((rep.infimum - 4.0).abs() < 1e-12 && (rep.supremum - 4.0).abs() < 1e-12);
    }

    #[test]
    fn quasi_scaling_of_log_weighted_identity_is_bounded() {
        let f = mono("t * log(e + t)");
        let rep = check_quasi_scaling(&f, 10.0, &grid::semimultiplicative_grid());
        assert!(rep.infimum >= 10.0 - 1e-9, "inf = {}", rep.infimum);
        assert!(rep.supremum < 25.0, "sup = {}", rep.supremum);
    }

    #[test]
    fn quasi_scaling_of_exponential_unbounded() {
        let f = MonotoneFunction::from_expression(
            parse_expression("exp(t)", &BTreeMap::new()).unwrap(),
            Monotonicity::Increasing,
        );
        let rep = check_quasi_scaling(&f, 2.0, &grid::semimultiplicative_grid());
        assert!(rep.supremum > 1e50 || rep.warnings > 0);
    }
}
