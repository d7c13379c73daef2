//! Adaptive Simpson quadrature with a relative tolerance.

use crate::funcdsl::NumericError;

/// Integrates `f` over `[a, b]` to the requested relative tolerance.
///
/// Standard adaptive Simpson with the Richardson correction term; the
/// per-segment error budget halves on each split. `max_evals` bounds the
/// total number of integrand evaluations; exceeding it is reported as
/// quadrature non-convergence.
pub fn adaptive_simpson<F>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_evals: usize,
) -> Result<f64, NumericError>
where
    F: Fn(f64) -> Result<f64, NumericError>,
{
    let mut evals = 0usize;
    let mut eval = |x: f64| -> Result<f64, NumericError> {
        evals += 1;
        if evals > max_evals {
            return Err(NumericError::QuadratureNonConvergence {
                detail: format!("evaluation budget {max_evals} exhausted on [{a}, {b}]"),
            });
        }
        let v = f(x)?;
        if v.is_nan() {
            return Err(NumericError::QuadratureNonConvergence {
                detail: format!("integrand NaN at {x}"),
            });
        }
        Ok(v)
    };

    let fa = eval(a)?;
    let fb = eval(b)?;
    let m = 0.5 * (a + b);
    let fm = eval(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = rel_tol * whole.abs();

    struct Seg {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        s: f64,
        tol: f64,
        depth: u32,
    }

    let mut stack = vec![Seg { a, b, fa, fm, fb, s: whole, tol, depth: 0 }];
    let mut total = 0.0;
    while let Some(seg) = stack.pop() {
        let m = 0.5 * (seg.a + seg.b);
        let lm = 0.5 * (seg.a + m);
        let rm = 0.5 * (m + seg.b);
        let flm = eval(lm)?;
        let frm = eval(rm)?;
        let left = (m - seg.a) / 6.0 * (seg.fa + 4.0 * flm + seg.fm);
        let right = (seg.b - m) / 6.0 * (seg.fm + 4.0 * frm + seg.fb);
        let s2 = left + right;
        let err = s2 - seg.s;
        if err.abs() <= 15.0 * seg.tol.max(f64::MIN_POSITIVE) || seg.depth >= 48 {
            total += s2 + err / 15.0;
        } else {
            let half_tol = 0.5 * seg.tol;
            stack.push(Seg {
                a: seg.a,
                b: m,
                fa: seg.fa,
                fm: flm,
                fb: seg.fm,
                s: left,
                tol: half_tol,
                depth: seg.depth + 1,
            });
            stack.push(Seg {
                a: m,
                b: seg.b,
                fa: seg.fm,
                fm: frm,
                fb: seg.fb,
                s: right,
                tol: half_tol,
                depth: seg.depth + 1,
            });
        }
    }
    Ok(total)
}
