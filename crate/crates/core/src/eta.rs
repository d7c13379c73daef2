//! Construction of the increasing bijection `eta(t) = t / phi^{-1}(1/t)`,
//! its inverse, and the companion `h(t) = t phi^{-1}(t)`, together with the
//! structural checks the blow-up criteria rely on (convexity of eta and the
//! pair inequality `eta(a) b >= C eta(a / eta^{-1}(1/b))`).

use crate::asymptotics::{profile_invert, AsymError, AsymptoticAtom, AsymptoticProfile};
use crate::funcdsl::{
    invert_monotone_ln, MonotoneFunction, Monotonicity, NumericError,
    DEFAULT_INVERSION_REL_TOL,
};
use crate::grid::GeometricGrid;

/// eta, its inverse, h, and phi^{-1}, all built from a validated phi.
///
/// Every evaluator is a single numerical inversion away from phi:
/// `eta^{-1}(y)` is recovered through the directly computable
/// `H(z) = z phi(z)` via `eta^{-1}(y) = 1 / phi(H^{-1}(1/y))`, which avoids
/// nesting inversions.
#[derive(Clone, Debug)]
pub struct EtaBundle {
    pub phi: MonotoneFunction,
    pub phi_inverse: MonotoneFunction,
    pub eta: MonotoneFunction,
    pub eta_inverse: MonotoneFunction,
    pub h: MonotoneFunction,
}

/// Profiles of the derived functions when phi carries one.
pub fn derive_profiles(
    phi_profile: &AsymptoticProfile,
) -> Result<DerivedProfiles, AsymError> {
    let phi_inv = profile_invert(phi_profile)?;
    // eta(t) = t / phi^{-1}(1/t): the infinity end of eta sees the zero end
    // of phi^{-1} through the reciprocal argument, and vice versa.
    let z = phi_inv.at_zero;
    let i = phi_inv.at_infinity;
    let eta = AsymptoticProfile::new(
        AsymptoticAtom::new(1.0 + i.alpha, -i.beta, -i.gamma),
        AsymptoticAtom::new(1.0 + z.alpha, -z.beta, -z.gamma),
    );
    let eta_inverse = profile_invert(&eta)?;
    let one = AsymptoticAtom::new(1.0, 0.0, 0.0);
    let h = AsymptoticProfile::new(one.mul(&phi_inv.at_zero), one.mul(&phi_inv.at_infinity));
    Ok(DerivedProfiles { phi_inverse: phi_inv, eta, eta_inverse, h })
}

#[derive(Clone, Copy, Debug)]
pub struct DerivedProfiles {
    pub phi_inverse: AsymptoticProfile,
    pub eta: AsymptoticProfile,
    pub eta_inverse: AsymptoticProfile,
    pub h: AsymptoticProfile,
}

/// Builds the bundle from phi. `phi` should already be validated as an
/// increasing bijection; inversion failures surface lazily from the
/// evaluators.
pub fn build_eta(phi: &MonotoneFunction) -> Result<EtaBundle, NumericError> {
    let tol = DEFAULT_INVERSION_REL_TOL;

    let p = phi.clone();
    let phi_inverse = MonotoneFunction::from_ln_closure(
        move |y| invert_monotone_ln(&p, y, tol),
        Monotonicity::Increasing,
    );

    let p = phi.clone();
    let eta = MonotoneFunction::from_ln_closure(
        move |x| Ok(x - invert_monotone_ln(&p, -x, tol)?),
        Monotonicity::Increasing,
    );

    let p = phi.clone();
    let h = MonotoneFunction::from_ln_closure(
        move |x| Ok(x + invert_monotone_ln(&p, x, tol)?),
        Monotonicity::Increasing,
    );

    let p = phi.clone();
    let big_h = MonotoneFunction::from_ln_closure(
        move |z| Ok(z + p.eval_ln(z)?),
        Monotonicity::Increasing,
    );
    let p = phi.clone();
    let eta_inverse = MonotoneFunction::from_ln_closure(
        move |y| {
            let z = invert_monotone_ln(&big_h, -y, tol)?;
            Ok(-p.eval_ln(z)?)
        },
        Monotonicity::Increasing,
    );

    let mut bundle =
        EtaBundle { phi: phi.clone(), phi_inverse, eta, eta_inverse, h };
    if let Some(pr) = &phi.profile {
        if let Ok(d) = derive_profiles(pr) {
            bundle.phi_inverse.profile = Some(d.phi_inverse);
            bundle.eta.profile = Some(d.eta);
            bundle.eta_inverse.profile = Some(d.eta_inverse);
            bundle.h.profile = Some(d.h);
        }
    }
    Ok(bundle)
}

/// Worst relative defect of the three definitional identities on a grid:
/// `eta(t) phi^{-1}(1/t) = t`, `h(t) eta(1/t) = 1`, `eta(eta^{-1}(t)) = t`.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityReport {
    pub eta_phi_inv: f64,
    pub h_eta: f64,
    pub eta_round_trip: f64,
}

impl EtaBundle {
    pub fn verify_identities(&self, grid: &GeometricGrid) -> Result<IdentityReport, NumericError> {
        let mut rep = IdentityReport::default();
        for x in grid.ln_points() {
            // ln eta(t) + ln phi^{-1}(1/t) - ln t = 0
            let d1 = self.eta.eval_ln(x)? + self.phi_inverse.eval_ln(-x)? - x;
            // ln h(t) + ln eta(1/t) = 0
            let d2 = self.h.eval_ln(x)? + self.eta.eval_ln(-x)?;
            // eta(eta^{-1}(t)) = t
            let d3 = self.eta.eval_ln(self.eta_inverse.eval_ln(x)?)? - x;
            rep.eta_phi_inv = rep.eta_phi_inv.max(d1.abs());
            rep.h_eta = rep.h_eta.max(d2.abs());
            rep.eta_round_trip = rep.eta_round_trip.max(d3.abs());
        }
        Ok(rep)
    }

    /// Sampled table `t, eta, eta_inverse, h` in CSV form.
    pub fn sample_csv(&self, grid: &GeometricGrid) -> Result<String, NumericError> {
        let mut out = String::from("t,eta,eta_inverse,h\n");
        for x in grid.ln_points() {
            let t = x.exp();
            let e = self.eta.eval_ln(x)?.exp();
            let ei = self.eta_inverse.eval_ln(x)?.exp();
            let hv = self.h.eval_ln(x)?.exp();
            out.push_str(&format!("{t},{e},{ei},{hv}\n"));
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ConvexityReport {
    pub convex: bool,
    /// Most positive value of (f(mid) - chord) / f(c) over the scanned
    /// triples; negative values mean convexity held with margin.
    pub worst_violation: f64,
    pub range: (f64, f64),
}

const CONVEXITY_TOL: f64 = 1e-9;

/// Chord-midpoint convexity test on consecutive grid triples `(a, _, c)`:
/// requires `f((a+c)/2) <= (f(a)+f(c))/2 + tol f(c)` everywhere.
pub fn check_convexity(
    f: &MonotoneFunction,
    grid: &GeometricGrid,
) -> Result<ConvexityReport, NumericError> {
    let ts = grid.points();
    let mut worst = f64::NEG_INFINITY;
    for w in ts.windows(3) {
        let (a, c) = (w[0], w[2]);
        let fa = f.eval(a)?;
        let fc = f.eval(c)?;
        let fm = f.eval(0.5 * (a + c))?;
        let violation = (fm - 0.5 * (fa + fc)) / fc;
        worst = worst.max(violation);
    }
    Ok(ConvexityReport { convex: worst <= CONVEXITY_TOL, worst_violation: worst, range: (grid.lo, grid.hi) })
}

#[derive(Clone, Copy, Debug)]
pub struct PairScanReport {
    pub infimum: f64,
    pub warnings: usize,
}

/// Infimum of `eta(a) b / eta(a / eta^{-1}(1/b))` over a geometric product
/// grid; a positive infimum stable under refinement certifies the pair
/// inequality on the sampled range.
pub fn check_lemma_3_5(bundle: &EtaBundle, pairs: &GeometricGrid) -> PairScanReport {
    let xs = pairs.ln_points();
    let mut inf = f64::INFINITY;
    let mut warnings = 0usize;
    for &la in &xs {
        for &lb in &xs {
            let ratio_ln = (|| -> Result<f64, NumericError> {
                let denom_arg = la - bundle.eta_inverse.eval_ln(-lb)?;
                Ok(bundle.eta.eval_ln(la)? + lb - bundle.eta.eval_ln(denom_arg)?)
            })();
            match ratio_ln {
                Ok(v) if !v.is_nan() => inf = inf.min(v.exp()),
                _ => warnings += 1,
            }
        }
    }
    PairScanReport { infimum: inf, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcdsl::{check_quasi_scaling, parse_expression};
    use crate::grid;
    use std::collections::BTreeMap;

    fn mono(text: &str) -> MonotoneFunction {
        let e = parse_expression(text, &BTreeMap::new()).unwrap();
        MonotoneFunction::from_expression(e, Monotonicity::Increasing)
    }

    fn small_grid() -> GeometricGrid {
        GeometricGrid::new(1e-6, 1e6, 201)
    }

    #[test]
    fn linear_phi_gives_square_eta() {
        let bundle = build_eta(&mono("t")).unwrap();
        // eta(t) = t^2
        for t in [0.1, 1.0, 3.0, 50.0] {
            let v = bundle.eta.eval(t).unwrap();
            assert!((v - t * t).abs() < 1e-9 * t * t, "eta({t}) = {v}");
        }
        let inv = bundle.eta_inverse.eval(4.0).unwrap();
        assert!((inv - 2.0).abs() < 1e-9);
    }

    #[test]
    fn power_phi_eta_values() {
        // phi = t^(p-1), p = 3: eta(t) = t^(3/2), eta(4) = 8.
        let phi = MonotoneFunction::from_expression(
            parse_expression("t^(p-1)", &[("p".to_string(), 3.0)].into_iter().collect()).unwrap(),
            Monotonicity::Increasing,
        );
        let bundle = build_eta(&phi).unwrap();
        let v = bundle.eta.eval(4.0).unwrap();
        assert!((v - 8.0).abs() < 1e-8, "eta(4) = {v}");
    }

    #[test]
    fn identities_hold_on_standard_grid() {
        for text in ["t", "t^2", "t^2 * log(2 + t)", "t^0.7 * log(2+t)"] {
            let bundle = build_eta(&mono(text)).unwrap();
            let rep = bundle.verify_identities(&small_grid()).unwrap();
            assert!(rep.eta_phi_inv < 1e-9, "{text}: eta*phi_inv defect {}", rep.eta_phi_inv);
            assert!(rep.h_eta < 1e-9, "{text}: h*eta defect {}", rep.h_eta);
            assert!(rep.eta_round_trip < 1e-8, "{text}: round trip {}", rep.eta_round_trip);
        }
    }

    #[test]
    fn derived_profiles_match_power_log_table() {
        // phi ~ t^(p-1) log^nu t at infinity, mirrored at zero.
        let (p, nu) = (3.0, 2.0);
        let pr = AsymptoticProfile::new(
            AsymptoticAtom::new(p - 1.0, -nu, 0.0),
            AsymptoticAtom::new(p - 1.0, nu, 0.0),
        );
        let d = derive_profiles(&pr).unwrap();
        assert_eq!(d.eta.at_infinity, AsymptoticAtom::new(p / (p - 1.0), -nu / (p - 1.0), 0.0));
        assert_eq!(d.eta.at_zero, AsymptoticAtom::new(p / (p - 1.0), nu / (p - 1.0), 0.0));
        assert_eq!(
            d.eta_inverse.at_infinity,
            AsymptoticAtom::new((p - 1.0) / p, nu / p, 0.0)
        );
        assert_eq!(d.phi_inverse.at_infinity, AsymptoticAtom::new(0.5, -1.0, 0.0));
    }

    #[test]
    fn convexity_checks() {
        let g = GeometricGrid::new(1e-4, 1e4, 400);
        assert!(check_convexity(&mono("t^2"), &g).unwrap().convex);
        // p = 2: eta = t^2, convex.
        let bundle = build_eta(&mono("t")).unwrap();
        assert!(check_convexity(&bundle.eta, &g).unwrap().convex);
        let rep = check_convexity(&mono("t^0.5"), &g).unwrap();
        assert!(!rep.convex);
        assert!(rep.worst_violation > 0.0);
    }

    #[test]
    fn lemma_3_5_ratio_is_one_for_linear_phi() {
        // eta = t^2, eta^{-1} = sqrt: the ratio collapses to exactly 1.
        let bundle = build_eta(&mono("t")).unwrap();
        let rep = check_lemma_3_5(&bundle, &GeometricGrid::new(1e-3, 1e3, 21));
        assert_eq!(rep.warnings, 0);
        assert!((rep.infimum - 1.0).abs() < 1e-8, "inf = {}", rep.infimum);
    }

    #[test]
    fn lemma_3_5_single_point_sanity() {
        let bundle = build_eta(&mono("t^2 * log(e + t)")).unwrap();
        // a = b = 1.
        let ratio = {
            let denom_arg = 0.0 - bundle.eta_inverse.eval_ln(0.0).unwrap();
            (bundle.eta.eval_ln(0.0).unwrap() - bundle.eta.eval_ln(denom_arg).unwrap()).exp()
        };
        assert!(ratio.is_finite() && ratio > 0.0);
    }

    #[test]
    fn lemma_3_5_stable_infimum_for_log_weighted_phi() {
        let bundle = build_eta(&mono("t^2 * log(e + t)")).unwrap();
        let coarse = check_lemma_3_5(&bundle, &GeometricGrid::new(1e-3, 1e3, 21));
        let fine = check_lemma_3_5(&bundle, &GeometricGrid::new(1e-3, 1e3, 41));
        assert!(coarse.infimum > 0.01 && fine.infimum > 0.01);
        assert!(fine.infimum >= 0.5 * coarse.infimum);
    }

    #[test]
    fn eta_inherits_quasi_scaling() {
        let bundle = build_eta(&mono("t^2 * log(2 + t)")).unwrap();
        for c in [0.5, 2.0, 10.0] {
            let rep = check_quasi_scaling(&bundle.eta, c, &GeometricGrid::new(1e-3, 1e3, 41));
            assert_eq!(rep.warnings, 0, "c = {c}");
            assert!(rep.infimum > 0.0 && rep.supremum.is_finite(), "c = {c}: {rep:?}");
        }
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let bundle = build_eta(&mono("t")).unwrap();
        let csv = bundle.sample_csv(&GeometricGrid::new(0.5, 2.0, 3)).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,eta,eta_inverse,h");
        assert_eq!(lines.len(), 4);
    }
}
