//! Positive affine transforms between equivalent scoring rules.
//!
//! Two binary rules are equivalent when one is `alpha * R + beta(x)` of the
//! other with `alpha > 0`. [`normalize`] picks the member of a class that lies
//! in `[0, 1]` with sure forecasts scoring 1, and [`canonical_form`] picks the
//! member whose truthful expected score bottoms out at exactly 0.

use crate::error::{Error, Result};
use crate::scoring::ScoringRule;

/// Tolerance of the golden-section search in [`canonical_form`].
pub const GOLDEN_TOLERANCE: f64 = 1e-10;

fn require_binary(rule: &ScoringRule, what: &str) -> Result<()> {
    if rule.is_binary() {
        Ok(())
    } else {
        Err(Error::UnsupportedRule(format!(
            "{what} is defined for bounded binary rules, got {rule}"
        )))
    }
}

/// Shifts and rescales a bounded binary rule into `[0, 1]` with
/// `R(0,0) = R(1,1) = 1` and minimum 0.
pub fn normalize(rule: &ScoringRule) -> Result<ScoringRule> {
    require_binary(rule, "normalization")?;
    let r = |y: f64, x: f64| rule.score_unchecked(y, x);
    let (r00, r11) = (r(0.0, 0.0), r(1.0, 1.0));
    // Ranges of R' = R - R(x, x) for each outcome.
    let r0 = r00 - r(1.0, 0.0);
    let r1 = r11 - r(0.0, 1.0);
    let range = r0.max(r1);
    if !(range > 0.0) {
        return Err(Error::UnsupportedRule(format!("{rule} is constant in the report")));
    }
    let scale = 1.0 / range;
    rule.affine(scale, &[1.0 - scale * r00, 1.0 - scale * r11])
}

/// Minimises a unimodal function on `[lo, hi]`; returns `(argmin, min)`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Truthful expected score `θ R(θ,1) + (1-θ) R(θ,0)`.
pub fn truthful_expected_score(rule: &ScoringRule, theta: f64) -> f64 {
    theta * rule.score_unchecked(theta, 1.0) + (1.0 - theta) * rule.score_unchecked(theta, 0.0)
}

/// Canonical representative of the rule's equivalence class: sure forecasts
/// score 1 and the minimum truthful expected score is 0.
pub fn canonical_form(rule: &ScoringRule) -> Result<ScoringRule> {
    require_binary(rule, "the canonical form")?;
    let (r00, r11) = (rule.score_unchecked(0.0, 0.0), rule.score_unchecked(1.0, 1.0));
    let shifted = |theta: f64| truthful_expected_score(rule, theta) - theta * r11 - (1.0 - theta) * r00;
    let (_, min) = golden_section_min(shifted, 0.0, 1.0, GOLDEN_TOLERANCE);
    if !(min < 0.0) {
        return Err(Error::UnsupportedRule(format!(
            "{rule} is not strictly proper (truthful expected score never dips below the sure-forecast line)"
        )));
    }
    let scale = 1.0 / -min;
    rule.affine(scale, &[1.0 - scale * r00, 1.0 - scale * r11])
}

/// Report grid used to compare canonical forms.
pub const EQUIVALENCE_GRID: usize = 100;

/// Decides whether two rules are positive affine transforms of each other by
/// comparing their canonical forms on a report grid.
pub fn are_equivalent(a: &ScoringRule, b: &ScoringRule, tol: f64) -> Result<bool> {
    let (ca, cb) = (canonical_form(a)?, canonical_form(b)?);
    let mut worst = 0.0f64;
    for k in 0..=EQUIVALENCE_GRID {
        let y = k as f64 / EQUIVALENCE_GRID as f64;
        for x in [0.0, 1.0] {
            worst = worst.max((ca.score_unchecked(y, x) - cb.score_unchecked(y, x)).abs());
        }
    }
    Ok(worst <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_diff(a: &ScoringRule, b: &ScoringRule) -> f64 {
        (0..=100)
            .flat_map(|k| [0.0, 1.0].map(|x| (k as f64 / 100.0, x)))
            .map(|(y, x)| (a.score(y, x).unwrap() - b.score(y, x).unwrap()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn built_ins_are_already_normalized() {
        for rule in [ScoringRule::quadratic(), ScoringRule::spherical()] {
            assert!(max_diff(&normalize(&rule).unwrap(), &rule) < 1e-15);
        }
    }

    #[test]
    fn doubled_quadratic_normalizes_back() {
        let doubled = ScoringRule::quadratic().scaled(2.0).unwrap();
        let n = normalize(&doubled).unwrap();
        assert!(max_diff(&n, &ScoringRule::quadratic()) < 1e-15);
    }

    #[test]
    fn canonical_quadratic() {
        let c = canonical_form(&ScoringRule::quadratic()).unwrap();
        for k in 0..=100 {
            let y = k as f64 / 100.0;
            for x in [0.0, 1.0] {
                let expected = 1.0 - 4.0 * (y - x) * (y - x);
                assert!((c.score(y, x).unwrap() - expected).abs() < 1e-9);
            }
        }
        let b = c.bounds();
        assert!((b.lower + 3.0).abs() < 1e-9 && (b.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_is_idempotent_and_class_invariant() {
        let q = ScoringRule::quadratic();
        let c = canonical_form(&q).unwrap();
        assert!(max_diff(&canonical_form(&c).unwrap(), &c) < 1e-9);
        let shifted = q.affine(2.0, &[0.3, 0.3]).unwrap();
        assert!(max_diff(&canonical_form(&shifted).unwrap(), &c) < 1e-9);
    }

    #[test]
    fn canonical_minimum_is_zero() {
        for rule in [ScoringRule::quadratic(), ScoringRule::spherical()] {
            let c = canonical_form(&rule).unwrap();
            assert_eq!(c.score(0.0, 0.0).unwrap(), 1.0);
            assert!((c.score(1.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
            let (_, min) = golden_section_min(|t| truthful_expected_score(&c, t), 0.0, 1.0, 1e-10);
            assert!(min.abs() < 1e-9, "{min}");
        }
    }

    #[test]
    fn equivalence() {
        let q = ScoringRule::quadratic();
        let q2 = q.affine(2.0, &[0.3, 0.3]).unwrap();
        assert!(are_equivalent(&q, &q2, 1e-9).unwrap());
        assert!(are_equivalent(&q, &q, 1e-9).unwrap());
        assert!(!are_equivalent(&q, &ScoringRule::spherical(), 1e-9).unwrap());
    }

    #[test]
    fn non_binary_rules_are_unsupported() {
        let r = ScoringRule::quadratic_on(0.0, 10.0).unwrap();
        assert!(matches!(normalize(&r), Err(Error::UnsupportedRule(_))));
        assert!(matches!(canonical_form(&r), Err(Error::UnsupportedRule(_))));
    }
}
