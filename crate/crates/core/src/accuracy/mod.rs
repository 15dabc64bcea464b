//! How often the most accurate forecaster wins.
//!
//! Accuracy is measured by expected score under a known ground truth `θ`.
//! The event lottery is rank accurate (a better forecaster is always more
//! likely to be picked), and its independent-event variant is limit accurate:
//! with enough events the best forecaster wins with any target probability.

mod limit;
mod prop7;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::mechanisms::elf::require_unit_rule;
use crate::mechanisms::{Mechanism, OutcomeVector, ReportMatrix, ScoreMatrix};
use crate::scoring::{expected_score, ScoringRule, TrueDistribution};

pub use limit::{hoeffding_m_bound, monte_carlo_best_selection_rate, LimitAccuracyParams, RateEstimate};
pub use prop7::{prop7_grid_sweep, prop7_infeasibility, Prop7Sweep};

/// Slack used when comparing expected scores and selection probabilities.
pub const RANK_TOLERANCE: f64 = 1e-12;

fn expected_scores(reports: &ReportMatrix, theta: &TrueDistribution, rule: &ScoringRule) -> Result<Vec<f64>> {
    if reports.m() != theta.m() {
        return Err(invalid(format!(
            "reports cover {} events, distribution covers {}",
            reports.m(),
            theta.m()
        )));
    }
    reports.rows().map(|y| expected_score(rule, y, theta)).collect()
}

/// Selection probabilities of the event lottery in expectation over `θ`:
/// `1/n + (1/n)(R(y_i, θ) - mean_{j≠i} R(y_j, θ))`.
pub fn elf_selection_probabilities_closed_form(
    reports: &ReportMatrix,
    theta: &TrueDistribution,
    rule: &ScoringRule,
) -> Result<Vec<f64>> {
    require_unit_rule(rule)?;
    let scores = expected_scores(reports, theta, rule)?;
    let n = scores.len() as f64;
    let total: f64 = scores.iter().sum();
    Ok(scores
        .iter()
        .map(|&s| 1.0 / n + (s - (total - s) / (n - 1.0)) / n)
        .collect())
}

/// Forecaster `i`'s entry of [`elf_selection_probabilities_closed_form`].
pub fn elf_selection_probability_closed_form(
    reports: &ReportMatrix,
    theta: &TrueDistribution,
    rule: &ScoringRule,
    i: usize,
) -> Result<f64> {
    if i >= reports.n() {
        return Err(invalid(format!("forecaster {i} out of range for n={}", reports.n())));
    }
    Ok(elf_selection_probabilities_closed_form(reports, theta, rule)?[i])
}

/// Selection probabilities of any mechanism, averaged over every outcome
/// vector in the support of `θ`.
pub fn exact_selection_distribution(
    mechanism: &Mechanism,
    reports: &ReportMatrix,
    theta: &TrueDistribution,
    rule: &ScoringRule,
    dp_state_limit: usize,
) -> Result<Vec<f64>> {
    mechanism.check_rule(rule)?;
    if reports.m() != theta.m() {
        return Err(invalid("reports and distribution disagree on the event count"));
    }
    let mut total = vec![0.0; reports.n()];
    for (p, x) in theta.support()? {
        let scores = ScoreMatrix::from_reports(reports, &OutcomeVector::new(x), rule)?;
        let d = mechanism.selection_distribution(&scores, dp_state_limit)?;
        for (acc, v) in total.iter_mut().zip(d) {
            *acc += p * v;
        }
    }
    Ok(total)
}

/// Expected scores, the best forecaster and its margin over the runner-up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyProfile {
    pub expected_scores: Vec<f64>,
    /// Lowest index attaining the maximum.
    pub best: usize,
    /// `min_{j≠best} (score_best - score_j)`.
    pub gap: f64,
    /// Several forecasters share the maximum, so `gap` is zero.
    pub degenerate: bool,
}

pub fn accuracy_profile(
    reports: &ReportMatrix,
    theta: &TrueDistribution,
    rule: &ScoringRule,
) -> Result<AccuracyProfile> {
    profile_from_scores(expected_scores(reports, theta, rule)?)
}

pub fn profile_from_scores(expected_scores: Vec<f64>) -> Result<AccuracyProfile> {
    if expected_scores.len() < 2 {
        return Err(invalid("accuracy profiles need at least two forecasters"));
    }
    let mut best = 0;
    for (j, &s) in expected_scores.iter().enumerate() {
        if s > expected_scores[best] {
            best = j;
        }
    }
    let top = expected_scores[best];
    let gap = expected_scores
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != best)
        .map(|(_, &s)| top - s)
        .fold(f64::INFINITY, f64::min);
    Ok(AccuracyProfile {
        degenerate: gap == 0.0,
        expected_scores,
        best,
        gap,
    })
}

/// Whether higher expected score and higher selection probability agree for
/// every pair. A strict difference on either side (beyond
/// [`RANK_TOLERANCE`]) must be matched by a strict difference in the same
/// direction on the other.
pub fn is_rank_accurate(expected_scores: &[f64], selection: &[f64]) -> bool {
    let n = expected_scores.len();
    assert_eq!(n, selection.len(), "score and probability vectors differ in length");
    for i in 0..n {
        for j in 0..n {
            let ds = expected_scores[i] - expected_scores[j];
            let dp = selection[i] - selection[j];
            if (ds > RANK_TOLERANCE && dp <= 0.0) || (dp > RANK_TOLERANCE && ds <= 0.0) {
                return false;
            }
        }
    }
    true
}

/// Rank accuracy of the event lottery, via the closed form.
pub fn rank_accuracy_check(reports: &ReportMatrix, theta: &TrueDistribution, rule: &ScoringRule) -> Result<bool> {
    let scores = expected_scores(reports, theta, rule)?;
    let probs = elf_selection_probabilities_closed_form(reports, theta, rule)?;
    Ok(is_rank_accurate(&scores, &probs))
}

/// Rank accuracy of any mechanism, via [`exact_selection_distribution`].
pub fn mechanism_rank_accuracy_check(
    mechanism: &Mechanism,
    reports: &ReportMatrix,
    theta: &TrueDistribution,
    rule: &ScoringRule,
    dp_state_limit: usize,
) -> Result<bool> {
    let scores = expected_scores(reports, theta, rule)?;
    let probs = exact_selection_distribution(mechanism, reports, theta, rule, dp_state_limit)?;
    Ok(is_rank_accurate(&scores, &probs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::ielf::DEFAULT_DP_STATE_LIMIT;

    fn single(ys: &[f64]) -> ReportMatrix {
        ReportMatrix::new(ys.iter().map(|&y| vec![y]).collect()).unwrap()
    }

    fn theta(t: &[f64]) -> TrueDistribution {
        TrueDistribution::independent(t.to_vec()).unwrap()
    }

    #[test]
    fn closed_form_hand_value() {
        // expected scores 0.75 and 0.66
        let p =
            elf_selection_probability_closed_form(&single(&[0.5, 0.8]), &theta(&[0.5]), &ScoringRule::quadratic(), 0)
                .unwrap();
        assert!((p - 0.545).abs() < 1e-12);
        let p = elf_selection_probabilities_closed_form(
            &single(&[0.3, 0.3, 0.3]),
            &theta(&[0.9]),
            &ScoringRule::quadratic(),
        )
        .unwrap();
        assert!(p.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn closed_form_matches_enumeration() {
        let r = ReportMatrix::new(vec![vec![0.1, 0.7, 0.4], vec![0.9, 0.2, 0.5], vec![0.5, 0.5, 0.5]]).unwrap();
        let t = theta(&[0.3, 0.6, 0.85]);
        for rule in [ScoringRule::quadratic(), ScoringRule::spherical()] {
            let closed = elf_selection_probabilities_closed_form(&r, &t, &rule).unwrap();
            let brute = exact_selection_distribution(&Mechanism::Elf, &r, &t, &rule, 0).unwrap();
            for (a, b) in closed.iter().zip(&brute) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn profile_of_a_pair() {
        let p = accuracy_profile(&single(&[0.5, 0.8]), &theta(&[0.5]), &ScoringRule::quadratic()).unwrap();
        assert!((p.expected_scores[0] - 0.75).abs() < 1e-12 && (p.expected_scores[1] - 0.66).abs() < 1e-12);
        assert_eq!(p.best, 0);
        assert!((p.gap - 0.09).abs() < 1e-12);
        assert!(!p.degenerate);
        let p = accuracy_profile(&single(&[0.4, 0.4]), &theta(&[0.5]), &ScoringRule::quadratic()).unwrap();
        assert!(p.degenerate && p.gap == 0.0 && p.best == 0);
    }

    #[test]
    fn spherical_and_quadratic_disagree() {
        let r = single(&[0.9, 0.51]);
        let t = theta(&[0.7]);
        assert_eq!(accuracy_profile(&r, &t, &ScoringRule::quadratic()).unwrap().best, 1);
        assert_eq!(accuracy_profile(&r, &t, &ScoringRule::spherical()).unwrap().best, 0);
    }

    #[test]
    fn rank_accuracy() {
        let q = ScoringRule::quadratic();
        let r = single(&[0.8, 0.95]);
        let t = theta(&[0.8]);
        assert!(rank_accuracy_check(&r, &t, &q).unwrap());
        assert!(!mechanism_rank_accuracy_check(&Mechanism::mpsr(), &r, &t, &q, DEFAULT_DP_STATE_LIMIT).unwrap());
        let probs = exact_selection_distribution(&Mechanism::mpsr(), &r, &t, &q, 0).unwrap();
        assert!((probs[0] - 0.2).abs() < 1e-12 && (probs[1] - 0.8).abs() < 1e-12);
        assert!(rank_accuracy_check(&single(&[0.6, 0.6, 0.6]), &t, &q).unwrap());
    }
}
