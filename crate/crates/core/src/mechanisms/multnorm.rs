//! Dividing each score by the sum of all scores. Looks like a lottery, but the
//! normaliser depends on the outcome, which pulls reports towards the less
//! likely outcome.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mechanisms::{OutcomeVector, ReportMatrix, ScoreMatrix, SelectionDistribution};
use crate::scoring::ScoringRule;

/// Result of multiplicative normalization. `degenerate` is set when every
/// score was zero and the uniform distribution was substituted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultNorm {
    pub distribution: SelectionDistribution,
    pub degenerate: bool,
}

/// `R(y_i, x) / Σ_j R(y_j, x)` for a single column of nonnegative scores.
pub fn multnorm_from_scores(scores: &[f64]) -> Result<MultNorm> {
    if let Some(s) = scores.iter().find(|s| **s < 0.0) {
        return Err(Error::UnsupportedRule(format!(
            "multiplicative normalization needs nonnegative scores, got {s}"
        )));
    }
    let total: f64 = scores.iter().sum();
    if total == 0.0 {
        return Ok(MultNorm {
            distribution: SelectionDistribution::uniform(scores.len()),
            degenerate: true,
        });
    }
    let probs = scores.iter().map(|s| s / total).collect();
    Ok(MultNorm {
        distribution: SelectionDistribution::from_raw(probs)?,
        degenerate: false,
    })
}

/// Single-event multiplicative normalization.
pub fn multnorm_distribution(reports: &ReportMatrix, outcome: &OutcomeVector, rule: &ScoringRule) -> Result<MultNorm> {
    if reports.m() != 1 {
        return Err(invalid(format!(
            "multiplicative normalization is single-event, got {} events",
            reports.m()
        )));
    }
    if rule.bounds().lower < 0.0 {
        return Err(Error::UnsupportedRule(format!("{rule} can produce negative scores")));
    }
    let scores = ScoreMatrix::from_reports(reports, outcome, rule)?;
    multnorm_from_scores(&scores.column(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(ys: &[f64], x: f64) -> MultNorm {
        let rows = ys.iter().map(|&y| vec![y]).collect();
        multnorm_distribution(
            &ReportMatrix::new(rows).unwrap(),
            &OutcomeVector::new(vec![x]),
            &ScoringRule::quadratic(),
        )
        .unwrap()
    }

    #[test]
    fn hedged_report_against_sure_rival() {
        let d = dist(&[0.5, 1.0], 1.0);
        assert!((d.distribution[0] - 3.0 / 7.0).abs() < 1e-15);
        assert!((d.distribution[1] - 4.0 / 7.0).abs() < 1e-15);
        let d = dist(&[0.8, 1.0], 1.0);
        assert!((d.distribution[0] - 24.0 / 49.0).abs() < 1e-15);
        assert!((d.distribution[1] - 25.0 / 49.0).abs() < 1e-15);
    }

    #[test]
    fn identical_reports_are_uniform() {
        let d = dist(&[0.3, 0.3, 0.3], 0.0);
        assert!(d.distribution.probs().iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-15));
        assert!(!d.degenerate);
    }

    #[test]
    fn all_zero_scores_fall_back_to_uniform() {
        let d = dist(&[1.0, 1.0], 0.0);
        assert!(d.degenerate);
        assert_eq!(d.distribution.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn rejects_multi_event_and_negative_rules() {
        let r = ReportMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(multnorm_distribution(&r, &OutcomeVector::new(vec![1.0, 1.0]), &ScoringRule::quadratic()).is_err());
        let r = ReportMatrix::new(vec![vec![0.5], vec![0.5]]).unwrap();
        let neg = ScoringRule::quadratic().affine(4.0, &[-3.0, -3.0]).unwrap();
        assert!(matches!(
            multnorm_distribution(&r, &OutcomeVector::new(vec![1.0]), &neg),
            Err(Error::UnsupportedRule(_))
        ));
    }
}
