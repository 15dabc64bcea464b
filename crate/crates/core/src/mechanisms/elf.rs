//! Event lotteries.
//!
//! Each forecaster starts with a `1/n` share of the prize probability, moved
//! up or down by how their score compares with the average score of everyone
//! else:
//!
//! ```text
//! f_i = 1/n + (1/n) * (R(y_i, x) - (1/(n-1)) Σ_{j≠i} R(y_j, x))
//! ```
//!
//! With `R` in `[0, 1]` the shares are nonnegative and sum to one. Over several
//! events the shares are averaged, which is the same as drawing one event
//! uniformly and running its lottery.

use crate::error::{Error, Result};
use crate::mechanisms::{CompetitionResult, OutcomeVector, ReportMatrix, ScoreMatrix, SelectionDistribution};
use crate::rng::SeededStream;
use crate::scoring::ScoringRule;

/// Bound slack used when checking that a rule lies in `[0, 1]`.
pub const UNIT_BOUND_TOLERANCE: f64 = 1e-12;

pub(crate) fn require_unit_rule(rule: &ScoringRule) -> Result<()> {
    let b = rule.bounds();
    if b.within_unit(UNIT_BOUND_TOLERANCE) {
        Ok(())
    } else {
        Err(Error::UnsupportedRule(format!(
            "{rule} ranges over [{}, {}], lotteries need [0, 1]; normalize it first",
            b.lower, b.upper
        )))
    }
}

/// Raw lottery shares for one event's scores, before validation.
pub(crate) fn elf_shares(scores: &[f64]) -> Vec<f64> {
    let n = scores.len() as f64;
    let total: f64 = scores.iter().sum();
    scores
        .iter()
        .map(|&s| 1.0 / n + (s - (total - s) / (n - 1.0)) / n)
        .collect()
}

/// Single-event lottery from a column of scores in `[0, 1]`.
pub fn elf_from_scores(scores: &[f64]) -> Result<SelectionDistribution> {
    SelectionDistribution::from_raw(elf_shares(scores))
}

/// Multi-event lottery: the per-event shares averaged over events.
pub fn elf_from_score_matrix(scores: &ScoreMatrix) -> Result<SelectionDistribution> {
    let (n, m) = (scores.n(), scores.m());
    let mut sum = vec![0.0; n];
    for k in 0..m {
        let f = elf_from_scores(&scores.column(k))?;
        for (acc, p) in sum.iter_mut().zip(f.probs()) {
            *acc += p;
        }
    }
    SelectionDistribution::from_raw(sum.into_iter().map(|v| v / m as f64).collect())
}

/// Lottery for a single event.
pub fn elf_distribution_single(reports: &[f64], outcome: f64, rule: &ScoringRule) -> Result<SelectionDistribution> {
    require_unit_rule(rule)?;
    let rows = reports.iter().map(|&y| vec![y]).collect();
    let scores = ScoreMatrix::from_reports(&ReportMatrix::new(rows)?, &OutcomeVector::new(vec![outcome]), rule)?;
    elf_from_scores(&scores.column(0))
}

/// Lottery over all events.
pub fn elf_distribution(
    reports: &ReportMatrix,
    outcomes: &OutcomeVector,
    rule: &ScoringRule,
) -> Result<SelectionDistribution> {
    require_unit_rule(rule)?;
    elf_from_score_matrix(&ScoreMatrix::from_reports(reports, outcomes, rule)?)
}

/// Draws the winner from [`elf_distribution`].
pub fn elf_select(
    reports: &ReportMatrix,
    outcomes: &OutcomeVector,
    rule: &ScoringRule,
    rng: &mut SeededStream,
) -> Result<CompetitionResult> {
    let distribution = elf_distribution(reports, outcomes, rule)?;
    let winner = distribution.sample(rng);
    Ok(CompetitionResult {
        mechanism: "elf".into(),
        winner,
        distribution: Some(distribution),
        event_winners: None,
        win_counts: None,
        ranking: None,
        degenerate_normalization: false,
        seed: rng.seed(),
    })
}
