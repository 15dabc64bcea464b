//! Highest total proper score wins. Not incentive compatible; kept as the
//! baseline that the lottery mechanisms are measured against.

use crate::error::Result;
use crate::mechanisms::{OutcomeVector, ReportMatrix, ScoreMatrix};
use crate::rng::SeededStream;
use crate::scoring::ScoringRule;

/// Forecasters whose total equals the maximum, in index order.
pub fn leaders(totals: &[f64]) -> Vec<usize> {
    let best = totals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..totals.len()).filter(|&i| totals[i] == best).collect()
}

/// Winner under lowest-index tie-breaking.
pub fn mpsr_winner(scores: &ScoreMatrix) -> usize {
    leaders(&scores.totals())[0]
}

/// `argmax_i Σ_k R(y_ik, x_k)`, ties to the lowest index.
pub fn mpsr_select(reports: &ReportMatrix, outcomes: &OutcomeVector, rule: &ScoringRule) -> Result<usize> {
    Ok(mpsr_winner(&ScoreMatrix::from_reports(reports, outcomes, rule)?))
}

/// Same ranking rule, but ties are broken uniformly at random. Draws from the
/// stream only when there is more than one leader.
pub fn mpsr_select_uniform_ties(scores: &ScoreMatrix, rng: &mut SeededStream) -> usize {
    let top = leaders(&scores.totals());
    if top.len() == 1 {
        top[0]
    } else {
        top[rng.index(top.len())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn select(rows: Vec<Vec<f64>>, x: Vec<f64>) -> usize {
        mpsr_select(
            &ReportMatrix::new(rows).unwrap(),
            &OutcomeVector::new(x),
            &ScoringRule::quadratic(),
        )
        .unwrap()
    }

    #[test]
    fn overconfident_report_loses_on_zero() {
        // 0.36 vs 0.2775
        assert_eq!(select(vec![vec![0.8], vec![0.85]], vec![0.0]), 0);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        assert_eq!(select(vec![vec![0.3, 0.7]; 4], vec![1.0, 0.0]), 0);
    }

    #[test]
    fn perfect_beats_worst() {
        assert_eq!(select(vec![vec![1.0], vec![0.0]], vec![1.0]), 0);
        assert_eq!(select(vec![vec![0.0], vec![1.0]], vec![1.0]), 1);
    }

    #[test]
    fn dimension_mismatch() {
        let r = ReportMatrix::new(vec![vec![0.5], vec![0.5]]).unwrap();
        assert!(mpsr_select(&r, &OutcomeVector::new(vec![1.0, 0.0]), &ScoringRule::quadratic()).is_err());
    }

    #[test]
    fn uniform_ties_cover_all_leaders() {
        let scores = ScoreMatrix::from_rows(vec![vec![0.5], vec![0.5], vec![0.1]]).unwrap();
        let mut rng = SeededStream::new(3);
        let mut seen = [0usize; 3];
        for _ in 0..2000 {
            seen[mpsr_select_uniform_ties(&scores, &mut rng)] += 1;
        }
        assert_eq!(seen[2], 0);
        assert!(seen[0] > 900 && seen[1] > 900, "{seen:?}");
    }
}
