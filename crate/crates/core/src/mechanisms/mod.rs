//! Competition mechanisms: how reports and outcomes turn into a winner.

pub mod elf;
pub mod ielf;
pub mod mpsr;
pub mod multnorm;
mod types;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::SeededStream;
use crate::scoring::ScoringRule;

pub use elf::{elf_distribution, elf_distribution_single, elf_from_score_matrix, elf_from_scores, elf_select};
pub use ielf::{
    event_distributions, ielf_event_lotteries, ielf_ranking, ielf_select, rank_from_counts, select_from_counts,
    winner_probabilities, IelfConfig,
};
pub use mpsr::{mpsr_select, mpsr_select_uniform_ties, mpsr_winner};
pub use multnorm::{multnorm_distribution, multnorm_from_scores, MultNorm};
pub use types::{
    CategoricalReports, CompetitionResult, EventWinnerVector, OutcomeVector, ReportMatrix, ScoreMatrix,
    SelectionDistribution, CLAMP_TOLERANCE,
};

/// How MPSR resolves equal totals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    LowestIndex,
    Uniform,
}

/// Mechanism identifier, parsed from `mpsr`, `mpsr:ties=uniform`, `multnorm`,
/// `elf`, `ielf` or `ielf:eps=<f>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "id")]
pub enum Mechanism {
    Mpsr { ties: TieBreak },
    MultNorm,
    Elf,
    Ielf { config: IelfConfig },
}

impl Mechanism {
    pub fn mpsr() -> Self {
        Mechanism::Mpsr {
            ties: TieBreak::LowestIndex,
        }
    }

    pub fn ielf() -> Self {
        Mechanism::Ielf {
            config: IelfConfig::default(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::Mpsr { .. } => "mpsr",
            Mechanism::MultNorm => "multnorm",
            Mechanism::Elf => "elf",
            Mechanism::Ielf { .. } => "ielf",
        }
    }

    /// A deterministic mechanism picks the winner without randomness.
    pub fn is_deterministic(&self) -> bool {
        matches!(
            self,
            Mechanism::Mpsr {
                ties: TieBreak::LowestIndex
            }
        )
    }

    /// Whether a forecaster's selection probability is a sum of per-event
    /// terms, each depending only on that event's report.
    pub fn is_additively_separable(&self, m: usize) -> bool {
        match self {
            Mechanism::Elf => true,
            Mechanism::MultNorm | Mechanism::Mpsr { .. } | Mechanism::Ielf { .. } => m == 1,
        }
    }

    /// Exact probability of each forecaster being selected for fixed scores.
    ///
    /// For IELF this runs the win-count dynamic program and can fail with
    /// [`Error::StateSpaceTooLarge`].
    pub fn selection_distribution(&self, scores: &ScoreMatrix, dp_state_limit: usize) -> Result<Vec<f64>> {
        match self {
            Mechanism::Mpsr { ties } => {
                let top = mpsr::leaders(&scores.totals());
                let mut p = vec![0.0; scores.n()];
                match ties {
                    TieBreak::LowestIndex => p[top[0]] = 1.0,
                    TieBreak::Uniform => top.iter().for_each(|&i| p[i] = 1.0 / top.len() as f64),
                }
                Ok(p)
            }
            Mechanism::MultNorm => {
                if scores.m() != 1 {
                    return Err(invalid("multiplicative normalization is single-event"));
                }
                Ok(multnorm_from_scores(&scores.column(0))?.distribution.into_vec())
            }
            Mechanism::Elf => Ok(elf_from_score_matrix(scores)?.into_vec()),
            Mechanism::Ielf { config } => {
                let dists = ielf::event_distributions_from_scores(scores, config)?;
                winner_probabilities(&dists, dp_state_limit)
            }
        }
    }

    /// Runs one competition on precomputed scores.
    pub fn run_scores(&self, scores: &ScoreMatrix, rng: &mut SeededStream) -> Result<CompetitionResult> {
        let mut result = CompetitionResult {
            mechanism: self.name().into(),
            winner: 0,
            distribution: None,
            event_winners: None,
            win_counts: None,
            ranking: None,
            degenerate_normalization: false,
            seed: rng.seed(),
        };
        match self {
            Mechanism::Mpsr {
                ties: TieBreak::LowestIndex,
            } => result.winner = mpsr_winner(scores),
            Mechanism::Mpsr {
                ties: TieBreak::Uniform,
            } => result.winner = mpsr_select_uniform_ties(scores, rng),
            Mechanism::MultNorm => {
                if scores.m() != 1 {
                    return Err(invalid("multiplicative normalization is single-event"));
                }
                let norm = multnorm_from_scores(&scores.column(0))?;
                result.winner = norm.distribution.sample(rng);
                result.distribution = Some(norm.distribution);
                result.degenerate_normalization = norm.degenerate;
            }
            Mechanism::Elf => {
                let dist = elf_from_score_matrix(scores)?;
                result.winner = dist.sample(rng);
                result.distribution = Some(dist);
            }
            Mechanism::Ielf { config } => {
                let dists = ielf::event_distributions_from_scores(scores, config)?;
                let winners = ielf::draw_event_winners(&dists, rng);
                let counts = winners.win_counts(scores.n());
                result.winner = select_from_counts(&counts, rng);
                result.event_winners = Some(winners);
                result.win_counts = Some(counts);
            }
        }
        Ok(result)
    }

    /// Runs one competition, checking the rule against the mechanism first.
    pub fn run(
        &self,
        reports: &ReportMatrix,
        outcomes: &OutcomeVector,
        rule: &ScoringRule,
        rng: &mut SeededStream,
    ) -> Result<CompetitionResult> {
        self.check_rule(rule)?;
        self.run_scores(&ScoreMatrix::from_reports(reports, outcomes, rule)?, rng)
    }

    pub fn check_rule(&self, rule: &ScoringRule) -> Result<()> {
        match self {
            Mechanism::Mpsr { .. } => Ok(()),
            Mechanism::MultNorm if rule.bounds().lower < 0.0 => {
                Err(Error::UnsupportedRule(format!("{rule} can produce negative scores")))
            }
            Mechanism::MultNorm => Ok(()),
            Mechanism::Elf | Mechanism::Ielf { .. } => elf::require_unit_rule(rule),
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mechanism::Mpsr {
                ties: TieBreak::Uniform,
            } => f.write_str("mpsr:ties=uniform"),
            Mechanism::Ielf { config } if config.epsilon != ielf::DEFAULT_SHRINK => {
                write!(f, "ielf:eps={}", config.epsilon)
            }
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let id = parts.next().unwrap_or_default();
        let params: Vec<(&str, &str)> = parts
            .map(|p| {
                p.split_once('=')
                    .ok_or_else(|| invalid(format!("expected key=value, got `{p}`")))
            })
            .collect::<Result<_>>()?;
        let mut mech = match id {
            "mpsr" => Mechanism::mpsr(),
            "multnorm" => Mechanism::MultNorm,
            "elf" => Mechanism::Elf,
            "ielf" => Mechanism::ielf(),
            other => return Err(invalid(format!("unknown mechanism `{other}`"))),
        };
        for (key, value) in params {
            match (&mut mech, key) {
                (Mechanism::Mpsr { ties }, "ties") => {
                    *ties = match value {
                        "index" | "lowest-index" => TieBreak::LowestIndex,
                        "uniform" => TieBreak::Uniform,
                        v => return Err(invalid(format!("unknown tie-break `{v}`"))),
                    }
                }
                (Mechanism::Ielf { config }, "eps") => {
                    let eps = value
                        .parse()
                        .map_err(|_| invalid(format!("`{value}` is not a number")))?;
                    *config = IelfConfig::new(eps)?;
                }
                (_, k) => return Err(invalid(format!("mechanism {id} has no parameter `{k}`"))),
            }
        }
        Ok(mech)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for s in ["mpsr", "mpsr:ties=uniform", "multnorm", "elf", "ielf", "ielf:eps=0.001"] {
            let m: Mechanism = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert!("elf:eps=0.1".parse::<Mechanism>().is_err());
        assert!("lottery".parse::<Mechanism>().is_err());
        assert!("ielf:eps=2".parse::<Mechanism>().is_err());
    }

    #[test]
    fn exact_distributions_sum_to_one() {
        let scores =
            ScoreMatrix::from_rows(vec![vec![0.2, 0.9, 0.4], vec![0.7, 0.1, 0.4], vec![0.5, 0.5, 0.6]]).unwrap();
        for mech in [
            Mechanism::mpsr(),
            "mpsr:ties=uniform".parse().unwrap(),
            Mechanism::Elf,
            Mechanism::ielf(),
        ] {
            let p = mech.selection_distribution(&scores, 1_000).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12, "{mech}");
        }
    }
}
