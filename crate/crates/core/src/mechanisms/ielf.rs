//! Independent event lotteries: one lottery per event, then the forecaster
//! with the most event wins takes the prize.
//!
//! Random draws are taken from the caller's stream in a fixed order: one draw
//! per event in ascending event order, then, only if several forecasters share
//! the top win count, one draw to pick among them. [`ielf_ranking`] follows
//! the same order for the top tie group, so its first entry always equals the
//! [`ielf_select`] winner for the same stream.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mechanisms::elf::{elf_from_scores, require_unit_rule};
use crate::mechanisms::{
    CompetitionResult, EventWinnerVector, OutcomeVector, ReportMatrix, ScoreMatrix, SelectionDistribution,
};
use crate::rng::SeededStream;
use crate::scoring::ScoringRule;

/// Default shrink applied to the rule when there are two or more events.
pub const DEFAULT_SHRINK: f64 = 1e-6;

/// Upper bound on win-count states for exact winner probabilities.
pub const DEFAULT_DP_STATE_LIMIT: usize = 1_000_000;

/// With two or more events the rule must stay strictly below 1, so scores
/// are multiplied by `1 - epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IelfConfig {
    pub epsilon: f64,
}

impl Default for IelfConfig {
    fn default() -> Self {
        IelfConfig {
            epsilon: DEFAULT_SHRINK,
        }
    }
}

impl IelfConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(invalid(format!("shrink must lie in (0, 1), got {epsilon}")));
        }
        Ok(IelfConfig { epsilon })
    }

    /// Score multiplier for a competition over `m` events.
    pub fn factor(&self, m: usize) -> f64 {
        if m >= 2 {
            1.0 - self.epsilon
        } else {
            1.0
        }
    }

    /// The rule actually used for `m` events.
    pub fn effective_rule(&self, rule: &ScoringRule, m: usize) -> Result<ScoringRule> {
        require_unit_rule(rule)?;
        rule.scaled(self.factor(m))
    }
}

/// Per-event lottery distributions from raw scores, applying the shrink.
pub fn event_distributions_from_scores(
    scores: &ScoreMatrix,
    config: &IelfConfig,
) -> Result<Vec<SelectionDistribution>> {
    let factor = config.factor(scores.m());
    if let Some(v) = scores.values().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::UnsupportedRule(format!("score {v} outside [0, 1]")));
    }
    (0..scores.m())
        .map(|k| {
            let col: Vec<f64> = scores.column(k).into_iter().map(|s| s * factor).collect();
            elf_from_scores(&col)
        })
        .collect()
}

/// Per-event lottery distributions `f_{·,k}`.
pub fn event_distributions(
    reports: &ReportMatrix,
    outcomes: &OutcomeVector,
    rule: &ScoringRule,
    config: &IelfConfig,
) -> Result<Vec<SelectionDistribution>> {
    require_unit_rule(rule)?;
    event_distributions_from_scores(&ScoreMatrix::from_reports(reports, outcomes, rule)?, config)
}

/// Draws each event winner independently, events in ascending order.
pub fn draw_event_winners(dists: &[SelectionDistribution], rng: &mut SeededStream) -> EventWinnerVector {
    EventWinnerVector(dists.iter().map(|d| d.sample(rng)).collect())
}

pub fn ielf_event_lotteries(
    reports: &ReportMatrix,
    outcomes: &OutcomeVector,
    rule: &ScoringRule,
    config: &IelfConfig,
    rng: &mut SeededStream,
) -> Result<EventWinnerVector> {
    let dists = event_distributions(reports, outcomes, rule, config)?;
    Ok(draw_event_winners(&dists, rng))
}

fn top_group(counts: &[usize]) -> Vec<usize> {
    let best = counts.iter().copied().max().unwrap_or(0);
    (0..counts.len()).filter(|&i| counts[i] == best).collect()
}

/// Forecaster with the most wins, ties broken uniformly at random.
pub fn select_from_counts(counts: &[usize], rng: &mut SeededStream) -> usize {
    let top = top_group(counts);
    if top.len() == 1 {
        top[0]
    } else {
        top[rng.index(top.len())]
    }
}

/// All forecasters by descending win count, ties shuffled uniformly.
pub fn rank_from_counts(counts: &[usize], rng: &mut SeededStream) -> Vec<usize> {
    let mut levels: Vec<usize> = counts.to_vec();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();
    let mut ranking = Vec::with_capacity(counts.len());
    for (depth, level) in levels.into_iter().enumerate() {
        let mut group: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] == level).collect();
        if group.len() > 1 {
            if depth == 0 {
                // Same draw as `select_from_counts`, then shuffle the rest.
                let first = rng.index(group.len());
                group.swap(0, first);
                group[1..].shuffle(rng);
            } else {
                group.shuffle(rng);
            }
        }
        ranking.extend(group);
    }
    ranking
}

fn run(
    reports: &ReportMatrix,
    outcomes: &OutcomeVector,
    rule: &ScoringRule,
    config: &IelfConfig,
    rng: &mut SeededStream,
) -> Result<(EventWinnerVector, Vec<usize>)> {
    let winners = ielf_event_lotteries(reports, outcomes, rule, config, rng)?;
    let counts = winners.win_counts(reports.n());
    Ok((winners, counts))
}

pub fn ielf_select(
    reports: &ReportMatrix,
    outcomes: &OutcomeVector,
    rule: &ScoringRule,
    config: &IelfConfig,
    rng: &mut SeededStream,
) -> Result<CompetitionResult> {
    let (winners, counts) = run(reports, outcomes, rule, config, rng)?;
    let winner = select_from_counts(&counts, rng);
    Ok(CompetitionResult {
        mechanism: "ielf".into(),
        winner,
        distribution: None,
        event_winners: Some(winners),
        win_counts: Some(counts),
        ranking: None,
        degenerate_normalization: false,
        seed: rng.seed(),
    })
}

/// Full ranking by event wins. The result's `winner` is the top of the ranking.
pub fn ielf_ranking(
    reports: &ReportMatrix,
    outcomes: &OutcomeVector,
    rule: &ScoringRule,
    config: &IelfConfig,
    rng: &mut SeededStream,
) -> Result<CompetitionResult> {
    let (winners, counts) = run(reports, outcomes, rule, config, rng)?;
    let ranking = rank_from_counts(&counts, rng);
    Ok(CompetitionResult {
        mechanism: "ielf".into(),
        winner: ranking[0],
        distribution: None,
        event_winners: Some(winners),
        win_counts: Some(counts),
        ranking: Some(ranking),
        degenerate_normalization: false,
        seed: rng.seed(),
    })
}

/// Number of ways to spread `m` event wins over `n` forecasters, i.e. the
/// number of win-count states after the last event.
pub fn win_count_states(n: usize, m: usize) -> f64 {
    // C(m + n - 1, n - 1), in floating point to avoid overflow.
    let mut c = 1.0f64;
    for j in 1..n {
        c = c * (m + j) as f64 / j as f64;
    }
    c
}

/// Exact probability that each forecaster wins the prize, given independent
/// per-event winner distributions. Dynamic programming over win-count vectors;
/// final ties split their mass evenly. Fails if the number of reachable states
/// could exceed `state_limit`.
pub fn winner_probabilities(event_dists: &[SelectionDistribution], state_limit: usize) -> Result<Vec<f64>> {
    let Some(first) = event_dists.first() else {
        return Err(invalid("no events"));
    };
    let n = first.n();
    let m = event_dists.len();
    if event_dists.iter().any(|d| d.n() != n) {
        return Err(invalid("event distributions disagree on the number of forecasters"));
    }
    if win_count_states(n, m) > state_limit as f64 {
        return Err(Error::StateSpaceTooLarge {
            states: win_count_states(n, m),
            limit: state_limit,
        });
    }
    let mut states: HashMap<Vec<u32>, f64> = HashMap::new();
    states.insert(vec![0; n], 1.0);
    for dist in event_dists {
        let mut next: HashMap<Vec<u32>, f64> = HashMap::with_capacity(states.len() * 2);
        for (counts, mass) in &states {
            for (j, &p) in dist.probs().iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let mut c = counts.clone();
                c[j] += 1;
                *next.entry(c).or_insert(0.0) += mass * p;
            }
        }
        states = next;
    }
    // Sum in a fixed order so results do not depend on hash iteration order.
    let mut finals: Vec<(Vec<u32>, f64)> = states.into_iter().collect();
    finals.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut win = vec![0.0; n];
    for (counts, mass) in finals {
        let best = *counts.iter().max().expect("n >= 1");
        let top: Vec<usize> = (0..n).filter(|&i| counts[i] == best).collect();
        let share = mass / top.len() as f64;
        for i in top {
            win[i] += share;
        }
    }
    Ok(win)
}
