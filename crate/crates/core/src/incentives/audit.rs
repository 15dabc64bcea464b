use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::incentives::Scenario;
use crate::mechanisms::ielf::{self, DEFAULT_DP_STATE_LIMIT};
use crate::mechanisms::{elf, Mechanism, OutcomeVector, ScoreMatrix, SelectionDistribution};
use crate::rng::{Purpose, SeededStream};
use crate::scoring::ScoringRule;

/// Gain over the truthful report that counts as a violation for exact
/// evaluators.
pub const EXACT_VIOLATION_TOLERANCE: f64 = 1e-9;

/// Standard errors a Monte Carlo gain must clear to count as a violation.
pub const MC_VIOLATION_SIGMAS: f64 = 3.0;

/// Largest report grid enumerated in full.
pub const DEFAULT_GRID_LIMIT: usize = 2_000_000;

/// IELF grids up to this many points are enumerated even when per-event
/// sweeps would be allowed.
pub const COORDINATEWISE_ABOVE: usize = 20_000;

/// Slack used when deciding whether a scenario factorises across events.
pub const INDEPENDENCE_TOLERANCE: f64 = 1e-12;

/// Knobs for [`selection_probability`] and [`best_response`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditOptions {
    pub dp_state_limit: usize,
    pub grid_limit: usize,
    pub mc_trials: usize,
    pub seed: u64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            dp_state_limit: DEFAULT_DP_STATE_LIMIT,
            grid_limit: DEFAULT_GRID_LIMIT,
            mc_trials: 20_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evaluator {
    Exact,
    MonteCarlo,
}

/// Probability that the audited forecaster is selected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionEstimate {
    pub value: f64,
    /// Zero for exact evaluation.
    pub std_error: f64,
    pub evaluator: Evaluator,
}

fn check_report(rule: &ScoringRule, scenario: &Scenario, y_i: &[f64]) -> Result<()> {
    if y_i.len() != scenario.m() {
        return Err(invalid(format!(
            "report has {} events, scenario has {}",
            y_i.len(),
            scenario.m()
        )));
    }
    y_i.iter().try_for_each(|&y| rule.check_report(y))
}

fn atom_scores(rule: &ScoringRule, scenario: &Scenario, atom_index: usize, y_i: &[f64]) -> Result<ScoreMatrix> {
    let atom = &scenario.atoms()[atom_index];
    ScoreMatrix::from_reports(
        &scenario.reports_with(atom, y_i)?,
        &OutcomeVector::new(atom.x.clone()),
        rule,
    )
}

/// Exact IELF winning probability when the scenario factorises across events:
/// the per-event winners are then independent with distribution `E[f_k]`.
fn ielf_independent(
    config: &ielf::IelfConfig,
    rule: &ScoringRule,
    scenario: &Scenario,
    y_i: &[f64],
    state_limit: usize,
) -> Result<f64> {
    let (n, m, i) = (scenario.n(), scenario.m(), scenario.i());
    let factor = config.factor(m);
    let mut dists = Vec::with_capacity(m);
    for (k, &y) in y_i.iter().enumerate().take(m) {
        let mut mean = vec![0.0; n];
        for (p, x, others) in scenario.event_marginal(k) {
            let mut col = others;
            col.insert(i, y);
            let scores: Vec<f64> = col.iter().map(|&y| factor * rule.score_unchecked(y, x)).collect();
            for (acc, f) in mean.iter_mut().zip(elf::elf_shares(&scores)) {
                *acc += p * f;
            }
        }
        dists.push(SelectionDistribution::from_raw(mean)?);
    }
    Ok(ielf::winner_probabilities(&dists, state_limit)?[i])
}

fn exact(
    mechanism: &Mechanism,
    rule: &ScoringRule,
    scenario: &Scenario,
    y_i: &[f64],
    opts: &AuditOptions,
) -> Result<f64> {
    if let Mechanism::Ielf { config } = mechanism {
        if scenario.m() > 1 && scenario.is_belief_independent(INDEPENDENCE_TOLERANCE) {
            return ielf_independent(config, rule, scenario, y_i, opts.dp_state_limit);
        }
    }
    let i = scenario.i();
    let mut total = 0.0;
    for (a, atom) in scenario.atoms().iter().enumerate() {
        if atom.p == 0.0 {
            continue;
        }
        let scores = atom_scores(rule, scenario, a, y_i)?;
        total += atom.p * mechanism.selection_distribution(&scores, opts.dp_state_limit)?[i];
    }
    Ok(total)
}

fn monte_carlo(
    mechanism: &Mechanism,
    rule: &ScoringRule,
    scenario: &Scenario,
    y_i: &[f64],
    opts: &AuditOptions,
) -> Result<SelectionEstimate> {
    if opts.mc_trials == 0 {
        return Err(invalid("Monte Carlo fallback needs at least one trial"));
    }
    let probs: Vec<f64> = scenario.atoms().iter().map(|a| a.p).collect();
    let atoms = SelectionDistribution::from_raw(probs)?;
    let wins = (0..opts.mc_trials as u64)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let mut rng = SeededStream::substream(opts.seed, Purpose::Audit, t);
            let a = atoms.sample(&mut rng);
            let scores = atom_scores(rule, scenario, a, y_i)?;
            let winner = mechanism.run_scores(&scores, &mut rng)?.winner;
            Ok(u64::from(winner == scenario.i()))
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum::<u64>();
    let n = opts.mc_trials as f64;
    let value = wins as f64 / n;
    Ok(SelectionEstimate {
        value,
        std_error: (value * (1.0 - value) / n).sqrt(),
        evaluator: Evaluator::MonteCarlo,
    })
}

/// Probability that the audited forecaster is selected when reporting `y_i`,
/// in expectation over the scenario's atoms.
///
/// Exact for every mechanism except IELF with a win-count state space above
/// `opts.dp_state_limit`, which falls back to seeded Monte Carlo and says so
/// in the returned [`Evaluator`].
pub fn selection_probability(
    mechanism: &Mechanism,
    rule: &ScoringRule,
    scenario: &Scenario,
    y_i: &[f64],
    opts: &AuditOptions,
) -> Result<SelectionEstimate> {
    mechanism.check_rule(rule)?;
    check_report(rule, scenario, y_i)?;
    match exact(mechanism, rule, scenario, y_i, opts) {
        Ok(value) => Ok(SelectionEstimate {
            value,
            std_error: 0.0,
            evaluator: Evaluator::Exact,
        }),
        Err(Error::StateSpaceTooLarge { .. }) => monte_carlo(mechanism, rule, scenario, y_i, opts),
        Err(e) => Err(e),
    }
}

/// How the report grid was searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Every point of the grid `{0, step, …, 1}^m`.
    Exhaustive,
    /// Per-event sweeps; exact because the objective is a sum of per-event terms.
    Separable,
    /// Per-event sweeps with the other events held at the truthful report,
    /// plus the combination of per-event winners. Used for IELF on belief
    /// independent scenarios whose grid exceeds [`COORDINATEWISE_ABOVE`].
    Coordinatewise,
}

/// Outcome of a best-response search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub mechanism: String,
    pub rule: String,
    pub truthful_report: Vec<f64>,
    pub truthful_value: f64,
    /// Best of the grid maximiser and the truthful report.
    pub best_report: Vec<f64>,
    pub best_value: f64,
    pub grid_best_report: Vec<f64>,
    pub grid_best_value: f64,
    pub violation: bool,
    pub grid_step: f64,
    pub search: SearchMode,
    pub evaluator: Evaluator,
    /// Standard error of the grid maximum (Monte Carlo only).
    pub std_error: f64,
}

/// Grid `{lo, lo + step', …, hi}` with `1/step` intervals.
pub fn report_grid(rule: &ScoringRule, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(invalid(format!("grid step must be in (0, 1], got {step}")));
    }
    let intervals = (1.0 / step).round();
    if (intervals * step - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("grid step {step} does not divide 1")));
    }
    let k = intervals as usize;
    let (lo, hi) = rule
        .scalar_range()
        .ok_or_else(|| invalid("incentive audits need a scalar rule"))?;
    Ok((0..=k).map(|j| lo + (hi - lo) * (j as f64 / k as f64)).collect())
}

struct Candidate {
    report: Vec<f64>,
    estimate: SelectionEstimate,
}

fn evaluate_all(
    mechanism: &Mechanism,
    rule: &ScoringRule,
    scenario: &Scenario,
    reports: Vec<Vec<f64>>,
    opts: &AuditOptions,
) -> Result<Vec<Candidate>> {
    reports
        .into_par_iter()
        .map(|report| {
            let estimate = selection_probability(mechanism, rule, scenario, &report, opts)?;
            Ok(Candidate { report, estimate })
        })
        .collect()
}

/// First candidate with the largest value; ties keep the earliest, so the
/// result does not depend on how the work was split across threads.
fn argmax(cands: &[Candidate]) -> usize {
    let mut best = 0;
    for (j, c) in cands.iter().enumerate() {
        if c.estimate.value > cands[best].estimate.value {
            best = j;
        }
    }
    best
}

fn per_event_sweeps(
    mechanism: &Mechanism,
    rule: &ScoringRule,
    scenario: &Scenario,
    grid: &[f64],
    truthful: &[f64],
    opts: &AuditOptions,
) -> Result<Vec<Candidate>> {
    let m = scenario.m();
    let mut reports = Vec::with_capacity(m * grid.len() + 1);
    for k in 0..m {
        for &g in grid {
            let mut r = truthful.to_vec();
            r[k] = g;
            reports.push(r);
        }
    }
    let mut cands = evaluate_all(mechanism, rule, scenario, reports, opts)?;
    if m > 1 {
        let combined: Vec<f64> = (0..m)
            .map(|k| {
                let slice = &cands[k * grid.len()..(k + 1) * grid.len()];
                slice[argmax(slice)].report[k]
            })
            .collect();
        cands.extend(evaluate_all(mechanism, rule, scenario, vec![combined], opts)?);
    }
    Ok(cands)
}

/// Searches the report grid for a report that beats truthful reporting.
pub fn best_response(
    mechanism: &Mechanism,
    rule: &ScoringRule,
    scenario: &Scenario,
    grid_step: f64,
    opts: &AuditOptions,
) -> Result<AuditReport> {
    mechanism.check_rule(rule)?;
    let grid = report_grid(rule, grid_step)?;
    let m = scenario.m();
    let truthful = scenario.derived_belief();
    let truth = selection_probability(mechanism, rule, scenario, &truthful, opts)?;

    let points = (grid.len() as f64).powi(m as i32);
    let search = if mechanism.is_additively_separable(m) {
        SearchMode::Separable
    } else if matches!(mechanism, Mechanism::Ielf { .. })
        && points > COORDINATEWISE_ABOVE as f64
        && scenario.is_belief_independent(INDEPENDENCE_TOLERANCE)
    {
        SearchMode::Coordinatewise
    } else {
        SearchMode::Exhaustive
    };

    let cands = match search {
        SearchMode::Separable | SearchMode::Coordinatewise => {
            per_event_sweeps(mechanism, rule, scenario, &grid, &truthful, opts)?
        }
        SearchMode::Exhaustive => {
            if points > opts.grid_limit as f64 {
                return Err(Error::GridTooLarge {
                    points,
                    limit: opts.grid_limit,
                });
            }
            let total = points as usize;
            let reports: Vec<Vec<f64>> = (0..total)
                .map(|mut code| {
                    (0..m)
                        .map(|_| {
                            let g = grid[code % grid.len()];
                            code /= grid.len();
                            g
                        })
                        .collect()
                })
                .collect();
            evaluate_all(mechanism, rule, scenario, reports, opts)?
        }
    };
    let top = &cands[argmax(&cands)];
    let evaluator =
        if truth.evaluator == Evaluator::Exact && cands.iter().all(|c| c.estimate.evaluator == Evaluator::Exact) {
            Evaluator::Exact
        } else {
            Evaluator::MonteCarlo
        };
    let gain = top.estimate.value - truth.value;
    let violation = match evaluator {
        Evaluator::Exact => gain > EXACT_VIOLATION_TOLERANCE,
        Evaluator::MonteCarlo => {
            gain > MC_VIOLATION_SIGMAS * (top.estimate.std_error.powi(2) + truth.std_error.powi(2)).sqrt()
        }
    };
    let (best_report, best_value) = if top.estimate.value > truth.value {
        (top.report.clone(), top.estimate.value)
    } else {
        (truthful.clone(), truth.value)
    };
    Ok(AuditReport {
        mechanism: mechanism.to_string(),
        rule: rule.to_string(),
        truthful_report: truthful,
        truthful_value: truth.value,
        best_report,
        best_value,
        grid_best_report: top.report.clone(),
        grid_best_value: top.estimate.value,
        violation,
        grid_step,
        search,
        evaluator,
        std_error: top.estimate.std_error,
    })
}
