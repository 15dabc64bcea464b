//! Incentive audits: how much a forecaster gains by misreporting under a
//! finite belief about outcomes and rivals.

mod audit;
mod scenario;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::mechanisms::{Mechanism, OutcomeVector, ReportMatrix, ScoreMatrix};
use crate::scoring::ScoringRule;

pub use audit::{
    best_response, report_grid, selection_probability, AuditOptions, AuditReport, Evaluator, SearchMode,
    SelectionEstimate, COORDINATEWISE_ABOVE, DEFAULT_GRID_LIMIT, EXACT_VIOLATION_TOLERANCE, INDEPENDENCE_TOLERANCE,
    MC_VIOLATION_SIGMAS,
};
pub use scenario::{overconfidence_scenario, sure_rival_scenario, Atom, Scenario, PROBABILITY_TOLERANCE};

/// The audited forecaster's belief `E[X]`.
pub fn derived_belief(scenario: &Scenario) -> Vec<f64> {
    scenario.derived_belief()
}

/// Whether the scenario's per-event blocks `(X_k, Y_{-i,k})` are independent.
pub fn belief_independence_check(scenario: &Scenario, tol: f64) -> bool {
    scenario.is_belief_independent(tol)
}

/// Two candidate reports that win on exactly the same outcome vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuplicateWinSets {
    pub first: usize,
    pub second: usize,
    pub first_report: Vec<f64>,
    pub second_report: Vec<f64>,
    /// Outcome vectors, as bit masks over events, on which both win.
    pub win_set: Vec<u64>,
}

/// Outcome vectors (bit `k` set when event `k` happens) on which forecaster 0
/// wins with report `y`, every rival reporting 0.5 on every event.
pub fn win_set(mechanism: &Mechanism, rule: &ScoringRule, n: usize, y: &[f64]) -> Result<Vec<u64>> {
    if !mechanism.is_deterministic() {
        return Err(invalid(format!(
            "{mechanism} is randomized; win-sets need a deterministic mechanism"
        )));
    }
    let m = y.len();
    if m == 0 || m > 20 {
        return Err(invalid(format!(
            "win-sets enumerate 2^m outcomes, m={m} is out of range"
        )));
    }
    let mut rows = vec![y.to_vec()];
    rows.extend(std::iter::repeat_n(vec![0.5; m], n - 1));
    let reports = ReportMatrix::new(rows)?;
    let mut wins = Vec::new();
    for mask in 0..(1u64 << m) {
        let x = OutcomeVector::new((0..m).map(|k| ((mask >> k) & 1) as f64).collect());
        let scores = ScoreMatrix::from_reports(&reports, &x, rule)?;
        if mechanism.selection_distribution(&scores, 0)?[0] == 1.0 {
            wins.push(mask);
        }
    }
    Ok(wins)
}

/// Returns the first pair of candidates, in candidate order, whose win-sets
/// coincide. More than `2^(2^m)` candidates always produce one.
pub fn pigeonhole_duplicate_winsets(
    mechanism: &Mechanism,
    rule: &ScoringRule,
    n: usize,
    candidates: &[Vec<f64>],
) -> Result<Option<DuplicateWinSets>> {
    if n < 2 {
        return Err(invalid("need at least two forecasters"));
    }
    let Some(m) = candidates.first().map(Vec::len) else {
        return Ok(None);
    };
    if candidates.iter().any(|c| c.len() != m) {
        return Err(invalid("candidates have different event counts"));
    }
    let mut seen: Vec<Vec<u64>> = Vec::with_capacity(candidates.len());
    for (b, cand) in candidates.iter().enumerate() {
        let set = win_set(mechanism, rule, n, cand)?;
        if let Some(a) = seen.iter().position(|s| *s == set) {
            return Ok(Some(DuplicateWinSets {
                first: a,
                second: b,
                first_report: candidates[a].clone(),
                second_report: cand.clone(),
                win_set: set,
            }));
        }
        seen.push(set);
    }
    Ok(None)
}
