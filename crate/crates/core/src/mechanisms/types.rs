use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scoring::ScoringRule;

/// Reported forecasts `y[i][k]` of `n` forecasters on `m` events, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMatrix {
    n: usize,
    m: usize,
    y: Vec<f64>,
}

impl ReportMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(invalid(format!("a competition needs at least 2 forecasters, got {n}")));
        }
        let m = rows[0].len();
        if m == 0 {
            return Err(invalid("a competition needs at least 1 event"));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
            return Err(invalid(format!(
                "forecaster {i} reports {} events, expected {m}",
                r.len()
            )));
        }
        let y: Vec<f64> = rows.into_iter().flatten().collect();
        if y.iter().any(|v| !v.is_finite()) {
            return Err(invalid("reports must be finite"));
        }
        Ok(ReportMatrix { n, m, y })
    }

    /// Every forecaster reports `row` on every event; handy for replicated
    /// experiments.
    pub fn from_columns(n: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let rows = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        Self::new(rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.y[i * self.m + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.y[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.y.chunks(self.m)
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, k)).collect()
    }

    /// Replaces forecaster `i`'s reports.
    pub fn set_row(&mut self, i: usize, row: &[f64]) -> Result<()> {
        if row.len() != self.m {
            return Err(invalid(format!("row has {} events, expected {}", row.len(), self.m)));
        }
        self.y[i * self.m..(i + 1) * self.m].copy_from_slice(row);
        Ok(())
    }

    /// Repeats the event columns cyclically until there are `m` of them.
    pub fn replicate_events(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(invalid("cannot replicate to zero events"));
        }
        let rows = (0..self.n)
            .map(|i| (0..m).map(|k| self.get(i, k % self.m)).collect())
            .collect();
        Self::new(rows)
    }
}

/// Materialised outcomes, one per event: 0/1 for binary rules, a point of
/// `[lo, hi]` for interval rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutcomeVector(pub Vec<f64>);

impl OutcomeVector {
    pub fn new(x: Vec<f64>) -> Self {
        OutcomeVector(x)
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for OutcomeVector {
    fn from(x: Vec<f64>) -> Self {
        OutcomeVector(x)
    }
}

/// Probability-vector reports for categorical events: `n × m × classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalReports {
    n: usize,
    m: usize,
    classes: usize,
    y: Vec<f64>,
}

impl CategoricalReports {
    /// `rows[i][k]` is forecaster `i`'s distribution over classes for event `k`.
    pub fn new(rows: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(invalid("a competition needs at least 2 forecasters"));
        }
        let m = rows[0].len();
        if m == 0 {
            return Err(invalid("a competition needs at least 1 event"));
        }
        let classes = rows[0][0].len();
        let mut y = Vec::with_capacity(n * m * classes);
        for row in rows {
            if row.len() != m {
                return Err(invalid("ragged categorical report matrix"));
            }
            for dist in row {
                if dist.len() != classes {
                    return Err(invalid("inconsistent class count in categorical reports"));
                }
                y.extend(dist);
            }
        }
        Ok(CategoricalReports { n, m, classes, y })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn report(&self, i: usize, k: usize) -> &[f64] {
        let start = (i * self.m + k) * self.classes;
        &self.y[start..start + self.classes]
    }
}

/// Scores `R(y[i][k], x[k])`, the only thing the lottery mechanisms look at.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    n: usize,
    m: usize,
    s: Vec<f64>,
}

impl ScoreMatrix {
    pub fn from_reports(reports: &ReportMatrix, outcomes: &OutcomeVector, rule: &ScoringRule) -> Result<Self> {
        if outcomes.m() != reports.m() {
            return Err(invalid(format!("{} outcomes for {} events", outcomes.m(), reports.m())));
        }
        for &x in outcomes.as_slice() {
            rule.check_outcome(x)?;
        }
        let mut s = Vec::with_capacity(reports.n() * reports.m());
        for row in reports.rows() {
            for (&y, &x) in row.iter().zip(outcomes.as_slice()) {
                rule.check_report(y)?;
                s.push(rule.score_unchecked(y, x));
            }
        }
        Ok(ScoreMatrix {
            n: reports.n(),
            m: reports.m(),
            s,
        })
    }

    pub fn from_categorical(reports: &CategoricalReports, outcomes: &[usize], rule: &ScoringRule) -> Result<Self> {
        if outcomes.len() != reports.m() {
            return Err(invalid(format!(
                "{} outcomes for {} events",
                outcomes.len(),
                reports.m()
            )));
        }
        let mut s = Vec::with_capacity(reports.n() * reports.m());
        for i in 0..reports.n() {
            for (k, &x) in outcomes.iter().enumerate() {
                s.push(rule.score_categorical(reports.report(i, k), x)?);
            }
        }
        Ok(ScoreMatrix {
            n: reports.n(),
            m: reports.m(),
            s,
        })
    }

    /// Wraps precomputed scores; `rows[i][k]` is forecaster `i` on event `k`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = ReportMatrix::new(rows)?;
        Ok(ScoreMatrix { n: r.n, m: r.m, s: r.y })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.s[i * self.m + k]
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, k)).collect()
    }

    /// Total score of each forecaster across events.
    pub fn totals(&self) -> Vec<f64> {
        self.s.chunks(self.m).map(|r| r.iter().sum()).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ScoreMatrix {
            n: self.n,
            m: self.m,
            s: self.s.iter().map(|v| v * factor).collect(),
        }
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.s
    }
}

/// Entries this far below zero are float noise and get clamped.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// A probability distribution over forecasters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SelectionDistribution {
    probs: Vec<f64>,
}

impl SelectionDistribution {
    /// Validates a raw probability vector. Entries in `[-1e-12, 0)` are
    /// clamped to zero and the vector renormalised; anything more negative, or
    /// a sum off by more than `1e-12`, is an internal error.
    pub fn from_raw(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("empty distribution"));
        }
        let mut clamped = false;
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -CLAMP_TOLERANCE {
                return Err(Error::Internal(format!(
                    "selection probability {p} is negative; the rule is probably not bounded in [0, 1]"
                )));
            }
            if *p < 0.0 {
                *p = 0.0;
                clamped = true;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > CLAMP_TOLERANCE {
            return Err(Error::Internal(format!("selection probabilities sum to {total}")));
        }
        if clamped {
            probs.iter_mut().for_each(|p| *p /= total);
        }
        Ok(SelectionDistribution { probs })
    }

    pub fn uniform(n: usize) -> Self {
        SelectionDistribution {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// Point mass on `i`.
    pub fn certain(n: usize, i: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[i] = 1.0;
        SelectionDistribution { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }

    /// Draws one forecaster index.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        WeightedIndex::new(&self.probs)
            .expect("validated distribution has positive mass")
            .sample(rng)
    }
}

impl std::ops::Index<usize> for SelectionDistribution {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.probs[i]
    }
}

/// Per-event lottery winners `w_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventWinnerVector(pub Vec<usize>);

impl EventWinnerVector {
    /// Number of events won by each of `n` forecasters.
    pub fn win_counts(&self, n: usize) -> Vec<usize> {
        let mut counts = vec![0; n];
        for &w in &self.0 {
            counts[w] += 1;
        }
        counts
    }
}

/// Output of a single competition run. Forecaster indices are zero-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetitionResult {
    pub mechanism: String,
    pub winner: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<SelectionDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_winners: Option<EventWinnerVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub win_counts: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranking: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate_normalization: bool,
    pub seed: u64,
}
