use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::accuracy::monte_carlo_best_selection_rate;
use crate::error::{invalid, Result};
use crate::harness::io::parse_reports_csv;
use crate::mechanisms::{Mechanism, ReportMatrix};
use crate::rng::{derive_seed, Purpose};
use crate::scoring::{ScoringRule, TrueDistribution};

/// Where an experiment's base reports come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportsSource {
    /// One row per forecaster.
    Inline(Vec<Vec<f64>>),
    /// Path to a reports CSV, relative to the config file.
    Csv(PathBuf),
}

/// A limit-accuracy sweep over event counts.
///
/// ```json
/// { "mechanism": "ielf", "rule": "quadratic",
///   "reports": { "inline": [[0.5], [0.8]] },
///   "theta": { "independent": [0.5] },
///   "trials": 10000, "seed": 1, "m_sweep": [1, 10, 100, 740] }
/// ```
///
/// The base reports and `θ` are repeated cyclically to reach each `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mechanism: String,
    pub rule: String,
    pub reports: ReportsSource,
    pub theta: TrueDistribution,
    pub trials: u64,
    pub seed: u64,
    pub m_sweep: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// One line of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: usize,
    pub rate: f64,
    pub stderr: f64,
    pub best: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub mechanism: String,
    pub rule: String,
    pub seed: u64,
    pub trials: u64,
    pub config_hash: String,
    pub rows: Vec<SweepRow>,
}

/// Validated form of an [`ExperimentConfig`], with files loaded.
#[derive(Debug, Clone)]
pub struct PreparedExperiment {
    pub config: ExperimentConfig,
    pub mechanism: Mechanism,
    pub rule: ScoringRule,
    pub reports: ReportMatrix,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Hex SHA-256 of the config's canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serialises");
        hex::encode(Sha256::digest(&canonical))
    }

    /// Checks every field and loads referenced files. CSV paths are resolved
    /// against `base_dir`.
    pub fn prepare(&self, base_dir: &Path) -> Result<PreparedExperiment> {
        let mechanism: Mechanism = self.mechanism.parse()?;
        let rule: ScoringRule = self.rule.parse()?;
        mechanism.check_rule(&rule)?;
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.m_sweep.is_empty() || self.m_sweep.contains(&0) {
            return Err(invalid("m_sweep must list positive event counts"));
        }
        self.theta.validate()?;
        if !self.theta.is_independent() {
            return Err(invalid("limit-accuracy sweeps need independent events in theta"));
        }
        let reports = match &self.reports {
            ReportsSource::Inline(rows) => ReportMatrix::new(rows.clone())?,
            ReportsSource::Csv(path) => parse_reports_csv(base_dir.join(path))?.reports,
        };
        if reports.m() != self.theta.m() {
            return Err(invalid(format!(
                "reports cover {} events, theta covers {}",
                reports.m(),
                self.theta.m()
            )));
        }
        Ok(PreparedExperiment {
            config: self.clone(),
            mechanism,
            rule,
            reports,
        })
    }
}

fn replicate_theta(theta: &TrueDistribution, m: usize) -> Result<TrueDistribution> {
    let base = theta.marginals();
    TrueDistribution::independent((0..m).map(|k| base[k % base.len()]).collect())
}

/// Runs the sweep. Entry `s` of `m_sweep` uses master seed
/// `derive_seed(seed, Sweep, s)`.
pub fn run_experiment(prepared: &PreparedExperiment) -> Result<ExperimentResult> {
    let cfg = &prepared.config;
    let mut rows = Vec::with_capacity(cfg.m_sweep.len());
    for (s, &m) in cfg.m_sweep.iter().enumerate() {
        let reports = prepared.reports.replicate_events(m)?;
        let theta = replicate_theta(&cfg.theta, m)?;
        let est = monte_carlo_best_selection_rate(
            &prepared.mechanism,
            &prepared.rule,
            &reports,
            &theta,
            cfg.trials,
            derive_seed(cfg.seed, Purpose::Sweep, s as u64),
        )?;
        rows.push(SweepRow {
            m,
            rate: est.rate,
            stderr: est.std_error,
            best: est.best,
            gap: est.gap,
        });
    }
    Ok(ExperimentResult {
        mechanism: prepared.mechanism.to_string(),
        rule: prepared.rule.to_string(),
        seed: cfg.seed,
        trials: cfg.trials,
        config_hash: cfg.hash(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(trials: u64) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!(
            r#"{{ "mechanism": "ielf", "rule": "quadratic",
                 "reports": {{ "inline": [[0.5], [0.8]] }},
                 "theta": {{ "independent": [0.5] }},
                 "trials": {trials}, "seed": 11, "m_sweep": [1, 5] }}"#
        ))
        .unwrap()
    }

    #[test]
    fn single_trial_sweep_is_reproducible() {
        let prepared = config(1).prepare(Path::new(".")).unwrap();
        let a = run_experiment(&prepared).unwrap();
        let b = run_experiment(&prepared).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 2);
        assert!(a.rows.iter().all(|r| r.rate == 0.0 || r.rate == 1.0));
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn validation_precedes_work() {
        let mut c = config(0);
        assert!(c.prepare(Path::new(".")).is_err());
        c.trials = 10;
        c.m_sweep = vec![0];
        assert!(c.prepare(Path::new(".")).is_err());
        c.m_sweep = vec![1];
        c.reports = ReportsSource::Csv("does/not/exist.csv".into());
        assert!(c.prepare(Path::new(".")).is_err());
        assert!(ExperimentConfig::from_json(r#"{ "mechanism": "elf" }"#).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = config(10);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn csv_reports_resolve_against_config_dir() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("r.csv"), "forecaster,e1\na,0.5\nb,0.8\n").unwrap();
        let mut c = config(50);
        c.reports = ReportsSource::Csv("r.csv".into());
        let prepared = c.prepare(dir.path()).unwrap();
        assert_eq!(prepared.reports.column(0), vec![0.5, 0.8]);
    }
}
