use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::accuracy::{hoeffding_m_bound, LimitAccuracyParams};
use crate::error::{invalid, Error, Result};
use crate::harness::experiment::{run_experiment, ExperimentConfig};
use crate::harness::io::{parse_outcomes_csv, read_reports_csv};
use crate::harness::repro::{run_repro, ReproCase};
use crate::incentives::{best_response, AuditOptions, Scenario};
use crate::mechanisms::{ielf_ranking, Mechanism};
use crate::rng::SeededStream;
use crate::scoring::ScoringRule;

/// Exit status for a successful command or passing reproduction.
pub const EXIT_OK: i32 = 0;
/// Exit status when an audit finds a violation or a reproduction fails.
pub const EXIT_FAILED: i32 = 1;
/// Exit status for usage, parse and validation errors.
pub const EXIT_USAGE: i32 = 2;

/// JSON document to print and the process exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub json: Value,
    pub code: i32,
}

impl CommandOutput {
    fn ok(json: Value) -> Self {
        CommandOutput { json, code: EXIT_OK }
    }
}

fn scalar_range(rule: &ScoringRule) -> Result<(f64, f64)> {
    rule.scalar_range().ok_or_else(|| {
        Error::UnsupportedRule(format!(
            "{rule} takes categorical reports; the CLI reads scalar reports"
        ))
    })
}

/// `fcomp run`: one competition on reports and outcomes from CSV files.
pub fn run(
    mechanism: &str,
    rule: &str,
    reports: &Path,
    outcomes: &Path,
    seed: u64,
    ranking: bool,
) -> Result<CommandOutput> {
    let mechanism: Mechanism = mechanism.parse()?;
    let rule: ScoringRule = rule.parse()?;
    let range = scalar_range(&rule)?;
    let labeled = read_reports_csv(fs::File::open(reports)?, range)?;
    let x = parse_outcomes_csv(outcomes, range)?;
    if x.m() != labeled.reports.m() {
        return Err(invalid(format!(
            "reports cover {} events, outcomes cover {}",
            labeled.reports.m(),
            x.m()
        )));
    }
    let mut rng = SeededStream::new(seed);
    let result = match (&mechanism, ranking) {
        (Mechanism::Ielf { config }, true) => {
            mechanism.check_rule(&rule)?;
            ielf_ranking(&labeled.reports, &x, &rule, config, &mut rng)?
        }
        (_, true) => return Err(invalid("--ranking is only defined for ielf")),
        (_, false) => mechanism.run(&labeled.reports, &x, &rule, &mut rng)?,
    };
    let mut doc = serde_json::to_value(&result)?;
    doc["rule"] = json!(rule.to_string());
    doc["winner_label"] = json!(labeled.labels[result.winner]);
    doc["forecasters"] = json!(labeled.labels);
    Ok(CommandOutput::ok(doc))
}

/// `fcomp simulate`: an event-count sweep from a JSON config. The result is
/// also written to the config's `output` path when one is given.
pub fn simulate(config_path: &Path) -> Result<CommandOutput> {
    let config = ExperimentConfig::from_json(&fs::read_to_string(config_path)?)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let prepared = config.prepare(base)?;
    let result = run_experiment(&prepared)?;
    let doc = serde_json::to_value(&result)?;
    if let Some(out) = &config.output {
        fs::write(base.join(out), serde_json::to_string_pretty(&doc)? + "\n")?;
    }
    Ok(CommandOutput::ok(doc))
}

/// `fcomp audit`: best-response search on a scenario file. Exits with
/// [`EXIT_FAILED`] when a profitable misreport exists.
pub fn audit(mechanism: &str, rule: &str, scenario: &Path, grid: f64, seed: u64) -> Result<CommandOutput> {
    let mechanism: Mechanism = mechanism.parse()?;
    let rule: ScoringRule = rule.parse()?;
    let scenario: Scenario = serde_json::from_str(&fs::read_to_string(scenario)?)?;
    let opts = AuditOptions {
        seed,
        ..AuditOptions::default()
    };
    let report = best_response(&mechanism, &rule, &scenario, grid, &opts)?;
    let code = if report.violation { EXIT_FAILED } else { EXIT_OK };
    let mut doc = serde_json::to_value(&report)?;
    doc["seed"] = json!(seed);
    Ok(CommandOutput { json: doc, code })
}

/// `fcomp bound`: events needed for limit accuracy.
pub fn bound(n: usize, delta: f64, pi: f64) -> Result<CommandOutput> {
    let params = LimitAccuracyParams::new(n, delta, pi)?;
    let m = hoeffding_m_bound(&params)?;
    Ok(CommandOutput::ok(json!({ "n": n, "delta": delta, "pi": pi, "m": m })))
}

/// `fcomp repro`: one case by id, or every case for `all`.
pub fn repro(case: &str, seed: u64) -> Result<CommandOutput> {
    let cases: Vec<ReproCase> = if case == "all" {
        ReproCase::ALL.to_vec()
    } else {
        vec![case.parse()?]
    };
    let outcomes = cases
        .into_iter()
        .map(|c| run_repro(c, seed))
        .collect::<Result<Vec<_>>>()?;
    let passed = outcomes.iter().all(|o| o.passed);
    Ok(CommandOutput {
        json: json!({ "seed": seed, "passed": passed, "cases": outcomes }),
        code: if passed { EXIT_OK } else { EXIT_FAILED },
    })
}
