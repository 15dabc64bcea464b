use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accuracy::{accuracy_profile, prop7_grid_sweep};
use crate::error::{invalid, Error, Result};
use crate::incentives::{
    best_response, overconfidence_scenario, pigeonhole_duplicate_winsets, selection_probability, sure_rival_scenario,
    Atom, AuditOptions, Scenario,
};
use crate::mechanisms::{Mechanism, OutcomeVector, ReportMatrix, ScoreMatrix, TieBreak};
use crate::rng::{Purpose, SeededStream};
use crate::scoring::{expected_score, ScoringRule, TrueDistribution};

/// Scripted reproductions of the worked examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReproCase {
    /// Highest-score selection rewards overconfidence, any `n` and `m`.
    AppendixB,
    /// Dividing scores by their sum rewards shading towards a sure rival.
    AppendixD,
    /// The two-forecaster overconfidence example.
    #[serde(rename = "section_3_2")]
    Section32,
    /// Spherical and quadratic rules disagree on who is more accurate.
    #[serde(rename = "section_5_footnote")]
    Section5Footnote,
    /// Real-valued outcomes: undercutting the mean beats reporting it.
    #[serde(rename = "section_6_2_uniform")]
    Section62Uniform,
    /// No conditional report probabilities satisfy both constraints.
    Prop7,
    /// Five reports on one event must share a win-set.
    #[serde(rename = "pigeonhole_m1")]
    PigeonholeM1,
}

impl ReproCase {
    pub const ALL: [ReproCase; 7] = [
        ReproCase::AppendixB,
        ReproCase::AppendixD,
        ReproCase::Section32,
        ReproCase::Section5Footnote,
        ReproCase::Section62Uniform,
        ReproCase::Prop7,
        ReproCase::PigeonholeM1,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ReproCase::AppendixB => "appendix_b",
            ReproCase::AppendixD => "appendix_d",
            ReproCase::Section32 => "section_3_2",
            ReproCase::Section5Footnote => "section_5_footnote",
            ReproCase::Section62Uniform => "section_6_2_uniform",
            ReproCase::Prop7 => "prop7",
            ReproCase::PigeonholeM1 => "pigeonhole_m1",
        }
    }
}

impl fmt::Display for ReproCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ReproCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReproCase::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| invalid(format!("unknown case `{s}`")))
    }
}

/// One observed-versus-expected comparison. Booleans are encoded as 0 and 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn close(name: impl Into<String>, observed: f64, expected: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            expected,
            tolerance,
            passed: (observed - expected).abs() <= tolerance,
        }
    }

    pub fn holds(name: impl Into<String>, value: bool) -> Self {
        Check {
            name: name.into(),
            observed: f64::from(u8::from(value)),
            expected: 1.0,
            tolerance: 0.0,
            passed: value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproOutcome {
    pub case: ReproCase,
    pub passed: bool,
    pub checks: Vec<Check>,
}

const EXACT: f64 = 1e-12;

/// Deviation used in the real-valued counterexample.
pub const UNDERCUT: f64 = 0.001;
/// Trials per report in the real-valued counterexample.
pub const UNIFORM_TRIALS: u64 = 100_000;
/// Points in the discretised uniform outcome.
pub const UNIFORM_GRID: u64 = 1 << 20;

/// Runs a case. Only the real-valued counterexample uses `seed`.
pub fn run_repro(case: ReproCase, seed: u64) -> Result<ReproOutcome> {
    let checks = match case {
        ReproCase::AppendixB => appendix_b()?,
        ReproCase::AppendixD => appendix_d()?,
        ReproCase::Section32 => section_3_2()?,
        ReproCase::Section5Footnote => section_5_footnote()?,
        ReproCase::Section62Uniform => section_6_2_uniform(seed)?,
        ReproCase::Prop7 => {
            let s = prop7_grid_sweep(0.001)?;
            vec![
                Check::close("grid points satisfying both", s.both as f64, 0.0, 0.0),
                Check::close("grid points", s.points as f64, 1001.0 * 1001.0, 0.0),
            ]
        }
        ReproCase::PigeonholeM1 => {
            let cands: Vec<Vec<f64>> = [0.0, 0.25, 0.5, 0.75, 1.0].iter().map(|&y| vec![y]).collect();
            let found = pigeonhole_duplicate_winsets(&Mechanism::mpsr(), &ScoringRule::quadratic(), 2, &cands)?;
            vec![Check::holds("duplicate win-set pair found", found.is_some())]
        }
    };
    Ok(ReproOutcome {
        case,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn appendix_b() -> Result<Vec<Check>> {
    let q = ScoringRule::quadratic();
    let mech = Mechanism::mpsr();
    let opts = AuditOptions::default();
    let mut checks = Vec::new();
    // The audited forecaster is the last one, so index tie-breaking never
    // favours it.
    for (n, m) in [(2, 1), (3, 2), (4, 3)] {
        let s = overconfidence_scenario(n - 1, n, m)?;
        let truthful = s.derived_belief();
        let mut extreme = truthful.clone();
        extreme[m - 1] = 1.0;
        let tag = format!("n={n} m={m}");
        checks.push(Check::close(
            format!("{tag} truthful"),
            selection_probability(&mech, &q, &s, &truthful, &opts)?.value,
            0.2,
            EXACT,
        ));
        checks.push(Check::close(
            format!("{tag} overconfident"),
            selection_probability(&mech, &q, &s, &extreme, &opts)?.value,
            0.8,
            EXACT,
        ));
        if m <= 2 {
            let audit = best_response(&mech, &q, &s, 0.01, &opts)?;
            checks.push(Check::holds(format!("{tag} violation flagged"), audit.violation));
            checks.push(Check::close(
                format!("{tag} best response"),
                audit.best_value,
                0.8,
                EXACT,
            ));
        }
    }
    Ok(checks)
}

fn appendix_d() -> Result<Vec<Check>> {
    let q = ScoringRule::quadratic();
    let opts = AuditOptions::default();
    let s = sure_rival_scenario();
    let p = |y: f64| selection_probability(&Mechanism::MultNorm, &q, &s, &[y], &opts).map(|e| e.value);
    let audit = best_response(&Mechanism::MultNorm, &q, &s, 0.01, &opts)?;
    Ok(vec![
        Check::close("truthful 0.5", p(0.5)?, 5.0 / 7.0, EXACT),
        Check::close("shaded 0.8", p(0.8)?, 73.0 / 98.0, EXACT),
        Check::holds("violation flagged", audit.violation),
        Check::holds("best response at least 73/98", audit.best_value >= 73.0 / 98.0 - EXACT),
    ])
}

fn section_3_2() -> Result<Vec<Check>> {
    let q = ScoringRule::quadratic();
    let atom = |p: f64, x: f64| Atom {
        p,
        x: vec![x],
        others: vec![vec![0.9]],
    };
    let s = Scenario::new(0, 2, 1, vec![atom(0.8, 1.0), atom(0.2, 0.0)])?;
    let opts = AuditOptions::default();
    let p = |y: f64| selection_probability(&Mechanism::mpsr(), &q, &s, &[y], &opts).map(|e| e.value);
    Ok(vec![
        Check::close("truthful 0.8", p(0.8)?, 0.2, EXACT),
        Check::close("overconfident 0.95", p(0.95)?, 0.8, EXACT),
        Check::close("overconfident 1.0", p(1.0)?, 0.8, EXACT),
    ])
}

fn section_5_footnote() -> Result<Vec<Check>> {
    let theta = TrueDistribution::independent(vec![0.7])?;
    let reports = ReportMatrix::new(vec![vec![0.9], vec![0.51]])?;
    let sph = ScoringRule::spherical();
    let quad = ScoringRule::quadratic();
    let sph_best = accuracy_profile(&reports, &theta, &sph)?.best;
    let quad_best = accuracy_profile(&reports, &theta, &quad)?.best;
    Ok(vec![
        Check::close(
            "spherical score of 0.9",
            expected_score(&sph, &[0.9], &theta)?,
            0.73,
            0.005,
        ),
        Check::close(
            "spherical score of 0.51",
            expected_score(&sph, &[0.51], &theta)?,
            0.71,
            0.005,
        ),
        Check::close("spherical favours forecaster 1", sph_best as f64, 0.0, 0.0),
        Check::close("quadratic favours forecaster 2", quad_best as f64, 1.0, 0.0),
    ])
}

/// Rate at which forecaster 1 wins highest-score selection (uniform ties)
/// when reporting `y1` against two rivals at 0.5, with the outcome uniform on
/// the midpoints of a `UNIFORM_GRID`-cell grid over `[0, 1]`.
pub fn uniform_counterexample_rate(y1: f64, trials: u64, seed: u64) -> Result<(f64, f64)> {
    let rule = ScoringRule::quadratic_on(0.0, 1.0)?;
    let reports = ReportMatrix::new(vec![vec![y1], vec![0.5], vec![0.5]])?;
    let mech = Mechanism::Mpsr {
        ties: TieBreak::Uniform,
    };
    let wins: u64 = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let mut rng = SeededStream::substream(seed, Purpose::Repro, t);
            let cell = rng.random_range(0..UNIFORM_GRID);
            let x = OutcomeVector::new(vec![(cell as f64 + 0.5) / UNIFORM_GRID as f64]);
            let scores = ScoreMatrix::from_reports(&reports, &x, &rule)?;
            Ok(u64::from(mech.run_scores(&scores, &mut rng)?.winner == 0))
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    let rate = wins as f64 / trials as f64;
    Ok((rate, (rate * (1.0 - rate) / trials as f64).sqrt()))
}

fn binomial_3_sigma(p: f64, trials: u64) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

fn section_6_2_uniform(seed: u64) -> Result<Vec<Check>> {
    let cases = [
        ("truthful 0.5", 0.5, 1.0 / 3.0),
        ("undercut 0.5-eps", 0.5 - UNDERCUT, 0.5 - UNDERCUT),
        ("extreme 0", 0.0, 0.25),
    ];
    cases
        .iter()
        .map(|&(name, y, expected)| {
            let (rate, _) = uniform_counterexample_rate(y, UNIFORM_TRIALS, seed)?;
            Ok(Check::close(
                name,
                rate,
                expected,
                binomial_3_sigma(expected, UNIFORM_TRIALS),
            ))
        })
        .collect()
}
