use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scoring::ScoringRule;

/// Largest event count for which the 2^m outcome vectors of an independent
/// distribution are enumerated.
pub const MAX_ENUMERATED_EVENTS: usize = 24;

/// One support point of a joint outcome distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointAtom {
    pub p: f64,
    pub x: Vec<u8>,
}

/// Ground-truth distribution over binary outcome vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrueDistribution {
    /// Independent events with the given marginal probabilities.
    Independent(Vec<f64>),
    /// Explicit finite support over `{0,1}^m`.
    Joint { m: usize, atoms: Vec<JointAtom> },
}

impl TrueDistribution {
    pub fn independent(theta: Vec<f64>) -> Result<Self> {
        let d = TrueDistribution::Independent(theta);
        d.validate()?;
        Ok(d)
    }

    pub fn joint(m: usize, atoms: Vec<JointAtom>) -> Result<Self> {
        let d = TrueDistribution::Joint { m, atoms };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TrueDistribution::Independent(theta) => {
                if theta.is_empty() {
                    return Err(invalid("distribution needs at least one event"));
                }
                if let Some(t) = theta.iter().find(|t| !(0.0..=1.0).contains(*t)) {
                    return Err(invalid(format!("event probability {t} outside [0, 1]")));
                }
            }
            TrueDistribution::Joint { m, atoms } => {
                if *m == 0 || atoms.is_empty() {
                    return Err(invalid("joint distribution needs events and atoms"));
                }
                for a in atoms {
                    if !(a.p >= 0.0) {
                        return Err(invalid(format!("atom probability {} is negative", a.p)));
                    }
                    if a.x.len() != *m || a.x.iter().any(|&v| v > 1) {
                        return Err(invalid("atom outcome must be a 0/1 vector of length m"));
                    }
                }
                let total: f64 = atoms.iter().map(|a| a.p).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(invalid(format!("atom probabilities sum to {total}, not 1")));
                }
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        match self {
            TrueDistribution::Independent(theta) => theta.len(),
            TrueDistribution::Joint { m, .. } => *m,
        }
    }

    pub fn is_independent(&self) -> bool {
        matches!(self, TrueDistribution::Independent(_))
    }

    /// Per-event probabilities `θ_k`.
    pub fn marginals(&self) -> Vec<f64> {
        match self {
            TrueDistribution::Independent(theta) => theta.clone(),
            TrueDistribution::Joint { m, atoms } => (0..*m)
                .map(|k| atoms.iter().map(|a| a.p * f64::from(a.x[k])).sum())
                .collect(),
        }
    }

    /// Every outcome vector with positive probability, paired with that
    /// probability.
    pub fn support(&self) -> Result<Vec<(f64, Vec<f64>)>> {
        match self {
            TrueDistribution::Joint { atoms, .. } => Ok(atoms
                .iter()
                .filter(|a| a.p > 0.0)
                .map(|a| (a.p, a.x.iter().map(|&v| f64::from(v)).collect()))
                .collect()),
            TrueDistribution::Independent(theta) => {
                let m = theta.len();
                if m > MAX_ENUMERATED_EVENTS {
                    return Err(invalid(format!(
                        "refusing to enumerate 2^{m} outcome vectors (limit 2^{MAX_ENUMERATED_EVENTS})"
                    )));
                }
                let mut out = Vec::new();
                for bits in 0u64..(1u64 << m) {
                    let x: Vec<f64> = (0..m).map(|k| ((bits >> k) & 1) as f64).collect();
                    let p: f64 = x
                        .iter()
                        .zip(theta)
                        .map(|(&xk, &t)| if xk == 1.0 { t } else { 1.0 - t })
                        .product();
                    if p > 0.0 {
                        out.push((p, x));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Draws one outcome vector.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            TrueDistribution::Independent(theta) => theta
                .iter()
                .map(|&t| if rng.random::<f64>() < t { 1.0 } else { 0.0 })
                .collect(),
            TrueDistribution::Joint { atoms, .. } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for a in atoms {
                    acc += a.p;
                    if u < acc {
                        return a.x.iter().map(|&v| f64::from(v)).collect();
                    }
                }
                let last = atoms.iter().rev().find(|a| a.p > 0.0).unwrap_or(&atoms[0]);
                last.x.iter().map(|&v| f64::from(v)).collect()
            }
        }
    }
}

/// Expected average score `(1/m) Σ_k E[R(y_k, X_k)]` of a report vector
/// under `theta`, computed exactly.
pub fn expected_score(rule: &ScoringRule, y: &[f64], theta: &TrueDistribution) -> Result<f64> {
    if y.len() != theta.m() {
        return Err(invalid(format!(
            "report has {} events, distribution has {}",
            y.len(),
            theta.m()
        )));
    }
    for &v in y {
        rule.check_report(v)?;
    }
    rule.check_outcome(0.0)?;
    rule.check_outcome(1.0)?;
    let m = y.len() as f64;
    let total = match theta {
        TrueDistribution::Independent(t) => y
            .iter()
            .zip(t)
            .map(|(&yk, &tk)| tk * rule.score_unchecked(yk, 1.0) + (1.0 - tk) * rule.score_unchecked(yk, 0.0))
            .sum::<f64>(),
        TrueDistribution::Joint { atoms, .. } => atoms
            .iter()
            .map(|a| {
                a.p * y
                    .iter()
                    .zip(&a.x)
                    .map(|(&yk, &xk)| rule.score_unchecked(yk, f64::from(xk)))
                    .sum::<f64>()
            })
            .sum(),
    };
    Ok(total / m)
}
