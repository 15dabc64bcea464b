use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Built-in bounded scoring rule families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `1 - (y - x)^2`, strictly proper for probabilities and for means.
    Quadratic,
    /// `(yx + (1-y)(1-x)) / sqrt(y^2 + (1-y)^2)`, binary outcomes only.
    Spherical,
    /// `1 - |y - x|`, strictly proper for medians of real outcomes.
    Absolute,
    /// Multi-class Brier score rescaled into `[0, 1]`: `1 - ½ Σ_c (y_c - 1[c = x])^2`.
    CategoricalQuadratic,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Quadratic => "quadratic",
            Family::Spherical => "spherical",
            Family::Absolute => "absolute",
            Family::CategoricalQuadratic => "categorical-quadratic",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(Family::Quadratic),
            "spherical" => Ok(Family::Spherical),
            "absolute" => Ok(Family::Absolute),
            "categorical-quadratic" => Ok(Family::CategoricalQuadratic),
            "log" | "logarithmic" => Err(Error::UnsupportedRule(
                "the logarithmic rule is unbounded and cannot drive a lottery".into(),
            )),
            other => Err(invalid(format!("unknown scoring rule family `{other}`"))),
        }
    }
}

/// What a rule scores against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum OutcomeDomain {
    /// Outcome in {0, 1}, report a probability in `[0, 1]`.
    Binary,
    /// Outcome is a class index, report a probability vector over `classes`.
    Categorical { classes: usize },
    /// Outcome and report (a mean or median estimate) both in `[lo, hi]`.
    Interval { lo: f64, hi: f64 },
}

/// Closed interval containing every value a rule can produce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBounds {
    pub lower: f64,
    pub upper: f64,
}

impl ScoreBounds {
    /// True when the bounds lie inside `[0, 1]` up to `tol`.
    pub fn within_unit(&self, tol: f64) -> bool {
        self.lower >= -tol && self.upper <= 1.0 + tol
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lower - tol && v <= self.upper + tol
    }
}

/// A bounded scoring rule `alpha * base(y, x) + beta(x)`.
///
/// `beta` holds one offset per outcome for binary and categorical rules. For
/// interval rules it holds the offsets at the two ends of the interval and is
/// interpolated linearly in between, so `E[beta(X)]` never depends on the
/// report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoringRule {
    family: Family,
    alpha: f64,
    beta: Vec<f64>,
    domain: OutcomeDomain,
}

impl ScoringRule {
    fn built_in(family: Family, domain: OutcomeDomain) -> Result<Self> {
        let offsets = match domain {
            OutcomeDomain::Categorical { classes } => classes,
            _ => 2,
        };
        let rule = ScoringRule {
            family,
            alpha: 1.0,
            beta: vec![0.0; offsets],
            domain,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn quadratic() -> Self {
        Self::built_in(Family::Quadratic, OutcomeDomain::Binary).expect("valid built-in")
    }

    pub fn spherical() -> Self {
        Self::built_in(Family::Spherical, OutcomeDomain::Binary).expect("valid built-in")
    }

    /// Absolute rule on binary outcomes. Proper, but only weakly so.
    pub fn absolute() -> Self {
        Self::built_in(Family::Absolute, OutcomeDomain::Binary).expect("valid built-in")
    }

    pub fn categorical_quadratic(classes: usize) -> Result<Self> {
        Self::built_in(Family::CategoricalQuadratic, OutcomeDomain::Categorical { classes })
    }

    /// Quadratic rule for eliciting the mean of an outcome in `[lo, hi]`.
    pub fn quadratic_on(lo: f64, hi: f64) -> Result<Self> {
        Self::built_in(Family::Quadratic, OutcomeDomain::Interval { lo, hi })
    }

    /// Absolute rule for eliciting the median of an outcome in `[lo, hi]`.
    pub fn absolute_on(lo: f64, hi: f64) -> Result<Self> {
        Self::built_in(Family::Absolute, OutcomeDomain::Interval { lo, hi })
    }

    /// Builds a rule from all of its parts.
    pub fn new(family: Family, alpha: f64, beta: Vec<f64>, domain: OutcomeDomain) -> Result<Self> {
        let rule = ScoringRule {
            family,
            alpha,
            beta,
            domain,
        };
        rule.validate()?;
        Ok(rule)
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(invalid(format!("scale must be finite and > 0, got {}", self.alpha)));
        }
        if let Some(b) = self.beta.iter().find(|b| !b.is_finite()) {
            return Err(invalid(format!("offset must be finite, got {b}")));
        }
        let expected = match (self.family, self.domain) {
            (Family::CategoricalQuadratic, OutcomeDomain::Categorical { classes }) => {
                if classes < 2 {
                    return Err(invalid("categorical rules need at least 2 classes"));
                }
                classes
            }
            (Family::Quadratic | Family::Absolute, OutcomeDomain::Binary) => 2,
            (Family::Quadratic | Family::Absolute, OutcomeDomain::Interval { lo, hi }) => {
                if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                    return Err(invalid(format!("interval [{lo}, {hi}] is empty or not finite")));
                }
                2
            }
            (Family::Spherical, OutcomeDomain::Binary) => 2,
            (family, domain) => {
                return Err(Error::UnsupportedRule(format!(
                    "{} is not defined on {domain:?}",
                    family.name()
                )))
            }
        };
        if self.beta.len() != expected {
            return Err(invalid(format!(
                "expected {expected} outcome offsets, got {}",
                self.beta.len()
            )));
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn domain(&self) -> OutcomeDomain {
        self.domain
    }

    pub fn is_binary(&self) -> bool {
        matches!(self.domain, OutcomeDomain::Binary)
    }

    /// Whether scalar reports and outcomes are accepted by [`ScoringRule::score`].
    pub fn is_scalar(&self) -> bool {
        !matches!(self.domain, OutcomeDomain::Categorical { .. })
    }

    /// Strict properness of the underlying family on this domain.
    pub fn is_strictly_proper(&self) -> bool {
        !(self.family == Family::Absolute && self.is_binary())
    }

    /// Returns `scale * self + offsets(x)`.
    pub fn affine(&self, scale: f64, offsets: &[f64]) -> Result<Self> {
        if offsets.len() != self.beta.len() {
            return Err(invalid(format!(
                "expected {} offsets, got {}",
                self.beta.len(),
                offsets.len()
            )));
        }
        let beta = self.beta.iter().zip(offsets).map(|(b, o)| scale * b + o).collect();
        ScoringRule::new(self.family, scale * self.alpha, beta, self.domain)
    }

    /// Returns `factor * self`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        self.affine(factor, &vec![0.0; self.beta.len()])
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        self.alpha = alpha;
        self.validate()?;
        Ok(self)
    }

    pub fn with_beta(mut self, beta: Vec<f64>) -> Result<Self> {
        self.beta = beta;
        self.validate()?;
        Ok(self)
    }

    fn unit(&self, v: f64) -> f64 {
        match self.domain {
            OutcomeDomain::Interval { lo, hi } => (v - lo) / (hi - lo),
            _ => v,
        }
    }

    fn check_scalar(&self, y: f64, x: f64) -> Result<()> {
        match self.domain {
            OutcomeDomain::Binary => {
                if !(0.0..=1.0).contains(&y) {
                    return Err(invalid(format!("report {y} outside [0, 1]")));
                }
                if x != 0.0 && x != 1.0 {
                    return Err(invalid(format!("binary outcome must be 0 or 1, got {x}")));
                }
            }
            OutcomeDomain::Interval { lo, hi } => {
                if !(lo..=hi).contains(&y) {
                    return Err(invalid(format!("report {y} outside [{lo}, {hi}]")));
                }
                if !(lo..=hi).contains(&x) {
                    return Err(invalid(format!("outcome {x} outside [{lo}, {hi}]")));
                }
            }
            OutcomeDomain::Categorical { .. } => {
                return Err(invalid(
                    "categorical rules take probability vectors; use score_categorical",
                ))
            }
        }
        Ok(())
    }

    /// Scores a scalar report against a scalar outcome.
    pub fn score(&self, y: f64, x: f64) -> Result<f64> {
        self.check_scalar(y, x)?;
        Ok(self.score_unchecked(y, x))
    }

    /// Hot-path evaluation; callers must have validated the domain.
    pub(crate) fn score_unchecked(&self, y: f64, x: f64) -> f64 {
        let (u, v) = (self.unit(y), self.unit(x));
        let base = match self.family {
            Family::Quadratic => 1.0 - (u - v) * (u - v),
            Family::Absolute => 1.0 - (u - v).abs(),
            Family::Spherical => (u * v + (1.0 - u) * (1.0 - v)) / (u * u + (1.0 - u) * (1.0 - u)).sqrt(),
            Family::CategoricalQuadratic => unreachable!("validated as scalar"),
        };
        self.alpha * base + self.beta[0] + (self.beta[1] - self.beta[0]) * v
    }

    /// Scores a probability vector over classes against the realised class.
    pub fn score_categorical(&self, y: &[f64], x: usize) -> Result<f64> {
        let OutcomeDomain::Categorical { classes } = self.domain else {
            return Err(invalid("scalar rule applied to a categorical report"));
        };
        if y.len() != classes {
            return Err(invalid(format!(
                "report has {} entries, rule has {classes} classes",
                y.len()
            )));
        }
        if x >= classes {
            return Err(invalid(format!("class {x} outside 0..{classes}")));
        }
        if y.iter().any(|p| !(0.0..=1.0).contains(p)) || (y.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(invalid("categorical report is not a probability vector"));
        }
        let sq: f64 = y
            .iter()
            .enumerate()
            .map(|(c, p)| {
                let e = if c == x { 1.0 } else { 0.0 };
                (p - e) * (p - e)
            })
            .sum();
        Ok(self.alpha * (1.0 - 0.5 * sq) + self.beta[x])
    }

    /// Exact bounds, from the per-outcome extremes of the family.
    pub fn bounds(&self) -> ScoreBounds {
        match self.domain {
            OutcomeDomain::Categorical { .. } => {
                let lo = self.beta.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = self.beta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                ScoreBounds {
                    lower: lo,
                    upper: self.alpha + hi,
                }
            }
            OutcomeDomain::Binary | OutcomeDomain::Interval { .. } => {
                // The per-outcome minimum of every family is concave in the
                // (rescaled) outcome, so 0, 1/2 and 1 are the only candidates.
                let candidates: &[f64] = if self.is_binary() {
                    &[0.0, 1.0]
                } else {
                    &[0.0, 0.5, 1.0]
                };
                let beta = |v: f64| self.beta[0] + (self.beta[1] - self.beta[0]) * v;
                let lower = candidates
                    .iter()
                    .map(|&v| {
                        let far = v.max(1.0 - v);
                        let base_min = match self.family {
                            Family::Quadratic => 1.0 - far * far,
                            Family::Absolute => 1.0 - far,
                            // 0 at the opposite sure report.
                            _ => 0.0,
                        };
                        self.alpha * base_min + beta(v)
                    })
                    .fold(f64::INFINITY, f64::min);
                let upper = [0.0, 1.0]
                    .iter()
                    .map(|&v| self.alpha + beta(v))
                    .fold(f64::NEG_INFINITY, f64::max);
                ScoreBounds { lower, upper }
            }
        }
    }

    /// `(lo, hi)` of the scalar report/outcome domain.
    pub fn scalar_range(&self) -> Option<(f64, f64)> {
        match self.domain {
            OutcomeDomain::Binary => Some((0.0, 1.0)),
            OutcomeDomain::Interval { lo, hi } => Some((lo, hi)),
            OutcomeDomain::Categorical { .. } => None,
        }
    }

    pub(crate) fn check_report(&self, y: f64) -> Result<()> {
        match self.scalar_range() {
            Some((lo, hi)) if (lo..=hi).contains(&y) => Ok(()),
            Some((lo, hi)) => Err(invalid(format!("report {y} outside [{lo}, {hi}]"))),
            None => Err(invalid("categorical rule cannot score scalar reports")),
        }
    }

    pub(crate) fn check_outcome(&self, x: f64) -> Result<()> {
        match self.domain {
            OutcomeDomain::Binary if x == 0.0 || x == 1.0 => Ok(()),
            OutcomeDomain::Binary => Err(invalid(format!("binary outcome must be 0 or 1, got {x}"))),
            OutcomeDomain::Interval { lo, hi } if (lo..=hi).contains(&x) => Ok(()),
            OutcomeDomain::Interval { lo, hi } => Err(invalid(format!("outcome {x} outside [{lo}, {hi}]"))),
            OutcomeDomain::Categorical { .. } => Err(invalid("categorical rule cannot score scalar outcomes")),
        }
    }
}

impl Default for ScoringRule {
    fn default() -> Self {
        ScoringRule::quadratic()
    }
}

/// Formats as `family[:alpha=..][:beta0=..][:beta1=..]`, plus `classes`/`lo`/`hi`
/// where the domain needs them. Parses back with [`FromStr`].
impl fmt::Display for ScoringRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.family.name())?;
        match self.domain {
            OutcomeDomain::Binary => {}
            OutcomeDomain::Categorical { classes } => write!(f, ":classes={classes}")?,
            OutcomeDomain::Interval { lo, hi } => write!(f, ":lo={lo}:hi={hi}")?,
        }
        if self.alpha != 1.0 {
            write!(f, ":alpha={}", self.alpha)?;
        }
        for (k, b) in self.beta.iter().enumerate() {
            if *b != 0.0 {
                write!(f, ":beta{k}={b}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for ScoringRule {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let mut parts = spec.trim().split(':');
        let family: Family = parts.next().unwrap_or_default().parse()?;
        let mut alpha = 1.0;
        let mut betas: Vec<(usize, f64)> = Vec::new();
        let (mut classes, mut lo, mut hi) = (None, None, None);
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| invalid(format!("expected key=value in rule spec, got `{part}`")))?;
            let number = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|_| invalid(format!("`{v}` is not a number in rule spec")))
            };
            match key {
                "alpha" => alpha = number(value)?,
                "lo" => lo = Some(number(value)?),
                "hi" => hi = Some(number(value)?),
                "classes" => {
                    classes = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| invalid(format!("`{value}` is not a class count")))?,
                    )
                }
                k if k.starts_with("beta") => {
                    let idx = k[4..]
                        .parse::<usize>()
                        .map_err(|_| invalid(format!("bad offset key `{k}`")))?;
                    betas.push((idx, number(value)?));
                }
                k => return Err(invalid(format!("unknown rule parameter `{k}`"))),
            }
        }
        let domain = match (family, classes, lo, hi) {
            (Family::CategoricalQuadratic, Some(c), None, None) => OutcomeDomain::Categorical { classes: c },
            (Family::CategoricalQuadratic, None, _, _) => {
                return Err(invalid("categorical-quadratic needs classes=<c>"))
            }
            (_, None, None, None) => OutcomeDomain::Binary,
            (_, None, Some(lo), Some(hi)) => OutcomeDomain::Interval { lo, hi },
            _ => return Err(invalid(format!("inconsistent domain parameters in `{spec}`"))),
        };
        let offsets = match domain {
            OutcomeDomain::Categorical { classes } => classes,
            _ => 2,
        };
        let mut beta = vec![0.0; offsets];
        for (idx, b) in betas {
            *beta
                .get_mut(idx)
                .ok_or_else(|| invalid(format!("offset beta{idx} out of range")))? = b;
        }
        ScoringRule::new(family, alpha, beta, domain)
    }
}
