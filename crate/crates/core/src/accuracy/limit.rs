use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accuracy::accuracy_profile;
use crate::error::{invalid, Error, Result};
use crate::mechanisms::{Mechanism, OutcomeVector, ReportMatrix};
use crate::rng::{Purpose, SeededStream};
use crate::scoring::{ScoringRule, TrueDistribution};

/// Target for limit accuracy: with accuracy gap `delta` among `n`
/// forecasters, select the best with probability above `pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitAccuracyParams {
    pub n: usize,
    pub delta: f64,
    pub pi: f64,
}

impl LimitAccuracyParams {
    pub fn new(n: usize, delta: f64, pi: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("need at least two forecasters, got {n}")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid(format!("accuracy gap must be positive, got {delta}")));
        }
        if !(0.0..1.0).contains(&pi) {
            return Err(invalid(format!("target probability must be in [0, 1), got {pi}")));
        }
        Ok(LimitAccuracyParams { n, delta, pi })
    }
}

/// Event count from Hoeffding's inequality that guarantees the independent
/// event lottery picks the best forecaster with probability at least `pi`:
/// `⌈(2(n-1)²/Δ²) ln(2(n-1)/(1-π))⌉`.
pub fn hoeffding_m_bound(params: &LimitAccuracyParams) -> Result<u64> {
    let p = LimitAccuracyParams::new(params.n, params.delta, params.pi)?;
    let k = (p.n - 1) as f64;
    let m = 2.0 * k * k / (p.delta * p.delta) * (2.0 * k / (1.0 - p.pi)).ln();
    Ok(m.ceil().max(1.0) as u64)
}

/// Empirical rate at which the most accurate forecaster wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub rate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub wins: u64,
    pub best: usize,
    pub gap: f64,
}

/// Replays the mechanism on `trials` outcome vectors drawn from `θ` and
/// counts how often the forecaster with the highest expected score wins.
///
/// Trial `t` draws from the substream `(seed, Trial, t)`, so the result is
/// the same however the trials are scheduled.
pub fn monte_carlo_best_selection_rate(
    mechanism: &Mechanism,
    rule: &ScoringRule,
    reports: &ReportMatrix,
    theta: &TrueDistribution,
    trials: u64,
    seed: u64,
) -> Result<RateEstimate> {
    if trials == 0 {
        return Err(invalid("need at least one trial"));
    }
    if !theta.is_independent() {
        return Err(invalid("limit-accuracy estimates need independent events"));
    }
    mechanism.check_rule(rule)?;
    let profile = accuracy_profile(reports, theta, rule)?;
    if profile.degenerate {
        return Err(Error::DegenerateGap(format!(
            "forecasters tie at expected score {}",
            profile.expected_scores[profile.best]
        )));
    }
    let best = profile.best;
    let wins: u64 = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let mut rng = SeededStream::substream(seed, Purpose::Trial, t);
            let x = OutcomeVector::new(theta.sample(&mut rng));
            let result = mechanism.run(reports, &x, rule, &mut rng)?;
            Ok(u64::from(result.winner == best))
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    let rate = wins as f64 / trials as f64;
    Ok(RateEstimate {
        rate,
        std_error: (rate * (1.0 - rate) / trials as f64).sqrt(),
        trials,
        wins,
        best,
        gap: profile.gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_values() {
        assert_eq!(
            hoeffding_m_bound(&LimitAccuracyParams::new(2, 1.0, 0.0).unwrap()).unwrap(),
            2
        );
        assert_eq!(
            hoeffding_m_bound(&LimitAccuracyParams::new(2, 0.09, 0.9).unwrap()).unwrap(),
            740
        );
        assert!(LimitAccuracyParams::new(2, 0.0, 0.5).is_err());
        assert!(LimitAccuracyParams::new(2, 0.1, 1.0).is_err());
    }

    #[test]
    fn bound_is_monotone() {
        let mut last = 0;
        for pi in [0.0, 0.3, 0.6, 0.9, 0.99] {
            let m = hoeffding_m_bound(&LimitAccuracyParams::new(3, 0.2, pi).unwrap()).unwrap();
            assert!(m >= last);
            last = m;
        }
        let mut last = 0;
        for delta in [0.9, 0.5, 0.1, 0.01] {
            let m = hoeffding_m_bound(&LimitAccuracyParams::new(3, delta, 0.5).unwrap()).unwrap();
            assert!(m >= last);
            last = m;
        }
    }

    #[test]
    fn single_event_rate_matches_closed_form() {
        let r = ReportMatrix::new(vec![vec![0.5], vec![0.8]]).unwrap();
        let t = TrueDistribution::independent(vec![0.5]).unwrap();
        let q = ScoringRule::quadratic();
        let est = monte_carlo_best_selection_rate(&Mechanism::ielf(), &q, &r, &t, 20_000, 3).unwrap();
        assert_eq!(est.best, 0);
        // ELF closed form 0.545, shrunk by (1 - ε) only when m ≥ 2
        assert!((est.rate - 0.545).abs() < 3.0 * est.std_error + 1e-3, "{est:?}");
    }

    #[test]
    fn rate_is_reproducible_and_refuses_ties() {
        let r = ReportMatrix::new(vec![vec![0.5, 0.5], vec![0.8, 0.8]]).unwrap();
        let t = TrueDistribution::independent(vec![0.5, 0.5]).unwrap();
        let q = ScoringRule::quadratic();
        let a = monte_carlo_best_selection_rate(&Mechanism::ielf(), &q, &r, &t, 500, 9).unwrap();
        let b = monte_carlo_best_selection_rate(&Mechanism::ielf(), &q, &r, &t, 500, 9).unwrap();
        assert_eq!(a, b);
        let tied = ReportMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(matches!(
            monte_carlo_best_selection_rate(&Mechanism::ielf(), &q, &tied, &t, 10, 0),
            Err(Error::DegenerateGap(_))
        ));
    }
}
