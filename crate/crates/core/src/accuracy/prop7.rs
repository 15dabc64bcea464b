//! Two linear constraints on conditional report probabilities that no point
//! of the unit square satisfies at once. They show that no mechanism can be
//! both incentive compatible and rank accurate when forecasters' beliefs are
//! correlated with each other.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Evaluates `q11 > 7/4 - (3/2) q10` and `q11 < 1/2 - (2/3) q10`.
pub fn prop7_infeasibility(q10: f64, q11: f64) -> Result<(bool, bool)> {
    if !(0.0..=1.0).contains(&q10) || !(0.0..=1.0).contains(&q11) {
        return Err(invalid(format!(
            "conditional probabilities must lie in [0, 1], got ({q10}, {q11})"
        )));
    }
    Ok((q11 > 1.75 - 1.5 * q10, q11 < 0.5 - 2.0 / 3.0 * q10))
}

/// Counts over a square grid of `(q10, q11)` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop7Sweep {
    pub step: f64,
    pub points: u64,
    pub first_only: u64,
    pub second_only: u64,
    pub both: u64,
    pub neither: u64,
}

impl Prop7Sweep {
    pub fn infeasible(&self) -> bool {
        self.both == 0
    }
}

/// Sweeps the grid `{0, step, …, 1}²`.
pub fn prop7_grid_sweep(step: f64) -> Result<Prop7Sweep> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(invalid(format!("grid step must be in (0, 1], got {step}")));
    }
    let k = (1.0 / step).round() as u64;
    if ((k as f64) * step - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("grid step {step} does not divide 1")));
    }
    let mut sweep = Prop7Sweep {
        step,
        points: 0,
        first_only: 0,
        second_only: 0,
        both: 0,
        neither: 0,
    };
    for a in 0..=k {
        for b in 0..=k {
            let (c1, c2) = prop7_infeasibility(a as f64 / k as f64, b as f64 / k as f64)?;
            sweep.points += 1;
            match (c1, c2) {
                (true, true) => sweep.both += 1,
                (true, false) => sweep.first_only += 1,
                (false, true) => sweep.second_only += 1,
                (false, false) => sweep.neither += 1,
            }
        }
    }
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corners() {
        assert_eq!(prop7_infeasibility(0.0, 0.0).unwrap(), (false, true));
        assert_eq!(prop7_infeasibility(1.0, 1.0).unwrap(), (true, false));
        assert!(prop7_infeasibility(1.2, 0.0).is_err());
    }

    #[test]
    fn no_grid_point_satisfies_both() {
        let s = prop7_grid_sweep(0.001).unwrap();
        assert_eq!(s.points, 1001 * 1001);
        assert!(s.infeasible());
        assert!(s.first_only > 0 && s.second_only > 0);
        assert_eq!(s.first_only + s.second_only + s.neither, s.points);
    }
}
