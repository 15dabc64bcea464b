use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mechanisms::ReportMatrix;

/// One support point of an audited forecaster's belief: an outcome vector and
/// the reports of everyone else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub p: f64,
    pub x: Vec<f64>,
    /// `(n - 1) × m` reports of the other forecasters, in index order.
    pub others: Vec<Vec<f64>>,
}

/// A finite joint belief over outcomes and other forecasters' reports, from
/// the point of view of forecaster `i` (zero-based).
///
/// The JSON form numbers forecasters from 1:
/// `{ "i": 1, "n": 2, "m": 1, "atoms": [ { "p": 0.5, "x": [1], "others": [[1.0]] } ] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioFile", into = "ScenarioFile")]
pub struct Scenario {
    i: usize,
    n: usize,
    m: usize,
    atoms: Vec<Atom>,
}

#[derive(Serialize, Deserialize)]
struct ScenarioFile {
    i: usize,
    n: usize,
    m: usize,
    atoms: Vec<Atom>,
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = Error;

    fn try_from(f: ScenarioFile) -> Result<Self> {
        if f.i == 0 {
            return Err(invalid("scenario forecaster index `i` is 1-based"));
        }
        Scenario::new(f.i - 1, f.n, f.m, f.atoms)
    }
}

impl From<Scenario> for ScenarioFile {
    fn from(s: Scenario) -> Self {
        ScenarioFile {
            i: s.i + 1,
            n: s.n,
            m: s.m,
            atoms: s.atoms,
        }
    }
}

/// Probability-sum slack for scenarios.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

impl Scenario {
    pub fn new(i: usize, n: usize, m: usize, atoms: Vec<Atom>) -> Result<Self> {
        if n < 2 || m == 0 {
            return Err(invalid(format!("scenario needs n >= 2 and m >= 1, got n={n} m={m}")));
        }
        if i >= n {
            return Err(invalid(format!("audited forecaster {i} out of range for n={n}")));
        }
        if atoms.is_empty() {
            return Err(invalid("scenario has no atoms"));
        }
        for (a, atom) in atoms.iter().enumerate() {
            if !(atom.p >= 0.0) {
                return Err(invalid(format!("atom {a} has negative probability {}", atom.p)));
            }
            if atom.x.len() != m {
                return Err(invalid(format!("atom {a} has {} outcomes, expected {m}", atom.x.len())));
            }
            if atom.others.len() != n - 1 || atom.others.iter().any(|r| r.len() != m) {
                return Err(invalid(format!(
                    "atom {a} must list {} × {m} reports of the others",
                    n - 1
                )));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.p).sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(invalid(format!("atom probabilities sum to {total}, not 1")));
        }
        Ok(Scenario { i, n, m, atoms })
    }

    /// Product scenario: each event gets its own list of
    /// `(probability, outcome, others' reports on that event)` and the joint
    /// is their independent product.
    pub fn product(i: usize, n: usize, per_event: &[Vec<(f64, f64, Vec<f64>)>]) -> Result<Self> {
        let m = per_event.len();
        let mut atoms = vec![Atom {
            p: 1.0,
            x: Vec::with_capacity(m),
            others: vec![Vec::with_capacity(m); n.saturating_sub(1)],
        }];
        for event in per_event {
            let mut next = Vec::with_capacity(atoms.len() * event.len());
            for atom in &atoms {
                for (p, x, others) in event {
                    if others.len() + 1 != n {
                        return Err(invalid("per-event atom lists the wrong number of other reports"));
                    }
                    let mut a = atom.clone();
                    a.p *= p;
                    a.x.push(*x);
                    for (row, &y) in a.others.iter_mut().zip(others) {
                        row.push(y);
                    }
                    next.push(a);
                }
            }
            atoms = next;
        }
        Scenario::new(i, n, m, atoms)
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Full report matrix for an atom with forecaster `i` reporting `y_i`.
    pub fn reports_with(&self, atom: &Atom, y_i: &[f64]) -> Result<ReportMatrix> {
        let mut rows = atom.others.clone();
        rows.insert(self.i, y_i.to_vec());
        ReportMatrix::new(rows)
    }

    /// The audited forecaster's belief `p_i = E[X]`, clamped into `[0, 1]`
    /// against rounding in the atom sum.
    pub fn derived_belief(&self) -> Vec<f64> {
        (0..self.m)
            .map(|k| self.atoms.iter().map(|a| a.p * a.x[k]).sum::<f64>().clamp(0.0, 1.0))
            .collect()
    }

    /// Per-event marginal of `(X_k, Y_{-i,k})`, duplicate points merged, in
    /// first-appearance order.
    pub fn event_marginal(&self, k: usize) -> Vec<(f64, f64, Vec<f64>)> {
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut out: Vec<(f64, f64, Vec<f64>)> = Vec::new();
        for a in &self.atoms {
            let others: Vec<f64> = a.others.iter().map(|r| r[k]).collect();
            let key = block_key(a.x[k], &others);
            match index.get(&key) {
                Some(&j) => out[j].0 += a.p,
                None => {
                    index.insert(key, out.len());
                    out.push((a.p, a.x[k], others));
                }
            }
        }
        out
    }

    /// Checks that the joint of `(X_k, Y_{-i,k})` blocks factorises across
    /// events: every support point's probability must equal the product of
    /// its block marginals within `tol`.
    pub fn is_belief_independent(&self, tol: f64) -> bool {
        let marginals: Vec<HashMap<Vec<u64>, f64>> = (0..self.m)
            .map(|k| {
                self.event_marginal(k)
                    .into_iter()
                    .map(|(p, x, others)| (block_key(x, &others), p))
                    .collect()
            })
            .collect();
        let mut joint: HashMap<Vec<Vec<u64>>, f64> = HashMap::new();
        for a in &self.atoms {
            let key: Vec<Vec<u64>> = (0..self.m)
                .map(|k| {
                    let others: Vec<f64> = a.others.iter().map(|r| r[k]).collect();
                    block_key(a.x[k], &others)
                })
                .collect();
            *joint.entry(key).or_insert(0.0) += a.p;
        }
        // Matching every present point suffices: the products over all
        // combinations sum to 1, as does the joint.
        joint.iter().all(|(key, &p)| {
            let product: f64 = key.iter().zip(&marginals).map(|(block, marg)| marg[block]).product();
            (p - product).abs() <= tol
        })
    }
}

fn block_key(x: f64, others: &[f64]) -> Vec<u64> {
    std::iter::once(x)
        .chain(others.iter().copied())
        .map(canonical_bits)
        .collect()
}

fn canonical_bits(v: f64) -> u64 {
    // -0.0 and 0.0 are the same report.
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}

/// The four-atom belief under which selecting by highest proper score rewards
/// overconfidence: the audited forecaster believes `(0.5, …, 0.5, 0.8)` while
/// every rival reports slightly above 0.8 on the last event.
///
/// `i` is zero-based; rival `j` (zero-based) reports `0.8 + (j + 1) / (10 n)`.
pub fn overconfidence_scenario(i: usize, n: usize, m: usize) -> Result<Scenario> {
    if n < 2 || m == 0 || i >= n {
        return Err(invalid("need n >= 2, m >= 1 and i < n"));
    }
    let rival = |j: usize| {
        let mut r = vec![0.5; m];
        r[m - 1] = 0.8 + (j + 1) as f64 / (10.0 * n as f64);
        r
    };
    let others: Vec<Vec<f64>> = (0..n).filter(|&j| j != i).map(rival).collect();
    let atom = |p: f64, head: f64, last: f64| {
        let mut x = vec![head; m];
        x[m - 1] = last;
        Atom {
            p,
            x,
            others: others.clone(),
        }
    };
    Scenario::new(
        i,
        n,
        m,
        vec![
            atom(0.4, 0.0, 1.0),
            atom(0.4, 1.0, 1.0),
            atom(0.1, 0.0, 0.0),
            atom(0.1, 1.0, 0.0),
        ],
    )
}

/// Two forecasters, one event: the rival surely reports 1 and the outcome is
/// a fair coin. Multiplicative normalization rewards shading towards 1 here.
pub fn sure_rival_scenario() -> Scenario {
    Scenario::new(
        0,
        2,
        1,
        vec![
            Atom {
                p: 0.5,
                x: vec![0.0],
                others: vec![vec![1.0]],
            },
            Atom {
                p: 0.5,
                x: vec![1.0],
                others: vec![vec![1.0]],
            },
        ],
    )
    .expect("valid scenario")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overconfidence_belief() {
        for m in 1..5 {
            let s = overconfidence_scenario(0, 3, m).unwrap();
            let p = s.derived_belief();
            assert!(p[..m - 1].iter().all(|v| (v - 0.5).abs() < 1e-15));
            assert!((p[m - 1] - 0.8).abs() < 1e-15);
        }
    }

    #[test]
    fn trivial_beliefs() {
        let s = Scenario::new(
            0,
            2,
            2,
            vec![Atom {
                p: 1.0,
                x: vec![1.0, 0.0],
                others: vec![vec![0.3, 0.3]],
            }],
        )
        .unwrap();
        assert_eq!(s.derived_belief(), vec![1.0, 0.0]);
        assert!(s.is_belief_independent(1e-12));
        assert_eq!(sure_rival_scenario().derived_belief(), vec![0.5]);
    }

    #[test]
    fn independence_of_product_scenarios() {
        let s = Scenario::product(
            1,
            3,
            &[
                vec![(0.3, 1.0, vec![0.2, 0.9]), (0.7, 0.0, vec![0.4, 0.4])],
                vec![
                    (0.5, 1.0, vec![0.6, 0.1]),
                    (0.25, 0.0, vec![0.6, 0.1]),
                    (0.25, 1.0, vec![0.0, 1.0]),
                ],
            ],
        )
        .unwrap();
        assert_eq!(s.atoms().len(), 6);
        assert!(s.is_belief_independent(1e-12));
    }

    #[test]
    fn correlated_outcomes_are_not_independent() {
        assert!(!overconfidence_scenario(0, 2, 3).unwrap().is_belief_independent(1e-12));
        // With two events the second outcome is independent of the first and
        // the rivals' reports are constant, so the scenario factorises.
        assert!(overconfidence_scenario(0, 2, 2).unwrap().is_belief_independent(1e-12));
    }

    #[test]
    fn json_round_trip_uses_one_based_index() {
        let json = r#"{ "i": 1, "n": 2, "m": 1, "atoms": [
            { "p": 0.5, "x": [1], "others": [[1.0]] },
            { "p": 0.5, "x": [0], "others": [[1.0]] } ] }"#;
        let s: Scenario = serde_json::from_str(json).unwrap();
        assert_eq!(s.i(), 0);
        let back: Scenario = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<Scenario>(&json.replace("\"i\": 1", "\"i\": 0")).is_err());
        assert!(serde_json::from_str::<Scenario>(&json.replace("0.5, \"x\": [0]", "0.6, \"x\": [0]")).is_err());
    }
}
