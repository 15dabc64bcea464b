//! Generators and hand-written oracles shared by the integration tests and the
//! acceptance suite. The oracles deliberately avoid the library's own code
//! paths.

#![allow(dead_code)]

use fcomp::incentives::{Atom, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `1 - (y - x)^2`
pub fn quadratic(y: f64, x: f64) -> f64 {
    1.0 - (y - x) * (y - x)
}

/// `(y x + (1 - y)(1 - x)) / sqrt(y^2 + (1 - y)^2)`
pub fn spherical(y: f64, x: f64) -> f64 {
    (y * x + (1.0 - y) * (1.0 - x)) / (y * y + (1.0 - y) * (1.0 - y)).sqrt()
}

/// Event-lottery shares for one column of scores.
pub fn lottery(scores: &[f64]) -> Vec<f64> {
    let n = scores.len() as f64;
    (0..scores.len())
        .map(|i| {
            let others: f64 = scores.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, s)| s).sum();
            1.0 / n + (scores[i] - others / (n - 1.0)) / n
        })
        .collect()
}

/// Multi-event lottery: per-event shares averaged.
pub fn lottery_matrix(score: impl Fn(f64, f64) -> f64, reports: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let (n, m) = (reports.len(), x.len());
    let mut out = vec![0.0; n];
    for k in 0..m {
        let col: Vec<f64> = reports.iter().map(|r| score(r[k], x[k])).collect();
        for (o, f) in out.iter_mut().zip(lottery(&col)) {
            *o += f / m as f64;
        }
    }
    out
}

/// Every binary outcome vector with its probability under independent `θ`.
pub fn outcomes(theta: &[f64]) -> Vec<(f64, Vec<f64>)> {
    let m = theta.len();
    (0..1u32 << m)
        .map(|bits| {
            let x: Vec<f64> = (0..m).map(|k| f64::from((bits >> k) & 1)).collect();
            let p = x
                .iter()
                .zip(theta)
                .map(|(&xk, &t)| if xk == 1.0 { t } else { 1.0 - t })
                .product();
            (p, x)
        })
        .collect()
}

pub fn random_reports(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..m).map(|_| rng.random::<f64>()).collect()).collect()
}

fn random_weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|v| v / total).collect();
    // Put the rounding residue on the last entry so the sum is 1 to within an ulp.
    let head: f64 = p[..k - 1].iter().sum();
    p[k - 1] = 1.0 - head;
    p
}

/// Random finite scenario with arbitrary correlation between events and
/// between outcomes and rival reports.
pub fn random_scenario(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize, max_atoms: usize) -> Scenario {
    let n = rng.random_range(2..=max_n);
    let m = rng.random_range(1..=max_m);
    let atoms = rng.random_range(1..=max_atoms);
    let i = rng.random_range(0..n);
    let probs = random_weights(rng, atoms);
    let atoms = probs
        .into_iter()
        .map(|p| Atom {
            p,
            x: (0..m).map(|_| f64::from(u8::from(rng.random_bool(0.5)))).collect(),
            others: random_reports(rng, n - 1, m),
        })
        .collect();
    Scenario::new(i, n, m, atoms).expect("generated scenario is valid")
}

/// Random scenario that factorises across events.
pub fn random_product_scenario(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    max_m: usize,
    max_atoms_per_event: usize,
) -> Scenario {
    let n = rng.random_range(2..=max_n);
    let m = rng.random_range(1..=max_m);
    let i = rng.random_range(0..n);
    let per_event: Vec<Vec<(f64, f64, Vec<f64>)>> = (0..m)
        .map(|_| {
            let k = rng.random_range(1..=max_atoms_per_event);
            random_weights(rng, k)
                .into_iter()
                .map(|p| {
                    let x = f64::from(u8::from(rng.random_bool(0.5)));
                    let others = (0..n - 1).map(|_| rng.random::<f64>()).collect();
                    (p, x, others)
                })
                .collect()
        })
        .collect();
    Scenario::product(i, n, &per_event).expect("generated product scenario is valid")
}
