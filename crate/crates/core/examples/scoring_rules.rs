//! Score a few forecasts under the built-in rules, normalize a rescaled rule
//! and confirm it lands back on the same canonical form.

use fcomp::scoring::{are_equivalent, expected_score, normalize};
use fcomp::{ScoringRule, TrueDistribution};

fn main() -> fcomp::Result<()> {
    let rules = [
        ScoringRule::quadratic(),
        ScoringRule::spherical(),
        ScoringRule::absolute(),
    ];
    println!("{:>6} {:>10} {:>10} {:>10}", "y", "quadratic", "spherical", "absolute");
    for y in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let s: Vec<f64> = rules.iter().map(|r| r.score(y, 1.0)).collect::<Result<_, _>>()?;
        println!("{y:>6.2} {:>10.4} {:>10.4} {:>10.4}", s[0], s[1], s[2]);
    }

    let theta = TrueDistribution::independent(vec![0.7])?;
    for y in [0.5, 0.7, 0.9] {
        println!(
            "expected quadratic score of {y} when theta = 0.7: {:.4}",
            expected_score(&rules[0], &[y], &theta)?
        );
    }

    let squashed = ScoringRule::quadratic().affine(0.4, &[0.1, 0.3])?;
    let norm = normalize(&squashed)?;
    let b = norm.bounds();
    println!("normalized bounds: [{:.4}, {:.4}]", b.lower, b.upper);
    println!(
        "same canonical form as quadratic: {}",
        are_equivalent(&squashed, &ScoringRule::quadratic(), 1e-9)?
    );
    Ok(())
}
