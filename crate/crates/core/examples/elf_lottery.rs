//! One event lottery competition: exact selection probabilities, then a
//! seeded draw that can be replayed.

use fcomp::{elf_distribution, Mechanism, OutcomeVector, ReportMatrix, ScoringRule, SeededStream};

fn main() -> fcomp::Result<()> {
    let reports = ReportMatrix::new(vec![
        vec![0.9, 0.2, 0.6, 0.7],
        vec![0.6, 0.4, 0.5, 0.5],
        vec![0.99, 0.01, 0.95, 0.05],
    ])?;
    let outcomes = OutcomeVector::new(vec![1.0, 0.0, 1.0, 0.0]);
    let rule = ScoringRule::quadratic();

    let dist = elf_distribution(&reports, &outcomes, &rule)?;
    for (i, p) in dist.probs().iter().enumerate() {
        println!("forecaster {i}: P(selected) = {p:.4}");
    }

    let a = Mechanism::Elf.run(&reports, &outcomes, &rule, &mut SeededStream::new(7))?;
    let b = Mechanism::Elf.run(&reports, &outcomes, &rule, &mut SeededStream::new(7))?;
    println!("seed 7 winner: {} (replay agrees: {})", a.winner, a.winner == b.winner);
    Ok(())
}
