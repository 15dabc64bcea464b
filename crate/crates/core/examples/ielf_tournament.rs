//! Independent-event lotteries: exact winner probabilities from the win-count
//! recursion, a sampled winner and a full ranking.

use fcomp::mechanisms::ielf::{event_distributions, ielf_ranking, winner_probabilities, DEFAULT_DP_STATE_LIMIT};
use fcomp::mechanisms::IelfConfig;
use fcomp::{Mechanism, OutcomeVector, ReportMatrix, ScoringRule, SeededStream};

fn main() -> fcomp::Result<()> {
    let reports = ReportMatrix::new(vec![
        vec![0.8, 0.3, 0.6, 0.9, 0.2, 0.7],
        vec![0.6, 0.4, 0.5, 0.7, 0.4, 0.6],
        vec![1.0, 0.0, 1.0, 1.0, 0.0, 1.0],
        vec![0.5, 0.5, 0.5, 0.5, 0.5, 0.5],
    ])?;
    let outcomes = OutcomeVector::new(vec![1.0, 0.0, 1.0, 1.0, 1.0, 0.0]);
    let rule = ScoringRule::quadratic();
    let cfg = IelfConfig::default();

    let per_event = event_distributions(&reports, &outcomes, &rule, &cfg)?;
    let exact = winner_probabilities(&per_event, DEFAULT_DP_STATE_LIMIT)?;
    for (i, p) in exact.iter().enumerate() {
        println!("forecaster {i}: P(most event wins) = {p:.4}");
    }

    let result = Mechanism::ielf().run(&reports, &outcomes, &rule, &mut SeededStream::new(11))?;
    println!(
        "winner {} with win counts {:?}",
        result.winner,
        result.win_counts.unwrap_or_default()
    );

    let ranked = ielf_ranking(&reports, &outcomes, &rule, &cfg, &mut SeededStream::new(11))?;
    println!("ranking: {:?}", ranked.ranking.unwrap_or_default());
    Ok(())
}
