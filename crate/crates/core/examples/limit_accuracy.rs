//! How often does the more accurate forecaster win as the number of events
//! grows? Compares the event lottery with independent-event lotteries.

use fcomp::accuracy::{accuracy_profile, monte_carlo_best_selection_rate};
use fcomp::{Mechanism, ReportMatrix, ScoringRule, TrueDistribution};

fn main() -> fcomp::Result<()> {
    let rule = ScoringRule::quadratic();
    let base = ReportMatrix::new(vec![vec![0.5], vec![0.8]])?;
    let profile = accuracy_profile(&base, &TrueDistribution::independent(vec![0.5])?, &rule)?;
    println!("expected scores {:?}, gap {:.3}", profile.expected_scores, profile.gap);

    println!("{:>5} {:>14} {:>14}", "m", "lottery", "independent");
    for m in [1, 10, 50, 200, 740] {
        let reports = base.replicate_events(m)?;
        let theta = TrueDistribution::independent(vec![0.5; m])?;
        let elf = monte_carlo_best_selection_rate(&Mechanism::Elf, &rule, &reports, &theta, 4_000, 3)?;
        let ielf = monte_carlo_best_selection_rate(&Mechanism::ielf(), &rule, &reports, &theta, 4_000, 3)?;
        println!(
            "{m:>5} {:>8.4}±{:.3} {:>8.4}±{:.3}",
            elf.rate, elf.std_error, ielf.rate, ielf.std_error
        );
    }
    Ok(())
}
