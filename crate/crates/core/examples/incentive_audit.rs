//! Audit each mechanism on the same belief: a forecaster who thinks every
//! event is a coin flip, against a rival who reports 0.7 throughout.

use fcomp::incentives::{best_response, AuditOptions, Scenario};
use fcomp::{Mechanism, ScoringRule};

fn main() -> fcomp::Result<()> {
    let coin = vec![(0.5, 1.0, vec![0.7]), (0.5, 0.0, vec![0.7])];
    let rule = ScoringRule::quadratic();
    let opts = AuditOptions::default();

    for m in [1, 2] {
        let scenario = Scenario::product(0, 2, &vec![coin.clone(); m])?;
        println!("{m} event(s):");
        for mech in [
            Mechanism::mpsr(),
            Mechanism::MultNorm,
            Mechanism::Elf,
            Mechanism::ielf(),
        ] {
            if matches!(mech, Mechanism::MultNorm) && m > 1 {
                continue;
            }
            let a = best_response(&mech, &rule, &scenario, 0.05, &opts)?;
            println!(
                "  {:<9} truthful {:.4}  best {:.4} at {:?}  violation: {}",
                mech.name(),
                a.truthful_value,
                a.best_value,
                a.best_report,
                a.violation
            );
        }
    }
    Ok(())
}
