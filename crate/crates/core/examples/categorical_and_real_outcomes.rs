//! Lotteries beyond binary events: three-way categorical outcomes and
//! real-valued outcomes on a bounded range.

use fcomp::mechanisms::{elf_from_score_matrix, CategoricalReports};
use fcomp::{elf_distribution, OutcomeVector, ReportMatrix, ScoreMatrix, ScoringRule};

fn main() -> fcomp::Result<()> {
    let cat = CategoricalReports::new(vec![
        vec![vec![0.6, 0.3, 0.1], vec![0.2, 0.2, 0.6]],
        vec![vec![0.34, 0.33, 0.33], vec![0.1, 0.1, 0.8]],
        vec![vec![0.1, 0.1, 0.8], vec![0.5, 0.4, 0.1]],
    ])?;
    let rule = ScoringRule::categorical_quadratic(3)?;
    let scores = ScoreMatrix::from_categorical(&cat, &[0, 2], &rule)?;
    println!("categorical: {:?}", elf_from_score_matrix(&scores)?.probs());

    // Temperatures in degrees, scored on the range [-10, 40].
    let rule = ScoringRule::quadratic_on(-10.0, 40.0)?;
    let reports = ReportMatrix::new(vec![vec![21.0, 14.5], vec![18.0, 16.0], vec![25.0, 9.0]])?;
    let outcomes = OutcomeVector::new(vec![19.5, 15.0]);
    println!(
        "real-valued: {:?}",
        elf_distribution(&reports, &outcomes, &rule)?.probs()
    );
    Ok(())
}
