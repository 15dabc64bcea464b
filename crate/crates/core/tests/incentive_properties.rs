mod common;

use fcomp::incentives::{
    belief_independence_check, best_response, selection_probability, AuditOptions, Evaluator, Scenario, SearchMode,
};
use fcomp::{Mechanism, ScoringRule};
use proptest::prelude::*;

fn opts() -> AuditOptions {
    AuditOptions::default()
}

/// Selection probability under the event lottery, by hand: the atom average
/// of the audited forecaster's lottery share.
fn elf_oracle(s: &Scenario, y: &[f64]) -> f64 {
    s.atoms()
        .iter()
        .map(|a| {
            let mut rows = a.others.clone();
            rows.insert(s.i(), y.to_vec());
            a.p * common::lottery_matrix(common::quadratic, &rows, &a.x)[s.i()]
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn event_lottery_audits_find_no_violation(seed in any::<u64>()) {
        let s = common::random_scenario(&mut common::rng(seed), 4, 3, 8);
        let audit = best_response(&Mechanism::Elf, &ScoringRule::quadratic(), &s, 0.01, &opts()).unwrap();
        prop_assert!(!audit.violation, "{audit:?}");
        for (g, p) in audit.grid_best_report.iter().zip(&audit.truthful_report) {
            prop_assert!((g - p).abs() <= 0.01 + 1e-12);
        }
        prop_assert!(audit.best_value >= audit.truthful_value - 1e-12);
    }

    #[test]
    fn independent_event_lottery_audits_find_no_violation(seed in any::<u64>()) {
        let s = common::random_product_scenario(&mut common::rng(seed), 3, 3, 2);
        prop_assert!(belief_independence_check(&s, 1e-12));
        let audit = best_response(&Mechanism::ielf(), &ScoringRule::quadratic(), &s, 0.05, &opts()).unwrap();
        prop_assert_eq!(audit.evaluator, Evaluator::Exact);
        prop_assert!(!audit.violation, "{audit:?}");
    }

    #[test]
    fn lottery_selection_probability_matches_the_closed_form(seed in any::<u64>(), y in prop::collection::vec(0.0f64..=1.0, 3)) {
        let s = common::random_scenario(&mut common::rng(seed), 4, 3, 8);
        let y = &y[..s.m()];
        let v = selection_probability(&Mechanism::Elf, &ScoringRule::quadratic(), &s, y, &opts()).unwrap().value;
        prop_assert!((v - elf_oracle(&s, y)).abs() < 1e-12);
    }

    #[test]
    fn finer_grids_never_lower_the_best_value(seed in any::<u64>()) {
        let s = common::random_scenario(&mut common::rng(seed), 3, 2, 4);
        for mech in [Mechanism::mpsr(), Mechanism::Elf] {
            let mut last = f64::NEG_INFINITY;
            for step in [0.5, 0.25, 0.05, 0.01] {
                let a = best_response(&mech, &ScoringRule::quadratic(), &s, step, &opts()).unwrap();
                prop_assert!(a.best_value >= last - 1e-12);
                last = a.best_value;
            }
        }
    }
}

#[test]
fn correlated_scenarios_are_not_independent() {
    let mut found = 0;
    for seed in 0..50 {
        let s = common::random_scenario(&mut common::rng(seed), 3, 3, 6);
        if s.m() >= 2 && s.atoms().len() >= 2 && !belief_independence_check(&s, 1e-12) {
            found += 1;
        }
    }
    assert!(found > 10);
}

#[test]
fn parallel_and_single_threaded_audits_agree() {
    let s = fcomp::incentives::overconfidence_scenario(1, 3, 2).unwrap();
    let run = || best_response(&Mechanism::mpsr(), &ScoringRule::quadratic(), &s, 0.02, &opts()).unwrap();
    let parallel = run();
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(run);
    assert_eq!(parallel, single);
    assert_eq!(parallel.search, SearchMode::Exhaustive);
}
