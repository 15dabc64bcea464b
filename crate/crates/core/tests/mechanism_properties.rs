mod common;

use fcomp::mechanisms::ielf::{event_distributions, win_count_states, DEFAULT_DP_STATE_LIMIT};
use fcomp::mechanisms::{
    elf_distribution, elf_distribution_single, elf_from_score_matrix, ielf_select, CategoricalReports, IelfConfig,
};
use fcomp::{Mechanism, OutcomeVector, ReportMatrix, ScoreMatrix, ScoringRule, SeededStream};
use proptest::prelude::*;

fn binary(bits: &[bool]) -> OutcomeVector {
    OutcomeVector::new(bits.iter().map(|&b| f64::from(u8::from(b))).collect())
}

fn instance() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<bool>, bool)> {
    (2usize..=8, 1usize..=10).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(prop::collection::vec(0.0f64..=1.0, m), n),
            prop::collection::vec(any::<bool>(), m),
            any::<bool>(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn elf_is_a_distribution_matching_the_hand_formula((rows, bits, spherical) in instance()) {
        let rule = if spherical { ScoringRule::spherical() } else { ScoringRule::quadratic() };
        let reports = ReportMatrix::new(rows.clone()).unwrap();
        let x = binary(&bits);
        let d = elf_distribution(&reports, &x, &rule).unwrap();
        prop_assert!((d.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(d.probs().iter().all(|p| (0.0..=1.0).contains(p)));
        let score = if spherical { common::spherical } else { common::quadratic };
        let oracle = common::lottery_matrix(score, &rows, x.as_slice());
        for (a, b) in d.probs().iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn multi_event_lottery_is_the_mean_of_single_events((rows, bits, _s) in instance()) {
        let rule = ScoringRule::quadratic();
        let reports = ReportMatrix::new(rows).unwrap();
        let x = binary(&bits);
        let d = elf_distribution(&reports, &x, &rule).unwrap();
        let m = reports.m();
        let mut mean = vec![0.0; reports.n()];
        for k in 0..m {
            let single = elf_distribution_single(&reports.column(k), x.as_slice()[k], &rule).unwrap();
            for (acc, p) in mean.iter_mut().zip(single.probs()) {
                *acc += p;
            }
        }
        let mean: Vec<f64> = mean.into_iter().map(|v| v / m as f64).collect();
        prop_assert_eq!(d.probs(), &mean[..]);
    }

    #[test]
    fn categorical_lottery_is_a_distribution(
        n in 2usize..=6,
        m in 1usize..=5,
        classes in 2usize..=5,
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let mut rng = common::rng(seed);
        let rows: Vec<Vec<Vec<f64>>> = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        let w: Vec<f64> = (0..classes).map(|_| rng.random::<f64>()).collect();
                        let t: f64 = w.iter().sum();
                        w.into_iter().map(|v| v / t).collect()
                    })
                    .collect()
            })
            .collect();
        let outcomes: Vec<usize> = (0..m).map(|_| rng.random_range(0..classes)).collect();
        let rule = ScoringRule::categorical_quadratic(classes).unwrap();
        let scores = ScoreMatrix::from_categorical(&CategoricalReports::new(rows).unwrap(), &outcomes, &rule).unwrap();
        let d = elf_from_score_matrix(&scores).unwrap();
        prop_assert!((d.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(d.probs().iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn real_valued_lottery_is_a_distribution(
        (rows, _b, absolute) in instance(),
        xs in prop::collection::vec(0.0f64..=1.0, 10),
    ) {
        let rule = if absolute { ScoringRule::absolute_on(0.0, 1.0) } else { ScoringRule::quadratic_on(0.0, 1.0) }.unwrap();
        let reports = ReportMatrix::new(rows).unwrap();
        let x = OutcomeVector::new(xs[..reports.m()].to_vec());
        let d = elf_distribution(&reports, &x, &rule).unwrap();
        prop_assert!((d.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(d.probs().iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn replays_are_deterministic((rows, bits, _s) in instance(), seed in any::<u64>()) {
        let reports = ReportMatrix::new(rows).unwrap();
        let x = binary(&bits);
        for mech in [Mechanism::Elf, Mechanism::ielf(), Mechanism::mpsr()] {
            let a = mech.run(&reports, &x, &ScoringRule::quadratic(), &mut SeededStream::new(seed)).unwrap();
            let b = mech.run(&reports, &x, &ScoringRule::quadratic(), &mut SeededStream::new(seed)).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}

#[test]
fn single_event_ielf_reduces_to_the_lottery() {
    let reports = ReportMatrix::new(vec![vec![0.2], vec![0.7], vec![0.55]]).unwrap();
    let x = OutcomeVector::new(vec![1.0]);
    let rule = ScoringRule::quadratic();
    let expected = elf_distribution_single(&[0.2, 0.7, 0.55], 1.0, &rule).unwrap();
    let trials = 100_000u64;
    let mut counts = [0u64; 3];
    for t in 0..trials {
        let mut rng = SeededStream::substream(77, fcomp::Purpose::Trial, t);
        counts[ielf_select(&reports, &x, &rule, &IelfConfig::default(), &mut rng)
            .unwrap()
            .winner] += 1;
    }
    for (c, p) in counts.iter().zip(expected.probs()) {
        let freq = *c as f64 / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((freq - p).abs() <= 3.0 * sigma, "{freq} vs {p}");
    }
}

#[test]
fn ielf_dp_matches_enumeration_of_event_winners() {
    let reports = ReportMatrix::new(vec![
        vec![0.9, 0.1, 0.6, 0.3],
        vec![0.4, 0.5, 0.5, 0.8],
        vec![0.2, 0.3, 0.9, 0.5],
    ])
    .unwrap();
    let x = OutcomeVector::new(vec![1.0, 0.0, 1.0, 1.0]);
    let rule = ScoringRule::quadratic();
    let cfg = IelfConfig::default();
    let dists = event_distributions(&reports, &x, &rule, &cfg).unwrap();
    let scores = ScoreMatrix::from_reports(&reports, &x, &rule).unwrap();
    let dp = Mechanism::ielf()
        .selection_distribution(&scores, DEFAULT_DP_STATE_LIMIT)
        .unwrap();

    // Enumerate all 3^4 winner vectors, splitting ties on the most wins evenly.
    let (n, m) = (3usize, 4usize);
    let mut oracle = vec![0.0; n];
    for code in 0..n.pow(m as u32) {
        let mut c = code;
        let mut p = 1.0;
        let mut wins = vec![0; n];
        for d in &dists {
            let w = c % n;
            c /= n;
            p *= d[w];
            wins[w] += 1;
        }
        let top = *wins.iter().max().unwrap();
        let leaders: Vec<usize> = (0..n).filter(|&i| wins[i] == top).collect();
        for &i in &leaders {
            oracle[i] += p / leaders.len() as f64;
        }
    }
    for (a, b) in dp.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-12, "{dp:?} vs {oracle:?}");
    }
    assert_eq!(win_count_states(3, 4), 15.0);
}

#[test]
fn shrink_is_applied_only_with_several_events() {
    let cfg = IelfConfig::default();
    assert_eq!(cfg.factor(1), 1.0);
    assert!((cfg.factor(2) - (1.0 - 1e-6)).abs() < 1e-18);
}
