use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use senti_core::agreement::{self, bootstrap_ci, ordering_diagnostics, BootstrapConfig};
use senti_core::{CoincidenceMatrix64, ExactCoincidenceMatrix, LabelPair, MeasureKind, Metric, SentimentLabel};

fn label() -> impl Strategy<Value = SentimentLabel> {
    (0usize..3).prop_map(SentimentLabel::from_index)
}

fn pairs(max: usize) -> impl Strategy<Value = Vec<LabelPair>> {
    prop::collection::vec((label(), label()).prop_map(|(a, b)| LabelPair::new(a, b)), 1..max)
}

/// Do and De straight from the pairable values: every pair contributes
/// both orders, and De compares every ordered pair of distinct values.
fn brute_alpha(pairs: &[LabelPair], metric: Metric) -> Option<f64> {
    let d2 = |a: SentimentLabel, b: SentimentLabel| {
        let d = f64::from(a.code()) - f64::from(b.code());
        match metric {
            Metric::Nominal => f64::from(u8::from(a != b)),
            Metric::Interval => d * d,
        }
    };
    let values: Vec<SentimentLabel> = pairs.iter().flat_map(|p| [p.first, p.second]).collect();
    let n = values.len() as f64;
    let observed: f64 = pairs.iter().map(|p| 2.0 * d2(p.first, p.second)).sum::<f64>() / n;
    let mut expected = 0.0;
    for (i, &a) in values.iter().enumerate() {
        for (j, &b) in values.iter().enumerate() {
            if i != j {
                expected += d2(a, b);
            }
        }
    }
    expected /= n * (n - 1.0);
    (expected > 0.0).then(|| 1.0 - observed / expected)
}

fn exact(m: &CoincidenceMatrix64) -> ExactCoincidenceMatrix {
    m.map(|&v| BigRational::from_integer(BigInt::from(v as i64)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn alpha_matches_pairwise_oracle(ps in pairs(120)) {
        let m: CoincidenceMatrix64 = agreement::build_coincidence(&ps).unwrap();
        for metric in [Metric::Nominal, Metric::Interval] {
            match (brute_alpha(&ps, metric), agreement::alpha(&m, metric)) {
                (Some(expected), Ok(got)) => prop_assert!((expected - got).abs() < 1e-12),
                (None, Err(_)) => {}
                (e, g) => prop_assert!(false, "oracle {:?} vs {:?}", e, g),
            }
        }
    }

    #[test]
    fn measures_are_invariant_under_count_scaling(ps in pairs(60), factor in 2u32..7) {
        let m: CoincidenceMatrix64 = agreement::build_coincidence(&ps).unwrap();
        let big = exact(&m);
        let scaled = big.scaled(BigRational::from_integer(BigInt::from(factor)));
        // alpha carries an N/(N-1) factor, so only the ratio measures are
        // exactly scale free
        for kind in [MeasureKind::Accuracy, MeasureKind::AccWithin1, MeasureKind::F1Bar] {
            prop_assert_eq!(kind.evaluate(&big).ok(), kind.evaluate(&scaled).ok());
        }
    }

    #[test]
    fn inequalities_hold(ps in pairs(200)) {
        let m: CoincidenceMatrix64 = agreement::build_coincidence(&ps).unwrap();
        let acc = agreement::accuracy(&m).unwrap();
        prop_assert!(agreement::acc_within_1(&m).unwrap() >= acc);
        if let Ok(nominal) = agreement::alpha(&m, Metric::Nominal) {
            prop_assert!(nominal <= acc + 1e-12);
        }
        for v in m.counts().iter().flatten() {
            prop_assert!(*v >= 0.0);
        }
        for a in SentimentLabel::ALL {
            for b in SentimentLabel::ALL {
                prop_assert_eq!(m.count(a, b), m.count(b, a));
            }
        }
        prop_assert_eq!(m.total(), 2.0 * ps.len() as f64);
    }

    #[test]
    fn perfect_agreement_is_one(labels in prop::collection::vec(label(), 2..80)) {
        let ps: Vec<LabelPair> = labels.iter().map(|&l| LabelPair::new(l, l)).collect();
        let m: CoincidenceMatrix64 = agreement::build_coincidence(&ps).unwrap();
        for metric in [Metric::Nominal, Metric::Interval] {
            if let Ok(a) = agreement::alpha(&m, metric) {
                prop_assert_eq!(a, 1.0);
            }
        }
    }

    #[test]
    fn exact_and_float_agree(ps in pairs(100)) {
        let m: CoincidenceMatrix64 = agreement::build_coincidence(&ps).unwrap();
        let e = exact(&m);
        for kind in MeasureKind::ALL {
            if let (Ok(f), Ok(r)) = (kind.evaluate(&m), kind.evaluate(&e)) {
                let r = num_traits::ToPrimitive::to_f64(&r).unwrap();
                prop_assert!((f - r).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bootstrap_interval_brackets_point(ps in pairs(60), seed in 0u64..1000) {
        let config = BootstrapConfig { samples: 50, seed, ..Default::default() };
        if let Ok(ci) = bootstrap_ci(&ps, MeasureKind::Accuracy, &config) {
            prop_assert!(ci.low <= ci.point && ci.point <= ci.high);
            prop_assert_eq!(ci.samples + ci.dropped, 50);
        }
    }
}

#[test]
fn interval_ordering_gain_is_positive_when_errors_are_neighbors() {
    use SentimentLabel::*;
    let mut ps = Vec::new();
    for _ in 0..30 {
        ps.push(LabelPair::new(Negative, Negative));
        ps.push(LabelPair::new(Positive, Positive));
        ps.push(LabelPair::new(Neutral, Neutral));
    }
    for _ in 0..10 {
        ps.push(LabelPair::new(Negative, Neutral));
        ps.push(LabelPair::new(Neutral, Positive));
    }
    ps.push(LabelPair::new(Negative, Positive));
    let d = ordering_diagnostics::<f64>(&ps).unwrap();
    assert!(d.relative_gain > 0.0);
    assert!(d.dist_neg_neutral < 1.0 && d.dist_pos_neutral < 1.0);
}
