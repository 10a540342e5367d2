//! Coincidence matrices and the agreement measures computed from them.
//!
//! The same four measures serve both annotator agreement (pairs of human
//! labels of one post) and classifier evaluation (prediction paired with
//! the gold label). All of them read a single symmetric 3x3
//! [`CoincidenceMatrix`] in which every labelled pair is entered twice,
//! once as `(c, c')` and once as `(c', c)`.
//!
//! Krippendorff's Alpha is `1 - Do/De` with
//!
//! ```text
//! Do = 1/N        * sum_{c,c'} N(c,c') * d(c,c')^2
//! De = 1/(N(N-1)) * sum_{c,c'} N(c) N(c') * d(c,c')^2
//! ```
//!
//! where `d` is either the nominal difference (`0` on agreement, `1`
//! otherwise) or the interval difference `|c - c'|` on the codes
//! `{-1, 0, +1}`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{LabelPair, SentimentLabel};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgreementError {
    #[error("no label pairs")]
    NoPairs,
    #[error("empty coincidence matrix")]
    EmptyMatrix,
    #[error("undefined agreement: {0}")]
    Undefined(&'static str),
    #[error("coincidence counts must be symmetric and nonnegative")]
    InvalidCounts,
    #[error("bootstrap needs at least 2 samples and a level in (0, 1)")]
    BadBootstrapConfig,
    #[error("every bootstrap resample was undefined ({draws} draws)")]
    AllResamplesUndefined { draws: usize },
    #[error("pairs must contain all three labels")]
    MissingLabels,
    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
}

/// Symmetric 3x3 table of pair counts, indexed by label.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceMatrix<T> {
    counts: [[T; 3]; 3],
}

impl<T: Scalar> Default for CoincidenceMatrix<T> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T: Scalar> CoincidenceMatrix<T> {
    pub fn zeros() -> Self {
        CoincidenceMatrix {
            counts: std::array::from_fn(|_| std::array::from_fn(|_| T::zero())),
        }
    }

    /// Validates a raw table.
    #[allow(clippy::needless_range_loop)]
    pub fn from_counts(counts: [[T; 3]; 3]) -> Result<Self, AgreementError> {
        for i in 0..3 {
            for j in 0..3 {
                if counts[i][j] < T::zero() || counts[i][j] != counts[j][i] {
                    return Err(AgreementError::InvalidCounts);
                }
            }
        }
        Ok(CoincidenceMatrix { counts })
    }

    /// Enters one pair in both orders with the given weight.
    pub fn add_pair(&mut self, a: SentimentLabel, b: SentimentLabel, weight: T) {
        let (i, j) = (a.index(), b.index());
        self.counts[i][j] = self.counts[i][j].clone() + weight.clone();
        self.counts[j][i] = self.counts[j][i].clone() + weight;
    }

    pub fn from_label_pairs(pairs: impl IntoIterator<Item = (SentimentLabel, SentimentLabel)>) -> Self {
        let mut m = Self::zeros();
        for (a, b) in pairs {
            m.add_pair(a, b, T::one());
        }
        m
    }

    pub fn count(&self, a: SentimentLabel, b: SentimentLabel) -> &T {
        &self.counts[a.index()][b.index()]
    }

    pub fn counts(&self) -> &[[T; 3]; 3] {
        &self.counts
    }

    /// Row total `N(c)`.
    pub fn marginal(&self, c: SentimentLabel) -> T {
        self.counts[c.index()].iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    pub fn marginals(&self) -> [T; 3] {
        SentimentLabel::ALL.map(|c| self.marginal(c))
    }

    /// Grand total `N`.
    pub fn total(&self) -> T {
        self.marginals().into_iter().fold(T::zero(), |a, b| a + b)
    }

    pub fn diagonal(&self) -> T {
        (0..3).fold(T::zero(), |acc, i| acc + self.counts[i][i].clone())
    }

    pub fn scaled(&self, factor: T) -> Self {
        CoincidenceMatrix {
            counts: self.counts.clone().map(|row| row.map(|v| v * factor.clone())),
        }
    }

    pub fn merged(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for i in 0..3 {
            for j in 0..3 {
                out.counts[i][j] = out.counts[i][j].clone() + other.counts[i][j].clone();
            }
        }
        out
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> CoincidenceMatrix<U> {
        CoincidenceMatrix {
            counts: std::array::from_fn(|i| std::array::from_fn(|j| f(&self.counts[i][j]))),
        }
    }
}

/// Builds the coincidence matrix of a pair sequence.
pub fn build_coincidence<T: Scalar>(pairs: &[LabelPair]) -> Result<CoincidenceMatrix<T>, AgreementError> {
    if pairs.is_empty() {
        return Err(AgreementError::NoPairs);
    }
    Ok(CoincidenceMatrix::from_label_pairs(pairs.iter().map(|p| (p.first, p.second))))
}

/// Difference function of an Alpha instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Nominal,
    Interval,
}

impl Metric {
    /// Squared difference between two labels.
    pub fn delta_squared(self, a: SentimentLabel, b: SentimentLabel) -> u32 {
        match self {
            Metric::Nominal => u32::from(a != b),
            Metric::Interval => {
                let d = (i32::from(a.code()) - i32::from(b.code())).unsigned_abs();
                d * d
            }
        }
    }
}

/// Observed and expected disagreement.
pub fn disagreements<T: Scalar>(m: &CoincidenceMatrix<T>, metric: Metric) -> Result<(T, T), AgreementError> {
    let n = m.total();
    if n <= T::one() {
        return Err(AgreementError::Undefined("fewer than two pairable values"));
    }
    let marg = m.marginals();
    let mut observed = T::zero();
    let mut expected = T::zero();
    for a in SentimentLabel::ALL {
        for b in SentimentLabel::ALL {
            let d2 = metric.delta_squared(a, b);
            if d2 == 0 {
                continue;
            }
            let d2 = T::from_u32(d2).expect("small integer");
            observed = observed + m.count(a, b).clone() * d2.clone();
            expected = expected + marg[a.index()].clone() * marg[b.index()].clone() * d2;
        }
    }
    let observed = observed / n.clone();
    let expected = expected / (n.clone() * (n - T::one()));
    Ok((observed, expected))
}

/// Krippendorff's Alpha. Errors when the expected disagreement vanishes.
pub fn alpha<T: Scalar>(m: &CoincidenceMatrix<T>, metric: Metric) -> Result<T, AgreementError> {
    let (observed, expected) = disagreements(m, metric)?;
    if expected == T::zero() {
        return Err(AgreementError::Undefined("all values fall on one label"));
    }
    Ok(T::one() - observed / expected)
}

/// Mean of the negative and positive per-class F1, which on a symmetric
/// matrix reduce to `N(c,c)/N(c)`.
pub fn f1_bar<T: Scalar>(m: &CoincidenceMatrix<T>) -> Result<T, AgreementError> {
    use SentimentLabel::{Negative, Positive};
    let (n_neg, n_pos) = (m.marginal(Negative), m.marginal(Positive));
    if n_neg == T::zero() || n_pos == T::zero() {
        return Err(AgreementError::Undefined("no negative or no positive values"));
    }
    let f1_neg = m.count(Negative, Negative).clone() / n_neg;
    let f1_pos = m.count(Positive, Positive).clone() / n_pos;
    Ok((f1_neg + f1_pos) / T::from_u8(2).expect("2"))
}

pub fn accuracy<T: Scalar>(m: &CoincidenceMatrix<T>) -> Result<T, AgreementError> {
    let n = m.total();
    if n == T::zero() {
        return Err(AgreementError::EmptyMatrix);
    }
    Ok(m.diagonal() / n)
}

/// Accuracy within one class: only negative/positive confusions count.
pub fn acc_within_1<T: Scalar>(m: &CoincidenceMatrix<T>) -> Result<T, AgreementError> {
    use SentimentLabel::{Negative, Positive};
    let n = m.total();
    if n == T::zero() {
        return Err(AgreementError::EmptyMatrix);
    }
    let extreme = m.count(Positive, Negative).clone() + m.count(Negative, Positive).clone();
    Ok(T::one() - extreme / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasureKind {
    #[serde(rename = "alpha_nominal")]
    AlphaNominal,
    #[serde(rename = "alpha_interval")]
    AlphaInterval,
    #[serde(rename = "f1_bar")]
    F1Bar,
    #[serde(rename = "accuracy")]
    Accuracy,
    #[serde(rename = "acc_within_1")]
    AccWithin1,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 5] = [
        MeasureKind::AlphaNominal,
        MeasureKind::AlphaInterval,
        MeasureKind::F1Bar,
        MeasureKind::Accuracy,
        MeasureKind::AccWithin1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MeasureKind::AlphaNominal => "alpha_nominal",
            MeasureKind::AlphaInterval => "alpha_interval",
            MeasureKind::F1Bar => "f1_bar",
            MeasureKind::Accuracy => "accuracy",
            MeasureKind::AccWithin1 => "acc_within_1",
        }
    }

    pub fn evaluate<T: Scalar>(self, m: &CoincidenceMatrix<T>) -> Result<T, AgreementError> {
        match self {
            MeasureKind::AlphaNominal => alpha(m, Metric::Nominal),
            MeasureKind::AlphaInterval => alpha(m, Metric::Interval),
            MeasureKind::F1Bar => f1_bar(m),
            MeasureKind::Accuracy => accuracy(m),
            MeasureKind::AccWithin1 => acc_within_1(m),
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasureKind {
    type Err = AgreementError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        match key.as_str() {
            "alpha_nominal" | "alpha_nom" => Ok(MeasureKind::AlphaNominal),
            "alpha_interval" | "alpha_int" | "alpha" => Ok(MeasureKind::AlphaInterval),
            "f1_bar" | "f1" => Ok(MeasureKind::F1Bar),
            "accuracy" | "acc" => Ok(MeasureKind::Accuracy),
            "acc_within_1" | "acc1" | "acc_pm1" => Ok(MeasureKind::AccWithin1),
            _ => Err(AgreementError::UnknownMeasure(s.to_string())),
        }
    }
}

/// Percentile bootstrap interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub point: f64,
    pub low: f64,
    pub high: f64,
    pub level: f64,
    /// Resamples that produced a value.
    pub samples: usize,
    /// Draws rejected because the measure was undefined on them.
    pub undefined_draws: usize,
    /// Resample slots abandoned after hitting the retry cap.
    pub dropped: usize,
}

impl ConfidenceInterval {
    pub fn half_width(&self) -> f64 {
        (self.high - self.low) / 2.0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BootstrapConfig {
    pub samples: usize,
    pub level: f64,
    pub seed: u64,
    /// Redraws allowed per resample slot when the measure is undefined.
    pub retry_cap: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            samples: 1000,
            level: 0.95,
            seed: 0,
            retry_cap: 100,
        }
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Resamples pairs with replacement and reports a percentile interval.
///
/// Each resample slot draws from its own ChaCha stream keyed by the slot
/// index, so the result does not depend on thread scheduling.
pub fn bootstrap_ci(
    pairs: &[LabelPair],
    measure: MeasureKind,
    config: &BootstrapConfig,
) -> Result<ConfidenceInterval, AgreementError> {
    if config.samples < 2 || !(config.level > 0.0 && config.level < 1.0) {
        return Err(AgreementError::BadBootstrapConfig);
    }
    let full: CoincidenceMatrix<f64> = build_coincidence(pairs)?;
    let point = measure.evaluate(&full)?;
    let cells: Vec<(SentimentLabel, SentimentLabel)> = pairs.iter().map(|p| (p.first, p.second)).collect();

    let outcomes: Vec<(Option<f64>, usize)> = (0..config.samples)
        .into_par_iter()
        .map(|slot| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(slot as u64);
            let mut failed = 0;
            for _ in 0..=config.retry_cap {
                let mut tally = [[0u32; 3]; 3];
                for _ in 0..cells.len() {
                    let (a, b) = cells[rng.random_range(0..cells.len())];
                    tally[a.index()][b.index()] += 1;
                }
                let mut m = CoincidenceMatrix::<f64>::zeros();
                for a in SentimentLabel::ALL {
                    for b in SentimentLabel::ALL {
                        let n = tally[a.index()][b.index()];
                        if n > 0 {
                            m.add_pair(a, b, f64::from(n));
                        }
                    }
                }
                match measure.evaluate(&m) {
                    Ok(v) => return (Some(v), failed),
                    Err(_) => failed += 1,
                }
            }
            (None, failed)
        })
        .collect();

    let undefined_draws = outcomes.iter().map(|o| o.1).sum();
    let mut values: Vec<f64> = outcomes.iter().filter_map(|o| o.0).collect();
    let dropped = config.samples - values.len();
    if values.is_empty() {
        return Err(AgreementError::AllResamplesUndefined { draws: undefined_draws });
    }
    values.sort_by(f64::total_cmp);
    let tail = (1.0 - config.level) / 2.0;
    // percentile bounds need not bracket the point estimate on skewed
    // bootstrap distributions; widen to keep low <= point <= high
    let low = quantile(&values, tail).min(point);
    let high = quantile(&values, 1.0 - tail).max(point);
    Ok(ConfidenceInterval {
        point,
        low,
        high,
        level: config.level,
        samples: values.len(),
        undefined_draws,
        dropped,
    })
}

/// Class-ordering diagnostics derived from pairwise-restricted Alphas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingDiagnostics<T> {
    /// `(alpha_int - alpha_nom) / alpha_nom` on the full pair set.
    pub relative_gain: T,
    /// `alpha_int(-,0) / alpha_int(-,+)`.
    pub dist_neg_neutral: T,
    /// `alpha_int(0,+) / alpha_int(-,+)`.
    pub dist_pos_neutral: T,
}

fn restricted_alpha<T: Scalar>(
    pairs: &[LabelPair],
    a: SentimentLabel,
    b: SentimentLabel,
) -> Result<T, AgreementError> {
    let m = CoincidenceMatrix::<T>::from_label_pairs(
        pairs
            .iter()
            .filter(|p| [p.first, p.second].iter().all(|&l| l == a || l == b))
            .map(|p| (p.first, p.second)),
    );
    alpha(&m, Metric::Interval)
}

pub fn ordering_diagnostics<T: Scalar>(pairs: &[LabelPair]) -> Result<OrderingDiagnostics<T>, AgreementError> {
    use SentimentLabel::*;
    let m: CoincidenceMatrix<T> = build_coincidence(pairs)?;
    if m.marginals().iter().any(|v| *v == T::zero()) {
        return Err(AgreementError::MissingLabels);
    }
    let interval = alpha(&m, Metric::Interval)?;
    let nominal = alpha(&m, Metric::Nominal)?;
    if nominal == T::zero() {
        return Err(AgreementError::Undefined("nominal alpha is zero"));
    }
    let extremes = restricted_alpha::<T>(pairs, Negative, Positive)?;
    if extremes == T::zero() {
        return Err(AgreementError::Undefined("negative/positive alpha is zero"));
    }
    let neg_neu = restricted_alpha::<T>(pairs, Negative, Neutral)?;
    let neu_pos = restricted_alpha::<T>(pairs, Neutral, Positive)?;
    Ok(OrderingDiagnostics {
        relative_gain: (interval - nominal.clone()) / nominal,
        dist_neg_neutral: neg_neu / extremes.clone(),
        dist_pos_neutral: neu_pos / extremes,
    })
}

/// Column-wise mean of per-dataset diagnostics, skipping excluded names.
/// `None` when nothing remains.
pub fn average_diagnostics<'a>(
    rows: impl IntoIterator<Item = (&'a str, &'a OrderingDiagnostics<f64>)>,
    exclude: &[String],
) -> Option<OrderingDiagnostics<f64>> {
    let kept: Vec<_> = rows
        .into_iter()
        .filter(|(name, _)| !exclude.iter().any(|e| e.eq_ignore_ascii_case(name)))
        .map(|(_, d)| d)
        .collect();
    if kept.is_empty() {
        return None;
    }
    let n = kept.len() as f64;
    Some(OrderingDiagnostics {
        relative_gain: kept.iter().map(|d| d.relative_gain).sum::<f64>() / n,
        dist_neg_neutral: kept.iter().map(|d| d.dist_neg_neutral).sum::<f64>() / n,
        dist_pos_neutral: kept.iter().map(|d| d.dist_pos_neutral).sum::<f64>() / n,
    })
}

/// Mean label code of a `[negative, neutral, positive]` count triple.
pub fn sentiment_score<T: Scalar>(counts: [usize; 3]) -> Result<T, AgreementError> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(AgreementError::EmptyMatrix);
    }
    let pos = T::from_count(counts[2]);
    let neg = T::from_count(counts[0]);
    Ok((pos - neg) / T::from_count(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use SentimentLabel::*;

    fn fixture() -> Vec<LabelPair> {
        let mut v = Vec::new();
        v.extend(std::iter::repeat_n(LabelPair::new(Negative, Negative), 2));
        v.extend(std::iter::repeat_n(LabelPair::new(Neutral, Neutral), 2));
        v.push(LabelPair::new(Negative, Positive));
        v
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn single_agreeing_pair() {
        let m: CoincidenceMatrix<f64> = build_coincidence(&[LabelPair::new(Negative, Negative)]).unwrap();
        assert_eq!(*m.count(Negative, Negative), 2.0);
        assert_eq!(m.total(), 2.0);
    }

    #[test]
    fn single_disagreeing_pair() {
        let m: CoincidenceMatrix<f64> = build_coincidence(&[LabelPair::new(Negative, Positive)]).unwrap();
        assert_eq!(*m.count(Negative, Positive), 1.0);
        assert_eq!(*m.count(Positive, Negative), 1.0);
        assert_eq!(m.total(), 2.0);
    }

    #[test]
    fn fixture_marginals() {
        let m: CoincidenceMatrix<f64> = build_coincidence(&fixture()).unwrap();
        assert_eq!(m.total(), 10.0);
        assert_eq!(m.marginals(), [5.0, 4.0, 1.0]);
    }

    #[test]
    fn empty_pairs_rejected() {
        assert_eq!(build_coincidence::<f64>(&[]), Err(AgreementError::NoPairs));
    }

    #[test]
    fn fixture_measures_exact() {
        // hand evaluation: interval Do = 8/10, De = 88/90; nominal Do = 2/10, De = 58/90
        let m: CoincidenceMatrix<BigRational> = build_coincidence(&fixture()).unwrap();
        assert_eq!(disagreements(&m, Metric::Interval).unwrap(), (ratio(8, 10), ratio(88, 90)));
        assert_eq!(disagreements(&m, Metric::Nominal).unwrap(), (ratio(2, 10), ratio(58, 90)));
        assert_eq!(alpha(&m, Metric::Interval).unwrap(), ratio(2, 11));
        assert_eq!(alpha(&m, Metric::Nominal).unwrap(), ratio(20, 29));
        assert_eq!(f1_bar(&m).unwrap(), ratio(2, 5));
        assert_eq!(accuracy(&m).unwrap(), ratio(4, 5));
        assert_eq!(acc_within_1(&m).unwrap(), ratio(4, 5));
    }

    #[test]
    fn fixture_measures_float() {
        let m: CoincidenceMatrix<f64> = build_coincidence(&fixture()).unwrap();
        assert_abs_diff_eq!(alpha(&m, Metric::Interval).unwrap(), 1.0 - 0.8 / (88.0 / 90.0), epsilon = 1e-12);
        assert_abs_diff_eq!(alpha(&m, Metric::Nominal).unwrap(), 1.0 - 0.2 / (58.0 / 90.0), epsilon = 1e-12);
        assert_abs_diff_eq!(f1_bar(&m).unwrap(), 0.4, epsilon = 1e-12);
    }

    #[test]
    fn perfect_diagonal() {
        let m = CoincidenceMatrix::<f64>::from_label_pairs([(Negative, Negative), (Positive, Positive), (Neutral, Neutral)]);
        for k in MeasureKind::ALL {
            assert_eq!(k.evaluate(&m).unwrap(), 1.0, "{k}");
        }
    }

    #[test]
    fn degenerate_alpha_is_an_error() {
        let m = CoincidenceMatrix::<f64>::from_label_pairs([(Neutral, Neutral); 4]);
        assert!(matches!(alpha(&m, Metric::Interval), Err(AgreementError::Undefined(_))));
        assert!(matches!(alpha(&m, Metric::Nominal), Err(AgreementError::Undefined(_))));
        assert!(matches!(f1_bar(&m), Err(AgreementError::Undefined(_))));
        assert_eq!(accuracy(&m).unwrap(), 1.0);
    }

    #[test]
    fn all_neutral_on_one_side_maximizes_acc_within_1() {
        let m = CoincidenceMatrix::<f64>::from_label_pairs([
            (Neutral, Negative),
            (Neutral, Positive),
            (Neutral, Neutral),
            (Neutral, Positive),
        ]);
        assert_eq!(acc_within_1(&m).unwrap(), 1.0);
    }

    #[test]
    fn from_counts_validates_symmetry() {
        let bad = [[1.0, 2.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        assert_eq!(CoincidenceMatrix::from_counts(bad), Err(AgreementError::InvalidCounts));
        let neg = [[-1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        assert_eq!(CoincidenceMatrix::from_counts(neg), Err(AgreementError::InvalidCounts));
    }

    #[test]
    fn measure_names_roundtrip() {
        for k in MeasureKind::ALL {
            assert_eq!(k.as_str().parse::<MeasureKind>().unwrap(), k);
        }
        assert!("kappa".parse::<MeasureKind>().is_err());
    }

    #[test]
    fn bootstrap_constant_measure() {
        let mut pairs = vec![LabelPair::new(Negative, Negative); 20];
        pairs.extend(vec![LabelPair::new(Positive, Positive); 20]);
        let cfg = BootstrapConfig { samples: 200, ..Default::default() };
        let ci = bootstrap_ci(&pairs, MeasureKind::AlphaInterval, &cfg).unwrap();
        assert_eq!((ci.low, ci.point, ci.high), (1.0, 1.0, 1.0));
        assert_eq!(ci.samples, 200);
    }

    #[test]
    fn bootstrap_counts_undefined_draws() {
        // one disagreeing pair among agreeing neutrals: many resamples miss it
        let mut pairs = vec![LabelPair::new(Neutral, Neutral); 3];
        pairs.push(LabelPair::new(Neutral, Positive));
        let cfg = BootstrapConfig { samples: 100, seed: 3, ..Default::default() };
        let ci = bootstrap_ci(&pairs, MeasureKind::AlphaNominal, &cfg).unwrap();
        assert!(ci.undefined_draws > 0);
        assert!(ci.low <= ci.point && ci.point <= ci.high);
    }

    #[test]
    fn bootstrap_all_undefined() {
        let mut pairs = vec![LabelPair::new(Neutral, Neutral); 3];
        pairs.push(LabelPair::new(Neutral, Positive));
        let cfg = BootstrapConfig { samples: 10, retry_cap: 0, seed: 1, ..Default::default() };
        // f1_bar needs a negative; never present
        assert!(matches!(
            bootstrap_ci(&pairs, MeasureKind::F1Bar, &cfg),
            Err(AgreementError::Undefined(_))
        ));
    }

    #[test]
    fn bootstrap_rejects_bad_config() {
        let pairs = vec![LabelPair::new(Neutral, Positive); 3];
        let cfg = BootstrapConfig { samples: 1, ..Default::default() };
        assert_eq!(bootstrap_ci(&pairs, MeasureKind::Accuracy, &cfg), Err(AgreementError::BadBootstrapConfig));
    }

    #[test]
    fn bootstrap_is_reproducible() {
        let pairs: Vec<_> = (0..60)
            .map(|i| LabelPair::new(SentimentLabel::from_index(i % 3), SentimentLabel::from_index((i / 3) % 3)))
            .collect();
        let cfg = BootstrapConfig { samples: 300, seed: 42, ..Default::default() };
        let a = bootstrap_ci(&pairs, MeasureKind::AlphaInterval, &cfg).unwrap();
        let b = bootstrap_ci(&pairs, MeasureKind::AlphaInterval, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ordering_requires_all_labels() {
        let pairs = vec![LabelPair::new(Negative, Neutral), LabelPair::new(Neutral, Neutral)];
        assert_eq!(ordering_diagnostics::<f64>(&pairs), Err(AgreementError::MissingLabels));
    }

    #[test]
    fn average_with_exclusions() {
        let d = |g| OrderingDiagnostics { relative_gain: g, dist_neg_neutral: 0.5, dist_pos_neutral: 0.25 };
        let rows = [("English".to_string(), d(0.2)), ("Spanish".to_string(), d(-0.158))];
        let avg = average_diagnostics(rows.iter().map(|(n, d)| (n.as_str(), d)), &["spanish".into()]).unwrap();
        assert_eq!(avg.relative_gain, 0.2);
        let none = average_diagnostics(rows.iter().map(|(n, d)| (n.as_str(), d)), &["english".into(), "spanish".into()]);
        assert!(none.is_none());
    }

    #[test]
    fn sentiment_scores() {
        assert_eq!(sentiment_score::<f64>([1, 0, 1]).unwrap(), 0.0);
        assert_eq!(sentiment_score::<f64>([0, 0, 5]).unwrap(), 1.0);
        assert!(sentiment_score::<f64>([0, 0, 0]).is_err());
        assert_eq!(sentiment_score::<BigRational>([6246, 14217, 3145]).unwrap(), ratio(3145 - 6246, 23608));
    }
}
