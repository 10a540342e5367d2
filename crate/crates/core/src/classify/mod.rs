//! Three-class sentiment classifiers built from binary linear SVMs, plus a
//! multinomial Naive Bayes reference.
//!
//! Every SVM plane is trained on its own binary split of the labels. When
//! a [`Vocabulary`] is supplied, each plane sees Delta TF-IDF features
//! computed for its split from the training data; the per-term factors are
//! then folded into the plane weights, so all trained planes of a model
//! read the same raw term-count vector at prediction time.
//!
//! All planes use the convention that a decision value `>= 0` falls on
//! the positive side of the split.

mod bayes;
mod serial;
pub mod svm;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use bayes::NaiveBayesModel;
pub use serial::{MODEL_FORMAT, MODEL_VERSION};
pub use svm::{dual_objective, train_binary, train_binary_traced, LinearModel, TrainTrace};

use crate::agreement::{self, CoincidenceMatrix, Metric};
use crate::corpus::SentimentLabel::{self, Negative, Neutral, Positive};
use crate::features::{BinarySplit, FeatureError, SparseVector, Vocabulary};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("training data holds a single class")]
    SingleClass,
    #[error("training data has no {0} examples")]
    MissingClass(SentimentLabel),
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("feature dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vectors and labels differ in length")]
    LengthMismatch,
    #[error("naive Bayes needs nonnegative term counts")]
    NegativeFeature,
    #[error("invalid training configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("unknown classifier variant `{0}`")]
    UnknownVariant(String),
    #[error("model was trained with vocabulary {expected}, got {found}")]
    VocabularyMismatch { expected: String, found: String },
    #[error("model file: {0}")]
    Format(String),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Neutral-zone half-width policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NeutralZone<T> {
    Fixed(T),
    /// Chosen on a held-out tenth of the training data to maximize
    /// interval Alpha.
    Tuned,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig<T> {
    pub cost: T,
    pub max_epochs: usize,
    /// Stop once the largest projected-gradient violation in an epoch is
    /// below this.
    pub tolerance: T,
    pub seed: u64,
    /// Bins per axis for the binned two-plane variant.
    pub bin_grid: usize,
    pub neutral_zone: NeutralZone<T>,
    /// Scale per-class costs inversely to class frequency.
    pub balanced: bool,
}

impl<T: Real> Default for TrainConfig<T> {
    fn default() -> Self {
        TrainConfig {
            cost: T::one(),
            max_epochs: 50,
            tolerance: T::lit(1e-3),
            seed: 0,
            bin_grid: 10,
            neutral_zone: NeutralZone::Tuned,
            balanced: false,
        }
    }
}

impl<T: Real> TrainConfig<T> {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        if self.cost.is_nan() || self.cost <= T::zero() {
            return Err(ClassifyError::InvalidConfig("cost must be positive"));
        }
        if self.max_epochs == 0 {
            return Err(ClassifyError::InvalidConfig("max_epochs must be positive"));
        }
        if self.tolerance.is_nan() || self.tolerance <= T::zero() {
            return Err(ClassifyError::InvalidConfig("tolerance must be positive"));
        }
        if self.bin_grid == 0 {
            return Err(ClassifyError::InvalidConfig("bin_grid must be positive"));
        }
        if let NeutralZone::Fixed(h) = self.neutral_zone {
            if h < T::zero() {
                return Err(ClassifyError::InvalidConfig("neutral zone width must be nonnegative"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    NeutralZoneSvm,
    TwoPlaneSvm,
    TwoPlaneSvmBin,
    CascadingSvm,
    ThreePlaneSvm,
    NaiveBayes,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::NeutralZoneSvm,
        Variant::TwoPlaneSvm,
        Variant::TwoPlaneSvmBin,
        Variant::CascadingSvm,
        Variant::ThreePlaneSvm,
        Variant::NaiveBayes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::NeutralZoneSvm => "NeutralZoneSVM",
            Variant::TwoPlaneSvm => "TwoPlaneSVM",
            Variant::TwoPlaneSvmBin => "TwoPlaneSVMbin",
            Variant::CascadingSvm => "CascadingSVM",
            Variant::ThreePlaneSvm => "ThreePlaneSVM",
            Variant::NaiveBayes => "NaiveBayes",
        }
    }

    /// Binary splits of the planes, in plane order.
    pub fn splits(self) -> Vec<BinarySplit> {
        match self {
            Variant::NeutralZoneSvm => vec![BinarySplit::new(&[Negative], &[Positive])],
            Variant::TwoPlaneSvm | Variant::TwoPlaneSvmBin => vec![
                BinarySplit::new(&[Negative], &[Neutral, Positive]),
                BinarySplit::new(&[Negative, Neutral], &[Positive]),
            ],
            Variant::CascadingSvm => vec![
                BinarySplit::new(&[Neutral], &[Negative, Positive]),
                BinarySplit::new(&[Negative], &[Positive]),
            ],
            Variant::ThreePlaneSvm => vec![
                BinarySplit::new(&[Negative], &[Neutral]),
                BinarySplit::new(&[Neutral], &[Positive]),
                BinarySplit::new(&[Negative], &[Positive]),
            ],
            Variant::NaiveBayes => Vec::new(),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl serde::Serialize for Variant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ClassifyError::UnknownVariant(s.to_string()))
    }
}

/// Class counts `[negative, neutral, positive]` of a bin or subspace.
pub type ClassCounts = [u32; 3];

/// Majority label of a count triple. Ties go to `preferred` when it is
/// among the tied labels, else to neutral, else to the lower label.
fn majority(counts: &ClassCounts, preferred: SentimentLabel) -> SentimentLabel {
    let max = *counts.iter().max().expect("three counts");
    let tied = |l: SentimentLabel| counts[l.index()] == max;
    if tied(preferred) {
        preferred
    } else if tied(Neutral) {
        Neutral
    } else {
        SentimentLabel::ALL.into_iter().find(|&l| tied(l)).expect("some label attains the max")
    }
}

/// Geometric two-plane rule on the decision values of the lower plane
/// (negative vs. rest) and the upper plane (rest vs. positive).
///
/// Contradictions (negative side of the lower plane and positive side of
/// the upper one) go to whichever plane is farther away.
pub fn two_plane_rule<T: Real>(lower: T, upper: T) -> SentimentLabel {
    let below = lower < T::zero();
    let above = upper >= T::zero();
    match (below, above) {
        (true, false) => Negative,
        (false, true) => Positive,
        (false, false) => Neutral,
        (true, true) => {
            if -lower > upper {
                Negative
            } else {
                Positive
            }
        }
    }
}

/// Equal-width 2-D grid over the training decision values of the two
/// planes, with one overflow row/column on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct BinGrid<T> {
    pub per_axis: usize,
    pub low: [T; 2],
    pub high: [T; 2],
    /// Row-major `(per_axis + 2)^2` cells.
    pub cells: Vec<ClassCounts>,
}

impl<T: Real> BinGrid<T> {
    fn fit(points: &[[T; 2]], labels: &[SentimentLabel], per_axis: usize) -> Self {
        let low = [0, 1].map(|a| points.iter().map(|p| p[a]).fold(T::infinity(), T::min));
        let high = [0, 1].map(|a| points.iter().map(|p| p[a]).fold(T::neg_infinity(), T::max));
        let side = per_axis + 2;
        let mut grid = BinGrid {
            per_axis,
            low,
            high,
            cells: vec![[0; 3]; side * side],
        };
        for (p, l) in points.iter().zip(labels) {
            let c = grid.cell_of(*p);
            grid.cells[c][l.index()] += 1;
        }
        grid
    }

    fn axis_bin(&self, v: T, axis: usize) -> usize {
        let (lo, hi) = (self.low[axis], self.high[axis]);
        if v < lo {
            return 0;
        }
        if v > hi {
            return self.per_axis + 1;
        }
        let width = (hi - lo) / T::lit(self.per_axis as f64);
        if width.is_nan() || width <= T::zero() {
            return 1;
        }
        let k = ((v - lo) / width).floor().to_usize().unwrap_or(0);
        k.min(self.per_axis - 1) + 1
    }

    pub fn cell_of(&self, point: [T; 2]) -> usize {
        self.axis_bin(point[0], 0) * (self.per_axis + 2) + self.axis_bin(point[1], 1)
    }
}

/// Trained classifier, one of six variants.
#[derive(Debug, Clone, PartialEq)]
pub enum SentimentModel<T> {
    NeutralZone {
        plane: LinearModel<T>,
        half_width: T,
    },
    TwoPlane {
        lower: LinearModel<T>,
        upper: LinearModel<T>,
    },
    TwoPlaneBin {
        lower: LinearModel<T>,
        upper: LinearModel<T>,
        grid: BinGrid<T>,
    },
    Cascading {
        subjectivity: LinearModel<T>,
        polarity: LinearModel<T>,
    },
    ThreePlane {
        /// negative|neutral, neutral|positive, negative|positive.
        planes: [LinearModel<T>; 3],
        /// Indexed by the sign pattern of the three decisions.
        subspaces: [ClassCounts; 8],
    },
    NaiveBayes(NaiveBayesModel<T>),
}

/// Predicted label with an optional confidence in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction<T> {
    pub label: SentimentLabel,
    pub confidence: Option<T>,
}

impl<T> Prediction<T> {
    fn bare(label: SentimentLabel) -> Self {
        Prediction { label, confidence: None }
    }
}

/// A model plus the vocabulary hash it was trained against.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel<T> {
    pub model: SentimentModel<T>,
    pub dim: usize,
    pub vocabulary_hash: Option<String>,
}

impl<T: Real> SentimentModel<T> {
    pub fn variant(&self) -> Variant {
        match self {
            SentimentModel::NeutralZone { .. } => Variant::NeutralZoneSvm,
            SentimentModel::TwoPlane { .. } => Variant::TwoPlaneSvm,
            SentimentModel::TwoPlaneBin { .. } => Variant::TwoPlaneSvmBin,
            SentimentModel::Cascading { .. } => Variant::CascadingSvm,
            SentimentModel::ThreePlane { .. } => Variant::ThreePlaneSvm,
            SentimentModel::NaiveBayes(_) => Variant::NaiveBayes,
        }
    }

    /// Constituent hyperplanes in plane order.
    pub fn planes(&self) -> Vec<&LinearModel<T>> {
        match self {
            SentimentModel::NeutralZone { plane, .. } => vec![plane],
            SentimentModel::TwoPlane { lower, upper } | SentimentModel::TwoPlaneBin { lower, upper, .. } => {
                vec![lower, upper]
            }
            SentimentModel::Cascading { subjectivity, polarity } => vec![subjectivity, polarity],
            SentimentModel::ThreePlane { planes, .. } => planes.iter().collect(),
            SentimentModel::NaiveBayes(_) => Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SentimentModel::NaiveBayes(nb) => nb.dim(),
            other => other.planes()[0].dim(),
        }
    }

    /// Decision value of every plane, in plane order.
    pub fn decisions(&self, x: &SparseVector<T>) -> Result<Vec<T>, ClassifyError> {
        self.planes().into_iter().map(|p| p.decision(x)).collect()
    }

    pub fn predict(&self, x: &SparseVector<T>) -> Result<Prediction<T>, ClassifyError> {
        match self {
            SentimentModel::NeutralZone { plane, half_width } => {
                let d = plane.decision(x)?;
                Ok(Prediction::bare(neutral_zone_rule(d, *half_width)))
            }
            SentimentModel::TwoPlane { lower, upper } => {
                Ok(Prediction::bare(two_plane_rule(lower.decision(x)?, upper.decision(x)?)))
            }
            SentimentModel::TwoPlaneBin { lower, upper, grid } => {
                let point = [lower.decision(x)?, upper.decision(x)?];
                let geometric = two_plane_rule(point[0], point[1]);
                let counts = &grid.cells[grid.cell_of(point)];
                let total: u32 = counts.iter().sum();
                if total == 0 {
                    return Ok(Prediction::bare(geometric));
                }
                let label = majority(counts, geometric);
                let confidence = T::lit(f64::from(counts[label.index()]) / f64::from(total));
                Ok(Prediction {
                    label,
                    confidence: Some(confidence),
                })
            }
            SentimentModel::Cascading { subjectivity, polarity } => {
                if subjectivity.decision(x)? < T::zero() {
                    return Ok(Prediction::bare(Neutral));
                }
                let label = if polarity.decision(x)? >= T::zero() { Positive } else { Negative };
                Ok(Prediction::bare(label))
            }
            SentimentModel::ThreePlane { planes, subspaces } => {
                let d = [planes[0].decision(x)?, planes[1].decision(x)?, planes[2].decision(x)?];
                let vote = one_vs_one_vote(d);
                let counts = &subspaces[subspace_index(d)];
                if counts.iter().sum::<u32>() == 0 {
                    return Ok(Prediction::bare(vote));
                }
                Ok(Prediction::bare(majority(counts, vote)))
            }
            SentimentModel::NaiveBayes(nb) => {
                let (label, p) = nb.predict(x)?;
                Ok(Prediction {
                    label,
                    confidence: Some(p),
                })
            }
        }
    }
}

fn neutral_zone_rule<T: Real>(d: T, half_width: T) -> SentimentLabel {
    if d.abs() < half_width {
        Neutral
    } else if d >= T::zero() {
        Positive
    } else {
        Negative
    }
}

fn subspace_index<T: Real>(d: [T; 3]) -> usize {
    d.iter().enumerate().fold(0, |acc, (k, &v)| acc | (usize::from(v >= T::zero()) << k))
}

/// One-vs-one voting over the three pairwise planes. A three-way tie goes
/// to the class with the largest summed `|decision|` over its votes.
fn one_vs_one_vote<T: Real>(d: [T; 3]) -> SentimentLabel {
    let winners = [
        if d[0] >= T::zero() { Neutral } else { Negative },
        if d[1] >= T::zero() { Positive } else { Neutral },
        if d[2] >= T::zero() { Positive } else { Negative },
    ];
    let mut votes = [0u8; 3];
    let mut strength = [T::zero(); 3];
    for (k, w) in winners.iter().enumerate() {
        votes[w.index()] += 1;
        strength[w.index()] = strength[w.index()] + d[k].abs();
    }
    let mut best = 0;
    for c in 1..3 {
        if (votes[c], strength[c]) > (votes[best], strength[best]) {
            best = c;
        }
    }
    SentimentLabel::from_index(best)
}

/// Training examples: feature vectors (raw term counts when a vocabulary
/// is used) with their gold labels.
#[derive(Debug, Clone, Copy)]
pub struct TrainingSet<'a, T> {
    pub vectors: &'a [SparseVector<T>],
    pub labels: &'a [SentimentLabel],
}

impl<'a, T: Real> TrainingSet<'a, T> {
    pub fn new(vectors: &'a [SparseVector<T>], labels: &'a [SentimentLabel]) -> Result<Self, ClassifyError> {
        if vectors.len() != labels.len() {
            return Err(ClassifyError::LengthMismatch);
        }
        if vectors.is_empty() {
            return Err(ClassifyError::EmptyTrainingSet);
        }
        let dim = vectors[0].dim();
        if let Some(v) = vectors.iter().find(|v| v.dim() != dim) {
            return Err(ClassifyError::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
        Ok(TrainingSet { vectors, labels })
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    fn has(&self, label: SentimentLabel) -> bool {
        self.labels.contains(&label)
    }
}

/// Trains one plane for a split on a subset of examples.
fn train_plane<T: Real>(
    set: &TrainingSet<'_, T>,
    subset: impl Iterator<Item = usize>,
    split: BinarySplit,
    weighting: Option<&Vocabulary>,
    config: &TrainConfig<T>,
    plane_index: u64,
) -> Result<LinearModel<T>, ClassifyError> {
    let scale = weighting.map(|v| v.delta_weights::<T>(split)).transpose()?;
    let data: Vec<(SparseVector<T>, i8)> = subset
        .filter_map(|i| {
            split.sign(set.labels[i]).map(|y| {
                let x = match &scale {
                    Some(s) => set.vectors[i].weighted(s),
                    None => set.vectors[i].clone(),
                };
                (x, y)
            })
        })
        .collect();
    let plane_config = TrainConfig {
        seed: config.seed.wrapping_add(plane_index.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        ..config.clone()
    };
    let model = train_binary(&data, &plane_config)?;
    Ok(match &scale {
        Some(s) => model.fold_scaling(s),
        None => model,
    })
}

/// Trains a sentiment classifier of the requested variant.
///
/// With `weighting = Some(vocab)` the vectors must be raw term counts over
/// `vocab`; every plane then trains on Delta TF-IDF features for its own
/// split (the vocabulary must carry counts for [`Variant::splits`]).
pub fn train_sentiment<T: Real>(
    set: &TrainingSet<'_, T>,
    variant: Variant,
    config: &TrainConfig<T>,
    weighting: Option<&Vocabulary>,
) -> Result<TrainedModel<T>, ClassifyError> {
    config.validate()?;
    if let Some(vocab) = weighting {
        if vocab.len() != set.dim() {
            return Err(ClassifyError::DimensionMismatch {
                expected: vocab.len(),
                found: set.dim(),
            });
        }
    }
    let required: &[SentimentLabel] = match variant {
        Variant::NeutralZoneSvm => &[Negative, Positive],
        _ => &SentimentLabel::ALL,
    };
    if let Some(&missing) = required.iter().find(|&&l| !set.has(l)) {
        return Err(ClassifyError::MissingClass(missing));
    }

    let all = || 0..set.labels.len();
    let splits = variant.splits();
    let model = match variant {
        Variant::NeutralZoneSvm => {
            let half_width = match config.neutral_zone {
                NeutralZone::Fixed(h) => h,
                NeutralZone::Tuned => tune_half_width(set, splits[0], weighting, config)?,
            };
            SentimentModel::NeutralZone {
                plane: train_plane(set, all(), splits[0], weighting, config, 0)?,
                half_width,
            }
        }
        Variant::TwoPlaneSvm | Variant::TwoPlaneSvmBin => {
            let lower = train_plane(set, all(), splits[0], weighting, config, 0)?;
            let upper = train_plane(set, all(), splits[1], weighting, config, 1)?;
            if variant == Variant::TwoPlaneSvm {
                SentimentModel::TwoPlane { lower, upper }
            } else {
                let points = set
                    .vectors
                    .iter()
                    .map(|x| Ok([lower.decision(x)?, upper.decision(x)?]))
                    .collect::<Result<Vec<_>, ClassifyError>>()?;
                let grid = BinGrid::fit(&points, set.labels, config.bin_grid);
                SentimentModel::TwoPlaneBin { lower, upper, grid }
            }
        }
        Variant::CascadingSvm => SentimentModel::Cascading {
            subjectivity: train_plane(set, all(), splits[0], weighting, config, 0)?,
            polarity: train_plane(set, all(), splits[1], weighting, config, 1)?,
        },
        Variant::ThreePlaneSvm => {
            let planes = [
                train_plane(set, all(), splits[0], weighting, config, 0)?,
                train_plane(set, all(), splits[1], weighting, config, 1)?,
                train_plane(set, all(), splits[2], weighting, config, 2)?,
            ];
            let mut subspaces = [[0u32; 3]; 8];
            for (x, l) in set.vectors.iter().zip(set.labels) {
                let d = [planes[0].decision(x)?, planes[1].decision(x)?, planes[2].decision(x)?];
                subspaces[subspace_index(d)][l.index()] += 1;
            }
            SentimentModel::ThreePlane { planes, subspaces }
        }
        Variant::NaiveBayes => SentimentModel::NaiveBayes(NaiveBayesModel::train(set.vectors, set.labels)?),
    };
    Ok(TrainedModel {
        model,
        dim: set.dim(),
        vocabulary_hash: weighting.map(Vocabulary::content_hash),
    })
}

/// Picks the neutral-zone half-width on a validation split holding every
/// tenth example of each class. The plane is fitted on the remaining
/// negative/positive examples; candidate widths are 0, the midpoints
/// between consecutive distinct `|decision|` values and one past the
/// largest. The width with the best interval Alpha wins (accuracy breaks
/// ties and stands in when Alpha is undefined), smallest width first.
fn tune_half_width<T: Real>(
    set: &TrainingSet<'_, T>,
    split: BinarySplit,
    weighting: Option<&Vocabulary>,
    config: &TrainConfig<T>,
) -> Result<T, ClassifyError> {
    let mut seen = [0usize; 3];
    let validation: Vec<bool> = set
        .labels
        .iter()
        .map(|l| {
            let k = seen[l.index()];
            seen[l.index()] += 1;
            k % 10 == 0
        })
        .collect();
    let fit_idx: Vec<usize> = (0..set.labels.len()).filter(|&i| !validation[i]).collect();
    let fit_has_both = [Negative, Positive]
        .iter()
        .all(|l| fit_idx.iter().any(|&i| set.labels[i] == *l));
    let (plane, val_idx): (LinearModel<T>, Vec<usize>) = if fit_has_both {
        let plane = train_plane(set, fit_idx.into_iter(), split, weighting, config, 7)?;
        (plane, (0..set.labels.len()).filter(|&i| validation[i]).collect())
    } else {
        let plane = train_plane(set, 0..set.labels.len(), split, weighting, config, 7)?;
        (plane, (0..set.labels.len()).collect())
    };

    let decisions = val_idx
        .iter()
        .map(|&i| plane.decision(&set.vectors[i]))
        .collect::<Result<Vec<T>, _>>()?;
    let mut mags: Vec<T> = decisions.iter().map(|d| d.abs()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).expect("finite decisions"));
    mags.dedup();
    let mut candidates = vec![T::zero()];
    candidates.extend(mags.windows(2).map(|w| (w[0] + w[1]) * T::lit(0.5)));
    if let Some(&last) = mags.last() {
        candidates.push(last + T::one());
    }

    let mut best: Option<(f64, f64, T)> = None;
    for h in candidates {
        let m = CoincidenceMatrix::<f64>::from_label_pairs(
            decisions
                .iter()
                .zip(&val_idx)
                .map(|(&d, &i)| (neutral_zone_rule(d, h), set.labels[i])),
        );
        let alpha = agreement::alpha(&m, Metric::Interval).unwrap_or(f64::NEG_INFINITY);
        let acc = agreement::accuracy(&m).unwrap_or(0.0);
        if best.is_none_or(|(ba, bacc, _)| (alpha, acc) > (ba, bacc)) {
            best = Some((alpha, acc, h));
        }
    }
    Ok(best.map_or(T::zero(), |b| b.2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_dim(points: &[(f64, SentimentLabel)]) -> (Vec<SparseVector<f64>>, Vec<SentimentLabel>) {
        points.iter().map(|&(x, l)| (SparseVector::from_dense(&[x]), l)).unzip()
    }

    fn ordinal_line() -> (Vec<SparseVector<f64>>, Vec<SentimentLabel>) {
        let mut pts = Vec::new();
        for k in 0..8 {
            let t = f64::from(k) * 0.25;
            pts.push((-3.0 - t, Negative));
            pts.push((-0.6 + t * 0.6, Neutral));
            pts.push((3.0 + t, Positive));
        }
        one_dim(&pts)
    }

    fn accuracy_of(model: &SentimentModel<f64>, xs: &[SparseVector<f64>], ys: &[SentimentLabel]) -> f64 {
        let hits = xs.iter().zip(ys).filter(|(x, y)| model.predict(x).unwrap().label == **y).count();
        hits as f64 / ys.len() as f64
    }

    #[test]
    fn two_plane_recovers_ordinal_line() {
        let (xs, ys) = ordinal_line();
        let set = TrainingSet::new(&xs, &ys).unwrap();
        let cfg = TrainConfig { cost: 100.0, max_epochs: 2000, tolerance: 1e-6, ..Default::default() };
        let trained = train_sentiment(&set, Variant::TwoPlaneSvm, &cfg, None).unwrap();
        assert_eq!(accuracy_of(&trained.model, &xs, &ys), 1.0);
        let planes = trained.model.planes();
        // lower boundary between -3 and -0.6, upper between 0.45 and 3
        let root = |p: &LinearModel<f64>| -p.bias / p.weights[0];
        assert!((-3.0..-0.6).contains(&root(planes[0])));
        assert!((0.45..3.0).contains(&root(planes[1])));
    }

    #[test]
    fn two_plane_rule_table() {
        assert_eq!(two_plane_rule(-1.0, -1.0), Negative);
        assert_eq!(two_plane_rule(1.0, 1.0), Positive);
        assert_eq!(two_plane_rule(1.0, -1.0), Neutral);
        assert_eq!(two_plane_rule(-2.0, 1.0), Negative);
        assert_eq!(two_plane_rule(-1.0, 2.0), Positive);
    }

    #[test]
    fn two_plane_sweep_is_monotone() {
        let (xs, ys) = ordinal_line();
        let set = TrainingSet::new(&xs, &ys).unwrap();
        let trained = train_sentiment(&set, Variant::TwoPlaneSvm, &TrainConfig::default(), None).unwrap();
        let labels: Vec<_> = (0..=600)
            .map(|k| {
                let x = -3.0 + f64::from(k) * 0.01;
                trained.model.predict(&SparseVector::from_dense(&[x])).unwrap().label
            })
            .collect();
        assert!(labels.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn bin_cell_majority_confidence() {
        let (xs, ys) = ordinal_line();
        let set = TrainingSet::new(&xs, &ys).unwrap();
        let trained = train_sentiment(&set, Variant::TwoPlaneSvmBin, &TrainConfig::default(), None).unwrap();
        let p = trained.model.predict(&xs[2]).unwrap();
        assert_eq!(p.label, Positive);
        assert_eq!(p.confidence, Some(1.0));
        assert_eq!(accuracy_of(&trained.model, &xs, &ys), 1.0);
    }

    #[test]
    fn bin_grid_overflow_cells() {
        let grid = BinGrid::fit(&[[0.0, 0.0], [1.0, 1.0]], &[Negative, Positive], 10);
        assert_eq!(grid.cell_of([-5.0, -5.0]), 0);
        assert_eq!(grid.cell_of([5.0, 5.0]), 11 * 12 + 11);
        assert_eq!(grid.cell_of([1.0, 1.0]), 10 * 12 + 10);
        assert_eq!(grid.cells[grid.cell_of([0.0, 0.0])], [1, 0, 0]);
    }

    #[test]
    fn empty_bin_falls_back_to_geometry() {
        let lower = LinearModel::new(vec![1.0], 0.0);
        let upper = LinearModel::new(vec![1.0], -1.0);
        let grid = BinGrid { per_axis: 2, low: [0.0, 0.0], high: [1.0, 1.0], cells: vec![[0; 3]; 16] };
        let m = SentimentModel::TwoPlaneBin { lower, upper, grid };
        let p = m.predict(&SparseVector::from_dense(&[-4.0])).unwrap();
        assert_eq!(p, Prediction { label: Negative, confidence: None });
    }

    #[test]
    fn majority_ties() {
        assert_eq!(majority(&[2, 2, 0], Negative), Negative);
        assert_eq!(majority(&[2, 2, 0], Positive), Neutral);
        assert_eq!(majority(&[2, 0, 2], Neutral), Negative);
    }

    #[test]
    fn voting_fallback() {
        assert_eq!(one_vs_one_vote([-1.0, -1.0, -1.0]), Negative);
        assert_eq!(one_vs_one_vote([1.0, -1.0, 0.5]), Neutral);
        // cyclic votes: neg (plane 2), neu (plane 0), pos (plane 1)
        assert_eq!(one_vs_one_vote([0.2, 0.9, -0.3]), Positive);
    }

    #[test]
    fn duplicated_points_are_fit_by_every_variant() {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (k, label) in SentimentLabel::ALL.into_iter().enumerate() {
            let mut dense = [0.0; 3];
            dense[k] = 1.0;
            for _ in 0..12 {
                xs.push(SparseVector::from_dense(&dense));
                ys.push(label);
            }
        }
        let set = TrainingSet::new(&xs, &ys).unwrap();
        for variant in Variant::ALL {
            let trained = train_sentiment(&set, variant, &TrainConfig::default(), None).unwrap();
            assert_eq!(trained.model.planes().len(), [1, 2, 2, 2, 3, 0][variant as usize]);
            assert_eq!(accuracy_of(&trained.model, &xs, &ys), 1.0, "{variant}");
        }
    }

    #[test]
    fn cascading_neutral_iff_objective() {
        let (xs, ys) = ordinal_line();
        let set = TrainingSet::new(&xs, &ys).unwrap();
        let trained = train_sentiment(&set, Variant::CascadingSvm, &TrainConfig::default(), None).unwrap();
        for k in 0..200 {
            let x = SparseVector::from_dense(&[-5.0 + f64::from(k) * 0.05]);
            let subjective = trained.model.planes()[0].decision(&x).unwrap() >= 0.0;
            assert_eq!(trained.model.predict(&x).unwrap().label == Neutral, !subjective);
        }
    }

    #[test]
    fn missing_class_rejected() {
        let (xs, ys) = one_dim(&[(-1.0, Negative), (1.0, Positive)]);
        let set = TrainingSet::new(&xs, &ys).unwrap();
        assert!(matches!(
            train_sentiment(&set, Variant::TwoPlaneSvm, &TrainConfig::default(), None),
            Err(ClassifyError::MissingClass(Neutral))
        ));
        // the neutral-zone plane only needs the polar classes
        assert!(train_sentiment(&set, Variant::NeutralZoneSvm, &TrainConfig::default(), None).is_ok());
    }

    #[test]
    fn fixed_neutral_zone() {
        let (xs, ys) = ordinal_line();
        let set = TrainingSet::new(&xs, &ys).unwrap();
        let cfg = TrainConfig { neutral_zone: NeutralZone::Fixed(0.0), ..Default::default() };
        let trained = train_sentiment(&set, Variant::NeutralZoneSvm, &cfg, None).unwrap();
        assert!(xs.iter().all(|x| trained.model.predict(x).unwrap().label != Neutral));
        let tuned = train_sentiment(&set, Variant::NeutralZoneSvm, &TrainConfig::default(), None).unwrap();
        assert_eq!(accuracy_of(&tuned.model, &xs, &ys), 1.0);
    }

    #[test]
    fn variant_names_roundtrip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("SVM".parse::<Variant>().is_err());
    }

    #[test]
    fn invalid_config() {
        let cfg = TrainConfig { cost: -1.0, ..TrainConfig::<f64>::default() };
        assert!(matches!(cfg.validate(), Err(ClassifyError::InvalidConfig(_))));
    }
}
