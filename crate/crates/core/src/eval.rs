//! Blocked stratified cross-validation and learning curves.
//!
//! Folds are stratified by class but never shuffled: each class's
//! time-ordered items are cut into `k` consecutive blocks and fold `i`
//! takes block `i` of every class.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agreement::{AgreementError, CoincidenceMatrix, MeasureKind};
use crate::classify::{train_sentiment, ClassifyError, TrainConfig, TrainedModel, TrainingSet, Variant};
use crate::corpus::{time_ordered_chunks, CorpusError, GoldPost, SentimentLabel};
use crate::features::{build_vocabulary, FeatureError, Featurizer, SparseVector, TermBag, Vocabulary, VocabularyConfig};

/// Two-sided 95% normal quantile used for fold-based intervals.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("need at least 2 folds, got {0}")]
    TooFewFolds(usize),
    #[error("class {label} has {count} items, fewer than the {k} folds")]
    ClassTooSmall { label: SentimentLabel, count: usize, k: usize },
    #[error("predictions and gold labels differ in length ({pred} vs {gold})")]
    LengthMismatch { pred: usize, gold: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<EvalError>,
    },
    #[error(transparent)]
    Agreement(#[from] AgreementError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Index sets of the folds, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    folds: Vec<Vec<usize>>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.folds.len()
    }

    pub fn folds(&self) -> &[Vec<usize>] {
        &self.folds
    }

    /// Every index outside fold `i`, ascending.
    pub fn training_indices(&self, i: usize) -> Vec<usize> {
        let mut train: Vec<usize> = self
            .folds
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        train.sort_unstable();
        train
    }
}

/// Plans `k` blocked stratified folds over time-ordered labels.
///
/// Block sizes within a class differ by at most one, larger blocks first.
/// Classes absent from the corpus are ignored; every present class needs
/// at least `k` items.
pub fn plan_folds(labels: &[SentimentLabel], k: usize) -> Result<FoldPlan, EvalError> {
    if k < 2 {
        return Err(EvalError::TooFewFolds(k));
    }
    if labels.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut folds = vec![Vec::new(); k];
    for class in SentimentLabel::ALL {
        let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < k {
            return Err(EvalError::ClassTooSmall {
                label: class,
                count: members.len(),
                k,
            });
        }
        let (base, extra) = (members.len() / k, members.len() % k);
        let mut start = 0;
        for (i, fold) in folds.iter_mut().enumerate() {
            let size = base + usize::from(i < extra);
            fold.extend_from_slice(&members[start..start + size]);
            start += size;
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(FoldPlan { folds })
}

/// Symmetric coincidence matrix of `(predicted, gold)` pairs.
pub fn score_predictions(pred: &[SentimentLabel], gold: &[SentimentLabel]) -> Result<CoincidenceMatrix<f64>, EvalError> {
    if pred.len() != gold.len() {
        return Err(EvalError::LengthMismatch {
            pred: pred.len(),
            gold: gold.len(),
        });
    }
    if pred.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(CoincidenceMatrix::from_label_pairs(pred.iter().copied().zip(gold.iter().copied())))
}

/// Something that can be trained on some posts and label others.
pub trait FoldLearner: Sync {
    /// Per-corpus preprocessing shared by all folds.
    type Prepared: Sync;

    fn prepare(&self, gold: &[GoldPost]) -> Result<Self::Prepared, EvalError>;

    /// Trains on `train` and predicts `test` (indices into the prepared
    /// corpus). Must not look at the labels of `test`.
    fn fit_predict(&self, data: &Self::Prepared, train: &[usize], test: &[usize]) -> Result<Vec<SentimentLabel>, EvalError>;
}

/// Featurization, vocabulary and classifier trained together.
pub struct SentimentPipeline {
    pub variant: Variant,
    pub train: TrainConfig<f64>,
    pub vocabulary: VocabularyConfig,
    pub featurizer: Featurizer,
}

impl SentimentPipeline {
    pub fn new(variant: Variant) -> Self {
        SentimentPipeline {
            variant,
            train: TrainConfig::default(),
            vocabulary: VocabularyConfig::default(),
            featurizer: Featurizer::default(),
        }
    }
}

/// Term bags and labels of a corpus.
#[derive(Debug, Clone)]
pub struct PreparedCorpus {
    pub bags: Vec<TermBag>,
    pub labels: Vec<SentimentLabel>,
}

/// Vocabulary plus the model trained over it.
#[derive(Debug, Clone)]
pub struct FittedPipeline {
    pub vocabulary: Vocabulary,
    pub model: TrainedModel<f64>,
}

impl FittedPipeline {
    pub fn predict_bag(&self, bag: &TermBag) -> Result<SentimentLabel, EvalError> {
        let x: SparseVector<f64> = self.vocabulary.count_vector(bag);
        Ok(self.model.model.predict(&x)?.label)
    }
}

impl SentimentPipeline {
    /// Fits vocabulary and model on the selected documents only.
    pub fn fit(&self, data: &PreparedCorpus, train: &[usize]) -> Result<FittedPipeline, EvalError> {
        let docs: Vec<(&TermBag, SentimentLabel)> = train.iter().map(|&i| (&data.bags[i], data.labels[i])).collect();
        let vocabulary = build_vocabulary(&docs, &self.vocabulary, &self.variant.splits())?;
        let vectors: Vec<SparseVector<f64>> = docs.iter().map(|(bag, _)| vocabulary.count_vector(bag)).collect();
        let labels: Vec<SentimentLabel> = docs.iter().map(|d| d.1).collect();
        let set = TrainingSet::new(&vectors, &labels)?;
        let model = train_sentiment(&set, self.variant, &self.train, Some(&vocabulary))?;
        Ok(FittedPipeline { vocabulary, model })
    }
}

impl FoldLearner for SentimentPipeline {
    type Prepared = PreparedCorpus;

    fn prepare(&self, gold: &[GoldPost]) -> Result<PreparedCorpus, EvalError> {
        let bags = gold
            .iter()
            .map(|g| {
                g.text
                    .as_deref()
                    .map(|t| self.featurizer.terms(t))
                    .ok_or_else(|| FeatureError::MissingText(g.post_id.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PreparedCorpus {
            bags,
            labels: gold.iter().map(|g| g.label).collect(),
        })
    }

    fn fit_predict(&self, data: &PreparedCorpus, train: &[usize], test: &[usize]) -> Result<Vec<SentimentLabel>, EvalError> {
        let fitted = self.fit(data, train)?;
        test.iter().map(|&i| fitted.predict_bag(&data.bags[i])).collect()
    }
}

/// Fold statistics of one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub measure: MeasureKind,
    pub per_fold: Vec<f64>,
    pub mean: f64,
    /// `1.96 * sd / sqrt(k)` with the sample standard deviation of folds.
    pub half_width: f64,
    /// The measure on the pooled matrix of all folds.
    pub pooled: f64,
}

impl EvalResult {
    fn from_folds(measure: MeasureKind, per_fold: Vec<f64>, pooled: f64) -> Self {
        let k = per_fold.len() as f64;
        let mean = per_fold.iter().sum::<f64>() / k;
        let var = if per_fold.len() > 1 {
            per_fold.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)
        } else {
            0.0
        };
        EvalResult {
            measure,
            mean,
            half_width: Z_95 * var.sqrt() / k.sqrt(),
            per_fold,
            pooled,
        }
    }

    pub fn ci_low(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn ci_high(&self) -> f64 {
        self.mean + self.half_width
    }
}

/// Outcome of one cross-validation run.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub fold_sizes: Vec<usize>,
    pub fold_matrices: Vec<CoincidenceMatrix<f64>>,
    pub pooled: CoincidenceMatrix<f64>,
    pub results: Vec<EvalResult>,
}

impl CrossValidation {
    pub fn result(&self, measure: MeasureKind) -> Option<&EvalResult> {
        self.results.iter().find(|r| r.measure == measure)
    }
}

/// Runs blocked stratified `k`-fold cross-validation on a time-ordered
/// corpus. Folds run in parallel; results are gathered in fold order.
pub fn cross_validate<L: FoldLearner>(
    learner: &L,
    gold: &[GoldPost],
    k: usize,
    measures: &[MeasureKind],
) -> Result<CrossValidation, EvalError> {
    let data = learner.prepare(gold)?;
    cross_validate_prepared(learner, &data, &gold.iter().map(|g| g.label).collect::<Vec<_>>(), k, measures)
}

fn cross_validate_prepared<L: FoldLearner>(
    learner: &L,
    data: &L::Prepared,
    labels: &[SentimentLabel],
    k: usize,
    measures: &[MeasureKind],
) -> Result<CrossValidation, EvalError> {
    let plan = plan_folds(labels, k)?;
    let fold_matrices = (0..plan.k())
        .into_par_iter()
        .map(|i| {
            let test = &plan.folds()[i];
            let pred = learner.fit_predict(data, &plan.training_indices(i), test)?;
            let gold: Vec<SentimentLabel> = test.iter().map(|&j| labels[j]).collect();
            score_predictions(&pred, &gold)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .enumerate()
        .map(|(fold, r)| r.map_err(|e| EvalError::Fold { fold, source: Box::new(e) }))
        .collect::<Result<Vec<_>, _>>()?;

    let pooled = fold_matrices
        .iter()
        .skip(1)
        .fold(fold_matrices[0].clone(), |acc, m| acc.merged(m));
    let results = measures
        .iter()
        .map(|&measure| {
            let per_fold = fold_matrices
                .iter()
                .enumerate()
                .map(|(fold, m)| {
                    measure.evaluate(m).map_err(|e| EvalError::Fold {
                        fold,
                        source: Box::new(e.into()),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(EvalResult::from_folds(measure, per_fold, measure.evaluate(&pooled)?))
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(CrossValidation {
        fold_sizes: plan.folds().iter().map(Vec::len).collect(),
        fold_matrices,
        pooled,
        results,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub prefix_size: usize,
    pub results: Vec<EvalResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve {
    pub points: Vec<CurvePoint>,
    /// Prefixes left out, with the reason.
    pub skipped: Vec<(usize, String)>,
}

impl LearningCurve {
    /// `prefix_size,measure,mean,ci_low,ci_high` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("prefix_size,measure,mean,ci_low,ci_high\n");
        for p in &self.points {
            for r in &p.results {
                writeln!(out, "{},{},{},{},{}", p.prefix_size, r.measure, r.mean, r.ci_low(), r.ci_high()).unwrap();
            }
        }
        out
    }
}

/// Cross-validates every growing prefix (`step`, `2 * step`, ..., full
/// corpus) of a time-ordered corpus. Prefixes too small to fold are
/// skipped and listed.
pub fn learning_curve<L: FoldLearner>(
    learner: &L,
    gold: &[GoldPost],
    step: usize,
    k: usize,
    measures: &[MeasureKind],
) -> Result<LearningCurve, EvalError> {
    let chunks = time_ordered_chunks(gold, step)?;
    let ordered = chunks.corpus();
    let data = learner.prepare(ordered)?;
    let labels: Vec<SentimentLabel> = ordered.iter().map(|g| g.label).collect();
    let classes = SentimentLabel::ALL.iter().filter(|l| labels.contains(l)).count();

    let mut curve = LearningCurve {
        points: Vec::new(),
        skipped: Vec::new(),
    };
    for &prefix in chunks.sizes() {
        if prefix < k * classes {
            curve.skipped.push((prefix, format!("fewer than {} items", k * classes)));
            continue;
        }
        let sub = SubsetLearner { inner: learner, len: prefix };
        match cross_validate_prepared(&sub, &data, &labels[..prefix], k, measures) {
            Ok(cv) => curve.points.push(CurvePoint {
                prefix_size: prefix,
                results: cv.results,
            }),
            Err(e @ EvalError::ClassTooSmall { .. }) => curve.skipped.push((prefix, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    Ok(curve)
}

/// Restricts a learner prepared on the full corpus to a prefix; the fold
/// indices it receives already lie inside the prefix.
struct SubsetLearner<'a, L> {
    inner: &'a L,
    len: usize,
}

impl<L: FoldLearner> FoldLearner for SubsetLearner<'_, L> {
    type Prepared = L::Prepared;

    fn prepare(&self, _: &[GoldPost]) -> Result<L::Prepared, EvalError> {
        unreachable!("subset learners reuse the parent preparation")
    }

    fn fit_predict(&self, data: &L::Prepared, train: &[usize], test: &[usize]) -> Result<Vec<SentimentLabel>, EvalError> {
        debug_assert!(train.iter().chain(test).all(|&i| i < self.len));
        self.inner.fit_predict(data, train, test)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use SentimentLabel::*;

    fn labels(pattern: &[SentimentLabel], n: usize) -> Vec<SentimentLabel> {
        pattern.iter().copied().cycle().take(n).collect()
    }

    #[test]
    fn one_item_per_class_per_fold() {
        let ls = labels(&SentimentLabel::ALL, 30);
        let plan = plan_folds(&ls, 10).unwrap();
        for fold in plan.folds() {
            let mut classes: Vec<_> = fold.iter().map(|&i| ls[i]).collect();
            classes.sort();
            assert_eq!(classes, SentimentLabel::ALL);
        }
    }

    #[test]
    fn blocks_are_consecutive_within_class() {
        let ls = labels(&[Negative, Negative, Neutral, Positive, Neutral], 103);
        let plan = plan_folds(&ls, 10).unwrap();
        for class in SentimentLabel::ALL {
            let positions: Vec<usize> = (0..ls.len()).filter(|&i| ls[i] == class).collect();
            let mut cursor = 0;
            for fold in plan.folds() {
                let mine: Vec<usize> = fold.iter().copied().filter(|&i| ls[i] == class).collect();
                assert_eq!(mine, positions[cursor..cursor + mine.len()]);
                cursor += mine.len();
            }
            assert_eq!(cursor, positions.len());
        }
    }

    #[test]
    fn bad_plans() {
        assert!(matches!(plan_folds(&[Negative; 5], 1), Err(EvalError::TooFewFolds(1))));
        let ls = [vec![Negative; 20], vec![Positive; 3]].concat();
        assert!(matches!(
            plan_folds(&ls, 10),
            Err(EvalError::ClassTooSmall { label: Positive, count: 3, k: 10 })
        ));
    }

    #[test]
    fn scoring() {
        let gold = [Negative, Neutral, Positive, Positive, Negative];
        let m = score_predictions(&gold, &gold).unwrap();
        assert_eq!(MeasureKind::Accuracy.evaluate(&m).unwrap(), 1.0);
        let mixed = [Negative, Positive, Positive, Negative];
        let m = score_predictions(&[Neutral; 4], &mixed).unwrap();
        assert_eq!(MeasureKind::AccWithin1.evaluate(&m).unwrap(), 1.0);
        assert_eq!(MeasureKind::F1Bar.evaluate(&m).unwrap(), 0.0);
        assert!(matches!(score_predictions(&[Neutral], &[]), Err(EvalError::LengthMismatch { .. })));
        assert!(matches!(score_predictions(&[], &[]), Err(EvalError::Empty)));
    }

    #[test]
    fn interval_from_fold_spread() {
        let r = EvalResult::from_folds(MeasureKind::Accuracy, vec![0.5, 0.7, 0.6, 0.6], 0.6);
        assert!((r.mean - 0.6).abs() < 1e-12);
        let sd = (0.02f64 / 3.0).sqrt();
        assert!((r.half_width - 1.96 * sd / 2.0).abs() < 1e-12);
    }
}
