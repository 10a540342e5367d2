//! Annotator agreement, sentiment classification and evaluation for
//! three-class (negative, neutral, positive) labelled posts.
//!
//! Numeric code is generic over the scalar type; the aliases below fix it
//! to `f64`, or to exact rationals for coincidence matrices.

pub mod agreement;
pub mod classify;
pub mod corpus;
pub mod eval;
pub mod features;
pub mod scalar;
pub mod stats;

use num_rational::BigRational;

pub use agreement::{AgreementError, CoincidenceMatrix, MeasureKind, Metric};
pub use classify::{ClassifyError, Variant};
pub use corpus::{GoldPost, LabelPair, SentimentLabel};
pub use scalar::{Real, Scalar};

pub type CoincidenceMatrix64 = agreement::CoincidenceMatrix<f64>;
pub type ExactCoincidenceMatrix = agreement::CoincidenceMatrix<BigRational>;
pub type OrderingDiagnostics64 = agreement::OrderingDiagnostics<f64>;
pub type SparseVector64 = features::SparseVector<f64>;
pub type LinearModel64 = classify::LinearModel<f64>;
pub type TrainConfig64 = classify::TrainConfig<f64>;
pub type SentimentModel64 = classify::SentimentModel<f64>;
pub type TrainedModel64 = classify::TrainedModel<f64>;
pub type ScoreTable64 = stats::ScoreTable<f64>;
pub type RankSummary64 = stats::RankSummary<f64>;

pub type LinearModel32 = classify::LinearModel<f32>;
pub type SparseVector32 = features::SparseVector<f32>;
