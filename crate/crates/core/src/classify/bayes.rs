//! Multinomial Naive Bayes over term counts.

use super::ClassifyError;
use crate::corpus::SentimentLabel;
use crate::features::SparseVector;
use crate::scalar::Real;

/// Add-one smoothed multinomial event model with empirical class priors.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel<T> {
    pub log_prior: [T; 3],
    /// `log_likelihood[c][t] = log P(t | c)`.
    pub log_likelihood: [Vec<T>; 3],
}

impl<T: Real> NaiveBayesModel<T> {
    pub fn train(vectors: &[SparseVector<T>], labels: &[SentimentLabel]) -> Result<Self, ClassifyError> {
        if vectors.len() != labels.len() {
            return Err(ClassifyError::LengthMismatch);
        }
        let dim = vectors.first().ok_or(ClassifyError::EmptyTrainingSet)?.dim();
        let mut doc_counts = [0usize; 3];
        let mut term_counts: [Vec<T>; 3] = std::array::from_fn(|_| vec![T::zero(); dim]);
        for (x, label) in vectors.iter().zip(labels) {
            if x.dim() != dim {
                return Err(ClassifyError::DimensionMismatch {
                    expected: dim,
                    found: x.dim(),
                });
            }
            let c = label.index();
            doc_counts[c] += 1;
            for (t, v) in x.iter() {
                if v < T::zero() {
                    return Err(ClassifyError::NegativeFeature);
                }
                term_counts[c][t] = term_counts[c][t] + v;
            }
        }
        if let Some(c) = (0..3).find(|&c| doc_counts[c] == 0) {
            return Err(ClassifyError::MissingClass(SentimentLabel::from_index(c)));
        }
        let n = T::lit(vectors.len() as f64);
        let log_prior = doc_counts.map(|d| (T::lit(d as f64) / n).ln());
        let vocab = T::lit(dim as f64);
        let log_likelihood = term_counts.map(|counts| {
            let total: T = counts.iter().copied().sum();
            let denom = (total + vocab).ln();
            counts.iter().map(|&c| (c + T::one()).ln() - denom).collect()
        });
        Ok(NaiveBayesModel {
            log_prior,
            log_likelihood,
        })
    }

    pub fn dim(&self) -> usize {
        self.log_likelihood[0].len()
    }

    /// Class posteriors in label order.
    pub fn posterior(&self, x: &SparseVector<T>) -> Result<[T; 3], ClassifyError> {
        if x.dim() != self.dim() {
            return Err(ClassifyError::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        let log_joint: [T; 3] = std::array::from_fn(|c| self.log_prior[c] + x.dot(&self.log_likelihood[c]));
        let max = log_joint.iter().copied().fold(T::neg_infinity(), T::max);
        let unnorm = log_joint.map(|l| (l - max).exp());
        let z: T = unnorm.iter().copied().sum();
        Ok(unnorm.map(|u| u / z))
    }

    pub fn predict(&self, x: &SparseVector<T>) -> Result<(SentimentLabel, T), ClassifyError> {
        let post = self.posterior(x)?;
        let mut best = 0;
        for c in 1..3 {
            if post[c] > post[best] {
                best = c;
            }
        }
        Ok((SentimentLabel::from_index(best), post[best]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use SentimentLabel::*;

    #[test]
    fn toy_corpus_posterior_matches_bayes_rule() {
        let docs = [
            (vec![2.0, 0.0], Negative),
            (vec![1.0, 1.0], Neutral),
            (vec![0.0, 2.0], Positive),
            (vec![0.0, 1.0], Positive),
        ];
        let vectors: Vec<_> = docs.iter().map(|(x, _)| SparseVector::from_dense(x)).collect();
        let labels: Vec<_> = docs.iter().map(|d| d.1).collect();
        let nb = NaiveBayesModel::<f64>::train(&vectors, &labels).unwrap();

        // priors 1/4, 1/4, 2/4; smoothed term probabilities:
        // neg (3/4, 1/4), neu (2/4, 2/4), pos (1/5, 4/5); query counts (1, 1)
        let joint = [0.25 * 0.75 * 0.25, 0.25 * 0.5 * 0.5, 0.5 * 0.2 * 0.8];
        let z: f64 = joint.iter().sum();
        let post = nb.posterior(&SparseVector::from_dense(&[1.0, 1.0])).unwrap();
        for c in 0..3 {
            assert!((post[c] - joint[c] / z).abs() < 1e-12);
        }
        assert!((post.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(nb.predict(&SparseVector::from_dense(&[1.0, 1.0])).unwrap().0, Positive);
    }

    #[test]
    fn missing_class_and_negative_counts() {
        let v = vec![SparseVector::from_dense(&[1.0]), SparseVector::from_dense(&[1.0])];
        assert!(matches!(
            NaiveBayesModel::<f64>::train(&v, &[Negative, Positive]),
            Err(ClassifyError::MissingClass(Neutral))
        ));
        let v = vec![SparseVector::from_dense(&[-1.0])];
        assert!(matches!(NaiveBayesModel::<f64>::train(&v, &[Negative]), Err(ClassifyError::NegativeFeature)));
    }
}
