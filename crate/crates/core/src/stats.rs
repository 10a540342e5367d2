//! Friedman rank test over classifier-by-dataset scores and the Nemenyi
//! post-hoc critical distance.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("score table needs at least 2 classifiers and 2 datasets (got {classifiers} x {datasets})")]
    TooSmall { classifiers: usize, datasets: usize },
    #[error("row {row} has {found} scores, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("score at row {row}, column {column} is not a number")]
    NotANumber { row: usize, column: usize },
    #[error("no critical value for k = {0} (table covers 2..=10)")]
    OutOfTable(usize),
    #[error("no critical values at significance level {0} (have 0.05 and 0.10)")]
    UnsupportedLevel(f64),
}

/// Studentized range quantiles divided by sqrt(2), for k = 2..=10
/// classifiers, as tabulated by Demšar (2006, Table 5a).
pub const Q_05: [f64; 9] = [1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164];
pub const Q_10: [f64; 9] = [1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920];

/// `scores[d][c]` is classifier `c` on dataset `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable<T> {
    pub datasets: Vec<String>,
    pub classifiers: Vec<String>,
    pub scores: Vec<Vec<T>>,
}

impl<T: Real> ScoreTable<T> {
    pub fn new(datasets: Vec<String>, classifiers: Vec<String>, scores: Vec<Vec<T>>) -> Result<Self, StatsError> {
        let table = ScoreTable {
            datasets,
            classifiers,
            scores,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn k(&self) -> usize {
        self.classifiers.len()
    }

    pub fn n(&self) -> usize {
        self.scores.len()
    }

    fn validate(&self) -> Result<(), StatsError> {
        let (k, n) = (self.k(), self.n());
        if k < 2 || n < 2 {
            return Err(StatsError::TooSmall {
                classifiers: k,
                datasets: n,
            });
        }
        for (row, r) in self.scores.iter().enumerate() {
            if r.len() != k {
                return Err(StatsError::Ragged {
                    row,
                    expected: k,
                    found: r.len(),
                });
            }
            if let Some(column) = r.iter().position(|v| v.is_nan()) {
                return Err(StatsError::NotANumber { row, column });
            }
        }
        Ok(())
    }
}

/// Ranks of one row, 1 = best, ties sharing their average rank.
pub fn rank_row<T: Real>(row: &[T], higher_is_better: bool) -> Vec<T> {
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| {
        let o = row[a].partial_cmp(&row[b]).expect("scores are not NaN");
        if higher_is_better {
            o.reverse()
        } else {
            o
        }
    });
    let mut ranks = vec![T::zero(); row.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && row[order[end]] == row[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = T::lit((start + 1 + end) as f64 / 2.0);
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FriedmanOptions {
    pub higher_is_better: bool,
    /// Also report the Iman-Davenport F statistic.
    pub iman_davenport: bool,
}

impl Default for FriedmanOptions {
    fn default() -> Self {
        FriedmanOptions {
            higher_is_better: true,
            iman_davenport: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImanDavenport<T> {
    pub statistic: T,
    pub df1: usize,
    pub df2: usize,
    pub p_value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSummary<T> {
    pub classifiers: Vec<String>,
    pub datasets: usize,
    pub average_ranks: Vec<T>,
    /// Friedman chi-square with `k - 1` degrees of freedom.
    pub statistic: T,
    pub p_value: T,
    pub iman_davenport: Option<ImanDavenport<T>>,
    pub critical_distance: Option<T>,
    pub level: Option<f64>,
}

impl<T: Real> RankSummary<T> {
    pub fn k(&self) -> usize {
        self.classifiers.len()
    }

    /// Sets the Nemenyi critical distance for `level`.
    pub fn with_critical_distance(mut self, level: f64) -> Result<Self, StatsError> {
        self.critical_distance = Some(nemenyi_cd(self.k(), self.datasets, level)?);
        self.level = Some(level);
        Ok(self)
    }
}

pub fn friedman<T: Real>(table: &ScoreTable<T>, options: FriedmanOptions) -> Result<RankSummary<T>, StatsError> {
    table.validate()?;
    let (k, n) = (table.k(), table.n());
    let mut sums = vec![T::zero(); k];
    for row in &table.scores {
        for (s, r) in sums.iter_mut().zip(rank_row(row, options.higher_is_better)) {
            *s = *s + r;
        }
    }
    let nf = T::lit(n as f64);
    let kf = T::lit(k as f64);
    let average_ranks: Vec<T> = sums.iter().map(|&s| s / nf).collect();
    let sum_sq: T = average_ranks.iter().map(|&r| r * r).sum();
    let one = T::one();
    let raw = T::lit(12.0) * nf / (kf * (kf + one)) * (sum_sq - kf * (kf + one) * (kf + one) / T::lit(4.0));
    // rounding can leave -1e-15 when all ranks are equal
    let statistic = raw.max(T::zero());
    let chi = ChiSquared::new((k - 1) as f64).expect("k >= 2");
    let p_value = T::lit(chi.sf(statistic.to_f64().unwrap_or(f64::NAN)));

    let iman_davenport = options.iman_davenport.then(|| {
        let (df1, df2) = (k - 1, (k - 1) * (n - 1));
        let denom = nf * (kf - one) - statistic;
        if denom <= T::zero() {
            return ImanDavenport {
                statistic: T::infinity(),
                df1,
                df2,
                p_value: T::zero(),
            };
        }
        let f = (nf - one) * statistic / denom;
        let dist = FisherSnedecor::new(df1 as f64, df2 as f64).expect("positive degrees of freedom");
        ImanDavenport {
            statistic: f,
            df1,
            df2,
            p_value: T::lit(dist.sf(f.to_f64().unwrap_or(f64::NAN))),
        }
    });

    Ok(RankSummary {
        classifiers: table.classifiers.clone(),
        datasets: n,
        average_ranks,
        statistic,
        p_value,
        iman_davenport,
        critical_distance: None,
        level: None,
    })
}

/// Tabulated `q_alpha` for `k` classifiers.
pub fn q_alpha(k: usize, level: f64) -> Result<f64, StatsError> {
    let table = if (level - 0.05).abs() < 1e-9 {
        &Q_05
    } else if (level - 0.10).abs() < 1e-9 {
        &Q_10
    } else {
        return Err(StatsError::UnsupportedLevel(level));
    };
    if !(2..=10).contains(&k) {
        return Err(StatsError::OutOfTable(k));
    }
    Ok(table[k - 2])
}

/// `CD = q_alpha * sqrt(k (k + 1) / (6 N))`.
pub fn nemenyi_cd<T: Real>(k: usize, n: usize, level: f64) -> Result<T, StatsError> {
    if n < 2 {
        return Err(StatsError::TooSmall {
            classifiers: k,
            datasets: n,
        });
    }
    let q = T::lit(q_alpha(k, level)?);
    let (kf, nf) = (T::lit(k as f64), T::lit(n as f64));
    Ok(q * (kf * (kf + T::one()) / (T::lit(6.0) * nf)).sqrt())
}

/// Pairwise Nemenyi decisions: `significant[i][j]` iff
/// `|R_i - R_j| >= CD`, never on the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison<T> {
    pub classifiers: Vec<String>,
    pub critical_distance: T,
    pub rank_difference: Vec<Vec<T>>,
    pub significant: Vec<Vec<bool>>,
}

impl<T: Real> Comparison<T> {
    /// Significant pairs `(i, j)` with `i < j`.
    pub fn significant_pairs(&self) -> Vec<(usize, usize)> {
        let k = self.classifiers.len();
        (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .filter(|&(i, j)| self.significant[i][j])
            .collect()
    }
}

/// `None` until a critical distance has been set on the summary.
pub fn compare<T: Real>(summary: &RankSummary<T>) -> Option<Comparison<T>> {
    let cd = summary.critical_distance?;
    let r = &summary.average_ranks;
    let rank_difference: Vec<Vec<T>> = r.iter().map(|&a| r.iter().map(|&b| (a - b).abs()).collect()).collect();
    let significant = rank_difference
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, &d)| i != j && d >= cd).collect())
        .collect();
    Some(Comparison {
        classifiers: summary.classifiers.clone(),
        critical_distance: cd,
        rank_difference,
        significant,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedClassifier<T> {
    pub name: String,
    pub rank: T,
}

/// Average-rank diagram: classifiers by rank, the critical distance, and
/// maximal runs of classifiers whose ranks lie within less than CD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDiagram<T> {
    pub ranked: Vec<RankedClassifier<T>>,
    pub critical_distance: T,
    pub level: f64,
    pub groups: Vec<Vec<String>>,
}

pub fn rank_diagram<T: Real>(summary: &RankSummary<T>) -> Option<RankDiagram<T>> {
    let cd = summary.critical_distance?;
    let mut ranked: Vec<RankedClassifier<T>> = summary
        .classifiers
        .iter()
        .zip(&summary.average_ranks)
        .map(|(name, &rank)| RankedClassifier { name: name.clone(), rank })
        .collect();
    ranked.sort_by(|a, b| a.rank.partial_cmp(&b.rank).expect("finite ranks").then(a.name.cmp(&b.name)));

    let mut spans: Vec<(usize, usize)> = Vec::new();
    for i in 0..ranked.len() {
        let mut j = i;
        while j + 1 < ranked.len() && ranked[j + 1].rank - ranked[i].rank < cd {
            j += 1;
        }
        if j > i && spans.last().is_none_or(|&(_, end)| j > end) {
            spans.push((i, j));
        }
    }
    let groups = spans
        .into_iter()
        .map(|(i, j)| ranked[i..=j].iter().map(|c| c.name.clone()).collect())
        .collect();
    Some(RankDiagram {
        ranked,
        critical_distance: cd,
        level: summary.level.unwrap_or(f64::NAN),
        groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn names(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn table(scores: Vec<Vec<f64>>) -> ScoreTable<f64> {
        let (n, k) = (scores.len(), scores[0].len());
        ScoreTable::new(names("d", n), names("c", k), scores).unwrap()
    }

    #[test]
    fn critical_distance_six_by_thirteen() {
        let cd: f64 = nemenyi_cd(6, 13, 0.05).unwrap();
        assert_abs_diff_eq!(cd, 2.0913, epsilon = 1e-4);
    }

    #[test]
    fn two_classifier_cd_and_scaling() {
        let cd: f64 = nemenyi_cd(2, 9, 0.05).unwrap();
        assert_abs_diff_eq!(cd, 1.960 / 3.0, epsilon = 1e-12);
        let wide: f64 = nemenyi_cd(5, 7, 0.10).unwrap();
        let narrow: f64 = nemenyi_cd(5, 28, 0.10).unwrap();
        assert_abs_diff_eq!(narrow, wide / 2.0, epsilon = 1e-12);
        assert!(matches!(nemenyi_cd::<f64>(11, 5, 0.05), Err(StatsError::OutOfTable(11))));
        assert!(matches!(nemenyi_cd::<f64>(5, 5, 0.01), Err(StatsError::UnsupportedLevel(_))));
    }

    #[test]
    fn identical_classifiers() {
        let s = friedman(&table(vec![vec![0.5; 4]; 6]), FriedmanOptions::default()).unwrap();
        assert!(s.average_ranks.iter().all(|&r| r == 2.5));
        assert_eq!(s.statistic, 0.0);
        assert_abs_diff_eq!(s.p_value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dominant_classifier_statistic_is_n() {
        let rows: Vec<Vec<f64>> = (0..7).map(|d| vec![0.9 - d as f64 * 0.01, 0.1]).collect();
        let s = friedman(&table(rows), FriedmanOptions::default()).unwrap();
        assert_eq!(s.average_ranks, vec![1.0, 2.0]);
        assert_abs_diff_eq!(s.statistic, 7.0, epsilon = 1e-12);
        let lower = friedman(&table(vec![vec![0.9, 0.1]; 7]), FriedmanOptions { higher_is_better: false, ..Default::default() }).unwrap();
        assert_eq!(lower.average_ranks, vec![2.0, 1.0]);
    }

    #[test]
    fn hand_ranked_three_by_three() {
        // ranks: (1, 2, 3), (2.5, 1, 2.5), (1.5, 1.5, 3)
        let t = table(vec![vec![0.9, 0.5, 0.1], vec![0.2, 0.8, 0.2], vec![0.7, 0.7, 0.3]]);
        let s = friedman(&t, FriedmanOptions::default()).unwrap();
        let expected = [5.0 / 3.0, 4.5 / 3.0, 8.5 / 3.0];
        for (r, e) in s.average_ranks.iter().zip(expected) {
            assert_abs_diff_eq!(*r, e, epsilon = 1e-12);
        }
        let sum_sq: f64 = expected.iter().map(|r| r * r).sum();
        assert_abs_diff_eq!(s.statistic, 12.0 * 3.0 / 12.0 * (sum_sq - 12.0), epsilon = 1e-12);
    }

    #[test]
    fn iman_davenport_formula() {
        let t = table(vec![vec![0.9, 0.5, 0.1], vec![0.2, 0.8, 0.3], vec![0.7, 0.6, 0.3], vec![0.6, 0.5, 0.4]]);
        let s = friedman(&t, FriedmanOptions { iman_davenport: true, ..Default::default() }).unwrap();
        let id = s.iman_davenport.unwrap();
        let chi = s.statistic;
        assert_abs_diff_eq!(id.statistic, 3.0 * chi / (4.0 * 2.0 - chi), epsilon = 1e-12);
        assert_eq!((id.df1, id.df2), (2, 6));
        assert!((0.0..=1.0).contains(&id.p_value));
    }

    #[test]
    fn compare_pairs_and_groups() {
        let summary = RankSummary {
            classifiers: names("c", 3),
            datasets: 13,
            average_ranks: vec![1.0, 3.2, 3.5],
            statistic: 0.0,
            p_value: 1.0,
            iman_davenport: None,
            critical_distance: Some(2.09),
            level: Some(0.05),
        };
        let c = compare(&summary).unwrap();
        assert!(c.significant[0][2] && c.significant[2][0]);
        assert!(!c.significant[1][2]);
        assert!((0..3).all(|i| !c.significant[i][i]));
        assert_eq!(c.significant_pairs(), vec![(0, 1), (0, 2)]);
        let d = rank_diagram(&summary).unwrap();
        assert_eq!(d.groups, vec![vec!["c1".to_string(), "c2".to_string()]]);
    }

    #[test]
    fn exact_boundary_with_representable_values() {
        let summary = RankSummary {
            classifiers: names("c", 2),
            datasets: 4,
            average_ranks: vec![1.0, 1.5],
            statistic: 0.0,
            p_value: 1.0,
            iman_davenport: None,
            critical_distance: Some(0.5),
            level: None,
        };
        assert!(compare(&summary).unwrap().significant[0][1]);
    }

    #[test]
    fn table_validation() {
        assert!(matches!(
            ScoreTable::new(names("d", 1), names("c", 3), vec![vec![0.1, 0.2, 0.3]]),
            Err(StatsError::TooSmall { .. })
        ));
        assert!(matches!(
            ScoreTable::new(names("d", 2), names("c", 2), vec![vec![0.1, 0.2], vec![0.3]]),
            Err(StatsError::Ragged { row: 1, .. })
        ));
        assert!(matches!(
            ScoreTable::new(names("d", 2), names("c", 2), vec![vec![0.1, f64::NAN], vec![0.3, 0.1]]),
            Err(StatsError::NotANumber { row: 0, column: 1 })
        ));
    }
}
