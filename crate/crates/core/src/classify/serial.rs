//! Versioned line-oriented text format for trained models. Fields on a
//! line are tab-separated.
//!
//! ```text
//! senti-model  1
//! variant  TwoPlaneSVM
//! vocabulary  <sha256 hex>|none
//! dim  <D>
//! plane  <name>  <bias>  <nnz>
//! <idx>:<weight> <idx>:<weight> ...
//! ...
//! end
//! ```
//!
//! Variant-specific lines (`zone`, `bins`, `cell`, `subspace`, `nb_prior`,
//! `nb_loglik`) follow the planes. Floats use the shortest round-trip
//! representation, so a written model reads back bit-identical.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::{BinGrid, ClassCounts, ClassifyError, LinearModel, NaiveBayesModel, SentimentModel, TrainedModel, Variant};
use crate::features::Vocabulary;
use crate::scalar::Real;

pub const MODEL_FORMAT: &str = "senti-model";
pub const MODEL_VERSION: u32 = 1;

fn plane_names(variant: Variant) -> &'static [&'static str] {
    match variant {
        Variant::NeutralZoneSvm => &["polarity"],
        Variant::TwoPlaneSvm | Variant::TwoPlaneSvmBin => &["lower", "upper"],
        Variant::CascadingSvm => &["subjectivity", "polarity"],
        Variant::ThreePlaneSvm => &["neg_neu", "neu_pos", "neg_pos"],
        Variant::NaiveBayes => &[],
    }
}

fn num<T: Real>(v: T) -> String {
    format!("{:?}", v.to_f64().unwrap_or(f64::NAN))
}

fn write_counts(out: &mut String, tag: &str, cells: &[ClassCounts]) {
    for (i, c) in cells.iter().enumerate() {
        if c.iter().any(|&v| v > 0) {
            writeln!(out, "{tag}\t{i}\t{}\t{}\t{}", c[0], c[1], c[2]).unwrap();
        }
    }
}

impl<T: Real> TrainedModel<T> {
    pub fn variant(&self) -> Variant {
        self.model.variant()
    }

    /// Fails unless `vocab` is the vocabulary the model was trained with.
    pub fn check_vocabulary(&self, vocab: &Vocabulary) -> Result<(), ClassifyError> {
        let found = vocab.content_hash();
        match &self.vocabulary_hash {
            Some(expected) if *expected != found => Err(ClassifyError::VocabularyMismatch {
                expected: expected.clone(),
                found,
            }),
            None => Err(ClassifyError::VocabularyMismatch {
                expected: "none".into(),
                found,
            }),
            Some(_) if vocab.len() != self.dim => Err(ClassifyError::DimensionMismatch {
                expected: self.dim,
                found: vocab.len(),
            }),
            Some(_) => Ok(()),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let variant = self.variant();
        writeln!(out, "{MODEL_FORMAT}\t{MODEL_VERSION}").unwrap();
        writeln!(out, "variant\t{}", variant.name()).unwrap();
        writeln!(out, "vocabulary\t{}", self.vocabulary_hash.as_deref().unwrap_or("none")).unwrap();
        writeln!(out, "dim\t{}", self.dim).unwrap();
        for (name, plane) in plane_names(variant).iter().zip(self.model.planes()) {
            let nz: Vec<String> = plane
                .weights
                .iter()
                .enumerate()
                .filter(|(_, w)| **w != T::zero())
                .map(|(i, &w)| format!("{i}:{}", num(w)))
                .collect();
            writeln!(out, "plane\t{name}\t{}\t{}", num(plane.bias), nz.len()).unwrap();
            writeln!(out, "{}", nz.join(" ")).unwrap();
        }
        match &self.model {
            SentimentModel::NeutralZone { half_width, .. } => {
                writeln!(out, "zone\t{}", num(*half_width)).unwrap();
            }
            SentimentModel::TwoPlaneBin { grid, .. } => {
                writeln!(
                    out,
                    "bins\t{}\t{}\t{}\t{}\t{}",
                    grid.per_axis,
                    num(grid.low[0]),
                    num(grid.low[1]),
                    num(grid.high[0]),
                    num(grid.high[1])
                )
                .unwrap();
                write_counts(&mut out, "cell", &grid.cells);
            }
            SentimentModel::ThreePlane { subspaces, .. } => write_counts(&mut out, "subspace", subspaces),
            SentimentModel::NaiveBayes(nb) => {
                let p = &nb.log_prior;
                writeln!(out, "nb_prior\t{}\t{}\t{}", num(p[0]), num(p[1]), num(p[2])).unwrap();
                for (c, row) in nb.log_likelihood.iter().enumerate() {
                    writeln!(out, "nb_loglik\t{c}").unwrap();
                    let vals: Vec<String> = row.iter().map(|&v| num(v)).collect();
                    writeln!(out, "{}", vals.join(" ")).unwrap();
                }
            }
            SentimentModel::TwoPlane { .. } | SentimentModel::Cascading { .. } => {}
        }
        out.push_str("end\n");
        out
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), ClassifyError> {
        w.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    /// Reads a model. With `expected_hash`, a model bound to a different
    /// vocabulary is rejected.
    pub fn read_from<R: BufRead>(reader: R, expected_hash: Option<&str>) -> Result<Self, ClassifyError> {
        let mut lines = reader.lines();
        let mut next = || -> Result<String, ClassifyError> {
            lines.next().ok_or_else(|| bad("unexpected end of file"))?.map_err(ClassifyError::from)
        };

        let head = next()?;
        if head != format!("{MODEL_FORMAT}\t{MODEL_VERSION}") {
            return Err(bad("not a senti-model version 1 file"));
        }
        let variant: Variant = field(&next()?, "variant")?.parse()?;
        let hash = field(&next()?, "vocabulary")?;
        let vocabulary_hash = (hash != "none").then_some(hash);
        if let Some(expected) = expected_hash {
            let found = vocabulary_hash.as_deref().unwrap_or("none");
            if found != expected {
                return Err(ClassifyError::VocabularyMismatch {
                    expected: found.to_string(),
                    found: expected.to_string(),
                });
            }
        }
        let dim: usize = parse(&field(&next()?, "dim")?)?;

        let mut planes = Vec::new();
        for name in plane_names(variant) {
            let line = next()?;
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 4 || f[0] != "plane" || f[1] != *name {
                return Err(bad(&format!("expected plane `{name}`")));
            }
            let bias: T = real(f[2])?;
            let nnz: usize = parse(f[3])?;
            let mut weights = vec![T::zero(); dim];
            let body = next()?;
            let entries: Vec<&str> = body.split_whitespace().collect();
            if entries.len() != nnz {
                return Err(bad("plane weight count"));
            }
            for e in entries {
                let (i, v) = e.split_once(':').ok_or_else(|| bad("weight entry"))?;
                let i: usize = parse(i)?;
                *weights.get_mut(i).ok_or_else(|| bad("weight index out of range"))? = real(v)?;
            }
            planes.push(LinearModel::new(weights, bias));
        }
        let mut planes = planes.into_iter();
        let mut plane = || planes.next().expect("plane count fixed by variant");

        let model = match variant {
            Variant::NeutralZoneSvm => {
                let p = plane();
                SentimentModel::NeutralZone {
                    plane: p,
                    half_width: real(&field(&next()?, "zone")?)?,
                }
            }
            Variant::TwoPlaneSvm => SentimentModel::TwoPlane {
                lower: plane(),
                upper: plane(),
            },
            Variant::CascadingSvm => SentimentModel::Cascading {
                subjectivity: plane(),
                polarity: plane(),
            },
            Variant::TwoPlaneSvmBin => {
                let (lower, upper) = (plane(), plane());
                let line = next()?;
                let f: Vec<&str> = line.split('\t').collect();
                if f.len() != 6 || f[0] != "bins" {
                    return Err(bad("expected bins line"));
                }
                let per_axis: usize = parse(f[1])?;
                if per_axis == 0 {
                    return Err(bad("bins per axis"));
                }
                let side = per_axis + 2;
                let mut grid = BinGrid {
                    per_axis,
                    low: [real(f[2])?, real(f[3])?],
                    high: [real(f[4])?, real(f[5])?],
                    cells: vec![[0; 3]; side * side],
                };
                let last = read_counts(&mut next, "cell", &mut grid.cells)?;
                expect_end(&last)?;
                return Ok(TrainedModel {
                    model: SentimentModel::TwoPlaneBin { lower, upper, grid },
                    dim,
                    vocabulary_hash,
                });
            }
            Variant::ThreePlaneSvm => {
                let planes = [plane(), plane(), plane()];
                let mut subspaces = [[0; 3]; 8];
                let last = read_counts(&mut next, "subspace", &mut subspaces)?;
                expect_end(&last)?;
                return Ok(TrainedModel {
                    model: SentimentModel::ThreePlane { planes, subspaces },
                    dim,
                    vocabulary_hash,
                });
            }
            Variant::NaiveBayes => {
                let line = next()?;
                let f: Vec<&str> = line.split('\t').collect();
                if f.len() != 4 || f[0] != "nb_prior" {
                    return Err(bad("expected nb_prior line"));
                }
                let log_prior = [real(f[1])?, real(f[2])?, real(f[3])?];
                let mut log_likelihood: [Vec<T>; 3] = Default::default();
                for (c, row) in log_likelihood.iter_mut().enumerate() {
                    if field(&next()?, "nb_loglik")? != c.to_string() {
                        return Err(bad("nb_loglik class"));
                    }
                    *row = next()?.split_whitespace().map(real).collect::<Result<_, _>>()?;
                    if row.len() != dim {
                        return Err(bad("nb_loglik length"));
                    }
                }
                SentimentModel::NaiveBayes(NaiveBayesModel {
                    log_prior,
                    log_likelihood,
                })
            }
        };
        expect_end(&next()?)?;
        Ok(TrainedModel {
            model,
            dim,
            vocabulary_hash,
        })
    }
}

fn bad(msg: &str) -> ClassifyError {
    ClassifyError::Format(msg.to_string())
}

fn field(line: &str, key: &str) -> Result<String, ClassifyError> {
    match line.split_once('\t') {
        Some((k, v)) if k == key => Ok(v.to_string()),
        _ => Err(bad(&format!("expected `{key}` line"))),
    }
}

fn parse<N: std::str::FromStr>(s: &str) -> Result<N, ClassifyError> {
    s.parse().map_err(|_| bad(&format!("bad number `{s}`")))
}

fn real<T: Real>(s: &str) -> Result<T, ClassifyError> {
    parse::<f64>(s).map(T::lit)
}

fn expect_end(line: &str) -> Result<(), ClassifyError> {
    if line == "end" {
        Ok(())
    } else {
        Err(bad("expected end"))
    }
}

/// Reads `tag` count lines into `cells`; returns the first other line.
fn read_counts(
    next: &mut impl FnMut() -> Result<String, ClassifyError>,
    tag: &str,
    cells: &mut [ClassCounts],
) -> Result<String, ClassifyError> {
    loop {
        let line = next()?;
        let f: Vec<&str> = line.split('\t').collect();
        if f[0] != tag {
            return Ok(line);
        }
        if f.len() != 5 {
            return Err(bad(&format!("malformed {tag} line")));
        }
        let i: usize = parse(f[1])?;
        let slot = cells.get_mut(i).ok_or_else(|| bad(&format!("{tag} index out of range")))?;
        *slot = [parse(f[2])?, parse(f[3])?, parse(f[4])?];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{train_sentiment, TrainConfig, TrainingSet};
    use crate::corpus::SentimentLabel;
    use crate::features::SparseVector;

    fn data() -> (Vec<SparseVector<f64>>, Vec<SentimentLabel>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for k in 0..30 {
            let t = f64::from(k % 10) * 0.1;
            let label = SentimentLabel::from_index(k as usize % 3);
            let center = f64::from(label.code() + 1) * 2.0;
            xs.push(SparseVector::from_dense(&[center + t, 1.0 - t, if k % 4 == 0 { 0.0 } else { t }]));
            ys.push(label);
        }
        (xs, ys)
    }

    #[test]
    fn every_variant_roundtrips() {
        let (xs, ys) = data();
        let set = TrainingSet::new(&xs, &ys).unwrap();
        for variant in Variant::ALL {
            let mut trained = train_sentiment(&set, variant, &TrainConfig::default(), None).unwrap();
            trained.vocabulary_hash = Some("abc".into());
            let text = trained.to_text();
            let back = TrainedModel::<f64>::read_from(text.as_bytes(), Some("abc")).unwrap();
            assert_eq!(back, trained, "{variant}");
            assert_eq!(back.to_text(), text);
        }
    }

    #[test]
    fn hash_mismatch_is_rejected() {
        let (xs, ys) = data();
        let set = TrainingSet::new(&xs, &ys).unwrap();
        let trained = train_sentiment(&set, Variant::TwoPlaneSvm, &TrainConfig::default(), None).unwrap();
        let text = trained.to_text();
        assert!(matches!(
            TrainedModel::<f64>::read_from(text.as_bytes(), Some("deadbeef")),
            Err(ClassifyError::VocabularyMismatch { .. })
        ));
        assert!(TrainedModel::<f64>::read_from(text.as_bytes(), None).is_ok());
    }

    #[test]
    fn truncated_file_is_rejected() {
        let (xs, ys) = data();
        let set = TrainingSet::new(&xs, &ys).unwrap();
        let trained = train_sentiment(&set, Variant::CascadingSvm, &TrainConfig::default(), None).unwrap();
        let text = trained.to_text();
        let cut = &text[..text.len() - 4];
        assert!(matches!(TrainedModel::<f64>::read_from(cut.as_bytes(), None), Err(ClassifyError::Format(_))));
        assert!(TrainedModel::<f64>::read_from("senti-model\t2\n".as_bytes(), None).is_err());
    }
}
