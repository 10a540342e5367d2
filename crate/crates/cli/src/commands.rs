use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::Serialize;
use senti_core::agreement::{
    self, average_diagnostics, bootstrap_ci, BootstrapConfig, ConfidenceInterval, MeasureKind, OrderingDiagnostics,
};
use senti_core::classify::{NeutralZone, TrainConfig, TrainedModel, Variant};
use senti_core::corpus::{
    extract_pairs, label_counts, load_annotations, merge_gold, write_gold, AnnotationRecord, ColumnMapping, GoldPost,
    PairKind, SentimentLabel,
};
use senti_core::eval::{cross_validate, learning_curve, EvalResult, FoldLearner, SentimentPipeline};
use senti_core::features::{Featurizer, Vocabulary, VocabularyConfig};
use senti_core::stats::{compare as nemenyi_compare, friedman, rank_diagram, FriedmanOptions, RankDiagram, RankSummary, ScoreTable};

use crate::error::CliError;
use crate::report::{csv, dataset_name, emit, json, notice, num, opt_num, resolve_input};
use crate::{Common, Format, ModelArgs};

fn load_records(paths: &[PathBuf]) -> Result<Vec<AnnotationRecord>, CliError> {
    let mut all: Vec<AnnotationRecord> = Vec::new();
    for path in paths {
        let offset = all.len();
        let mut records = load_annotations(resolve_input(path), &ColumnMapping::default())?;
        for r in &mut records {
            r.seq += offset;
        }
        all.extend(records);
    }
    Ok(all)
}

fn parse_measures(names: &[String]) -> Result<Vec<MeasureKind>, CliError> {
    if names.is_empty() {
        return Ok(MeasureKind::ALL.to_vec());
    }
    names
        .iter()
        .map(|n| n.parse().map_err(|e: agreement::AgreementError| CliError::usage(e.to_string())))
        .collect()
}

fn parse_variant(name: &str) -> Result<Variant, CliError> {
    name.parse().map_err(|e: senti_core::ClassifyError| CliError::usage(e.to_string()))
}

fn pipeline(model: &ModelArgs, seed: u64, variant: Variant) -> SentimentPipeline {
    SentimentPipeline {
        variant,
        train: TrainConfig {
            cost: model.cost,
            max_epochs: model.max_epochs,
            seed,
            bin_grid: model.bins,
            neutral_zone: NeutralZone::Tuned,
            ..TrainConfig::default()
        },
        vocabulary: VocabularyConfig {
            min_df: model.min_df,
            ..VocabularyConfig::default()
        },
        featurizer: Featurizer::default(),
    }
}

#[derive(Serialize)]
struct MeasureRow {
    measure: MeasureKind,
    value: Option<f64>,
    ci: Option<ConfidenceInterval>,
    undefined: Option<String>,
}

#[derive(Serialize)]
struct KindRow {
    kind: PairKind,
    pairs: usize,
    absent: bool,
    measures: Vec<MeasureRow>,
}

#[derive(Serialize)]
struct AgreementRow {
    dataset: String,
    annotations: usize,
    posts: usize,
    kinds: Vec<KindRow>,
}

pub fn agreement(common: &Common, measure_names: &[String], samples: usize) -> Result<(), CliError> {
    let measures = parse_measures(measure_names)?;
    let boot = BootstrapConfig {
        samples,
        seed: common.seed,
        ..BootstrapConfig::default()
    };
    let mut rows = Vec::new();
    for path in &common.inputs {
        let records = load_records(std::slice::from_ref(path))?;
        let pairs = extract_pairs(&records);
        let mut kinds = Vec::new();
        for kind in [PairKind::SelfAgreement, PairKind::Inter] {
            let of_kind: Vec<_> = pairs.iter().filter(|p| p.kind == kind).cloned().collect();
            if of_kind.is_empty() {
                kinds.push(KindRow {
                    kind,
                    pairs: 0,
                    absent: true,
                    measures: Vec::new(),
                });
                continue;
            }
            let m = agreement::build_coincidence::<f64>(&of_kind)?;
            let mut out = Vec::new();
            for &measure in &measures {
                let row = match measure.evaluate(&m) {
                    Ok(value) => {
                        let ci = match measure {
                            MeasureKind::AlphaInterval | MeasureKind::AlphaNominal => bootstrap_ci(&of_kind, measure, &boot).ok(),
                            _ => None,
                        };
                        MeasureRow {
                            measure,
                            value: Some(value),
                            ci,
                            undefined: None,
                        }
                    }
                    Err(e) => MeasureRow {
                        measure,
                        value: None,
                        ci: None,
                        undefined: Some(e.to_string()),
                    },
                };
                out.push(row);
            }
            kinds.push(KindRow {
                kind,
                pairs: of_kind.len(),
                absent: false,
                measures: out,
            });
        }
        rows.push(AgreementRow {
            dataset: dataset_name(path),
            annotations: records.len(),
            posts: merge_gold(&records).len(),
            kinds,
        });
    }

    let text = match common.format {
        Format::Json => json(&rows)?,
        Format::Csv => {
            let mut table = Vec::new();
            for r in &rows {
                for k in &r.kinds {
                    if k.absent {
                        table.push(vec![r.dataset.clone(), k.kind.as_str().into(), "0".into(), String::new(), "absent".into(), String::new(), String::new()]);
                    }
                    for m in &k.measures {
                        table.push(vec![
                            r.dataset.clone(),
                            k.kind.as_str().into(),
                            k.pairs.to_string(),
                            m.measure.as_str().into(),
                            m.value.map(num).unwrap_or_else(|| "undefined".into()),
                            opt_num(m.ci.as_ref().map(|c| c.low)),
                            opt_num(m.ci.as_ref().map(|c| c.high)),
                        ]);
                    }
                }
            }
            csv(&["dataset", "kind", "pairs", "measure", "value", "ci_low", "ci_high"], &table)?
        }
    };
    emit(common.out.as_deref(), &text)
}

#[derive(Serialize)]
struct OrderingRow {
    dataset: String,
    pairs: usize,
    diagnostics: Option<OrderingDiagnostics<f64>>,
    undefined: Option<String>,
}

#[derive(Serialize)]
struct OrderingReport {
    datasets: Vec<OrderingRow>,
    excluded: Vec<String>,
    average: Option<OrderingDiagnostics<f64>>,
}

pub fn ordering(common: &Common, exclude: &[String]) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for path in &common.inputs {
        let pairs = extract_pairs(&load_records(std::slice::from_ref(path))?);
        let result = agreement::ordering_diagnostics::<f64>(&pairs);
        rows.push(OrderingRow {
            dataset: dataset_name(path),
            pairs: pairs.len(),
            undefined: result.as_ref().err().map(ToString::to_string),
            diagnostics: result.ok(),
        });
    }
    let average = average_diagnostics(
        rows.iter().filter_map(|r| r.diagnostics.as_ref().map(|d| (r.dataset.as_str(), d))),
        exclude,
    );
    if average.is_none() {
        notice("no dataset left for the average row");
    }
    let report = OrderingReport {
        datasets: rows,
        excluded: exclude.to_vec(),
        average,
    };
    let text = match common.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let line = |name: &str, pairs: String, d: Option<&OrderingDiagnostics<f64>>| {
                vec![
                    name.to_string(),
                    pairs,
                    opt_num(d.map(|d| d.relative_gain)),
                    opt_num(d.map(|d| d.dist_neg_neutral)),
                    opt_num(d.map(|d| d.dist_pos_neutral)),
                ]
            };
            let mut table: Vec<Vec<String>> = report
                .datasets
                .iter()
                .map(|r| line(&r.dataset, r.pairs.to_string(), r.diagnostics.as_ref()))
                .collect();
            if let Some(avg) = &report.average {
                table.push(line("Average", String::new(), Some(avg)));
            }
            csv(&["dataset", "pairs", "relative_gain", "dist_neg_neutral", "dist_pos_neutral"], &table)?
        }
    };
    emit(common.out.as_deref(), &text)
}

pub fn merge(common: &Common) -> Result<(), CliError> {
    let gold = merge_gold(&load_records(&common.inputs)?);
    let mut buf = Vec::new();
    write_gold(&mut buf, &gold, b'\t')?;
    emit(common.out.as_deref(), &String::from_utf8(buf).expect("utf-8 gold output"))
}

fn load_gold(paths: &[PathBuf]) -> Result<Vec<GoldPost>, CliError> {
    let gold = merge_gold(&load_records(paths)?);
    if gold.is_empty() {
        return Err(CliError::new("INPUT", "no posts in input"));
    }
    Ok(gold)
}

#[derive(Serialize)]
struct TrainReport {
    variant: Variant,
    documents: usize,
    class_counts: [usize; 3],
    vocabulary_terms: usize,
    vocabulary_hash: String,
    model: String,
    vocabulary: String,
}

fn vocab_path(model: &Path) -> PathBuf {
    let mut s = model.as_os_str().to_owned();
    s.push(".vocab");
    PathBuf::from(s)
}

pub fn train(common: &Common, model: &ModelArgs) -> Result<(), CliError> {
    let out = common
        .out
        .as_deref()
        .ok_or_else(|| CliError::usage("train needs --out for the model file"))?;
    let variant = parse_variant(&model.variant)?;
    let gold = load_gold(&common.inputs)?;
    let p = pipeline(model, common.seed, variant);
    let data = p.prepare(&gold)?;
    let all: Vec<usize> = (0..gold.len()).collect();
    let fitted = p.fit(&data, &all)?;

    let vocab_file = vocab_path(out);
    fitted.model.write_to(File::create(out).map_err(|e| CliError::new("IO", format!("cannot write {}: {e}", out.display())))?)?;
    fitted
        .vocabulary
        .write_to(File::create(&vocab_file).map_err(|e| CliError::new("IO", format!("cannot write {}: {e}", vocab_file.display())))?)?;

    let report = TrainReport {
        variant,
        documents: gold.len(),
        class_counts: label_counts(gold.iter().map(|g| &g.label)),
        vocabulary_terms: fitted.vocabulary.len(),
        vocabulary_hash: fitted.vocabulary.content_hash(),
        model: out.display().to_string(),
        vocabulary: vocab_file.display().to_string(),
    };
    let text = match common.format {
        Format::Json => json(&report)?,
        Format::Csv => csv(
            &["variant", "documents", "vocabulary_terms", "vocabulary_hash"],
            &[vec![
                variant.name().into(),
                report.documents.to_string(),
                report.vocabulary_terms.to_string(),
                report.vocabulary_hash.clone(),
            ]],
        )?,
    };
    // the model lives in --out, so the summary goes to stdout
    emit(None, &text)
}

/// `(post id, text)` rows of a delimited file with an id and a text column.
fn read_texts(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let content = std::fs::read_to_string(path).map_err(|e| CliError::new("IO", format!("cannot read {}: {e}", path.display())))?;
    let delimiter = if content.lines().next().unwrap_or("").contains('\t') { b'\t' } else { b',' };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .from_reader(content.as_bytes());
    let bad = |e: ::csv::Error| CliError::new("INPUT", e.to_string());
    let headers = reader.headers().map_err(bad)?.clone();
    let find = |names: &[&str]| names.iter().find_map(|n| headers.iter().position(|h| h.trim().eq_ignore_ascii_case(n)));
    let id = find(&["TweetID", "ID"]).ok_or_else(|| CliError::new("INPUT", "missing required column `post id`"))?;
    let text = find(&["Text"]).ok_or_else(|| CliError::new("MISSING_TEXT", "missing `Text` column"))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(bad)?;
        let t = rec.get(text).unwrap_or("");
        if t.trim().is_empty() {
            return Err(CliError::new("MISSING_TEXT", format!("line {}: empty text", i + 2)));
        }
        rows.push((rec.get(id).unwrap_or("").to_string(), t.to_string()));
    }
    Ok(rows)
}

#[derive(Serialize)]
struct PredictionRow {
    post_id: String,
    label: SentimentLabel,
    confidence: Option<f64>,
}

pub fn predict(common: &Common, model_path: &Path, vocab: Option<&Path>) -> Result<(), CliError> {
    let model_path = resolve_input(model_path);
    let vocab_file = vocab.map(resolve_input).unwrap_or_else(|| vocab_path(&model_path));
    let open = |p: &Path| File::open(p).map_err(|e| CliError::new("IO", format!("cannot read {}: {e}", p.display())));
    let vocabulary = Vocabulary::read_from(BufReader::new(open(&vocab_file)?))?;
    let model = TrainedModel::<f64>::read_from(BufReader::new(open(&model_path)?), Some(&vocabulary.content_hash()))?;
    model.check_vocabulary(&vocabulary)?;
    let featurizer = Featurizer::default();

    let mut rows = Vec::new();
    for path in &common.inputs {
        for (post_id, text) in read_texts(&resolve_input(path))? {
            let x = vocabulary.count_vector::<f64>(&featurizer.terms(&text));
            let p = model.model.predict(&x)?;
            rows.push(PredictionRow {
                post_id,
                label: p.label,
                confidence: p.confidence,
            });
        }
    }
    let text = match common.format {
        Format::Json => json(&rows)?,
        Format::Csv => csv(
            &["post_id", "label", "confidence"],
            &rows
                .iter()
                .map(|r| vec![r.post_id.clone(), r.label.code().to_string(), opt_num(r.confidence)])
                .collect::<Vec<_>>(),
        )?,
    };
    emit(common.out.as_deref(), &text)
}

#[derive(Serialize)]
struct ResultRow<'a> {
    #[serde(flatten)]
    result: &'a EvalResult,
    ci_low: f64,
    ci_high: f64,
}

impl<'a> From<&'a EvalResult> for ResultRow<'a> {
    fn from(result: &'a EvalResult) -> Self {
        ResultRow {
            result,
            ci_low: result.ci_low(),
            ci_high: result.ci_high(),
        }
    }
}

#[derive(Serialize)]
struct CrossvalRow<'a> {
    dataset: String,
    variant: Variant,
    k: usize,
    documents: usize,
    fold_sizes: Vec<usize>,
    results: Vec<ResultRow<'a>>,
    /// Pooled prediction-vs-gold coincidence counts, rows and columns in
    /// label order negative, neutral, positive.
    pooled_matrix: [[f64; 3]; 3],
}

pub fn crossval(common: &Common, model: &ModelArgs, k: usize, measure_names: &[String]) -> Result<(), CliError> {
    let variant = parse_variant(&model.variant)?;
    let measures = parse_measures(measure_names)?;
    let p = pipeline(model, common.seed, variant);
    let mut runs = Vec::new();
    for path in &common.inputs {
        let gold = load_gold(std::slice::from_ref(path))?;
        let cv = cross_validate(&p, &gold, k, &measures)?;
        runs.push((dataset_name(path), gold.len(), cv));
    }
    let rows: Vec<CrossvalRow<'_>> = runs
        .iter()
        .map(|(dataset, documents, cv)| CrossvalRow {
            dataset: dataset.clone(),
            variant,
            k,
            documents: *documents,
            fold_sizes: cv.fold_sizes.clone(),
            results: cv.results.iter().map(ResultRow::from).collect(),
            pooled_matrix: *cv.pooled.counts(),
        })
        .collect();
    let text = match common.format {
        Format::Json => json(&rows)?,
        Format::Csv => {
            let mut table = Vec::new();
            for r in &rows {
                for res in &r.results {
                    table.push(vec![
                        r.dataset.clone(),
                        variant.name().into(),
                        res.result.measure.as_str().into(),
                        num(res.result.mean),
                        num(res.ci_low),
                        num(res.ci_high),
                        num(res.result.pooled),
                    ]);
                }
            }
            csv(&["dataset", "variant", "measure", "mean", "ci_low", "ci_high", "pooled"], &table)?
        }
    };
    emit(common.out.as_deref(), &text)
}

#[derive(Serialize)]
struct CurvePointRow<'a> {
    prefix_size: usize,
    results: Vec<ResultRow<'a>>,
}

#[derive(Serialize)]
struct SkippedRow {
    prefix_size: usize,
    reason: String,
}

#[derive(Serialize)]
struct CurveReport<'a> {
    dataset: String,
    variant: Variant,
    k: usize,
    step: usize,
    points: Vec<CurvePointRow<'a>>,
    skipped: Vec<SkippedRow>,
}

pub fn curve(common: &Common, model: &ModelArgs, k: usize, step: usize, measure_names: &[String]) -> Result<(), CliError> {
    if common.inputs.len() != 1 {
        return Err(CliError::usage("curve takes exactly one --input"));
    }
    let variant = parse_variant(&model.variant)?;
    let measures = parse_measures(measure_names)?;
    let gold = load_gold(&common.inputs)?;
    let lc = learning_curve(&pipeline(model, common.seed, variant), &gold, step, k, &measures)?;
    for (prefix, reason) in &lc.skipped {
        notice(&format!("prefix {prefix} skipped: {reason}"));
    }
    let text = match common.format {
        Format::Csv => lc.to_csv(),
        Format::Json => json(&CurveReport {
            dataset: dataset_name(&common.inputs[0]),
            variant,
            k,
            step,
            points: lc
                .points
                .iter()
                .map(|p| CurvePointRow {
                    prefix_size: p.prefix_size,
                    results: p.results.iter().map(ResultRow::from).collect(),
                })
                .collect(),
            skipped: lc
                .skipped
                .iter()
                .map(|(n, r)| SkippedRow {
                    prefix_size: *n,
                    reason: r.clone(),
                })
                .collect(),
        })?,
    };
    emit(common.out.as_deref(), &text)
}

pub struct CompareArgs {
    pub k: usize,
    pub measure: String,
    pub level: f64,
    pub iman_davenport: bool,
    pub scores: bool,
}

#[derive(Serialize)]
struct PairRow {
    first: String,
    second: String,
    rank_difference: f64,
}

#[derive(Serialize)]
struct CompareReport {
    measure: Option<MeasureKind>,
    table: ScoreTable<f64>,
    summary: RankSummary<f64>,
    significant_pairs: Vec<PairRow>,
    diagram: RankDiagram<f64>,
}

/// Wide score tables: a dataset column then one column per classifier.
fn read_score_tables(paths: &[PathBuf]) -> Result<ScoreTable<f64>, CliError> {
    let mut classifiers: Option<Vec<String>> = None;
    let mut datasets = Vec::new();
    let mut scores = Vec::new();
    for path in paths {
        let path = resolve_input(path);
        let content = std::fs::read_to_string(&path).map_err(|e| CliError::new("IO", format!("cannot read {}: {e}", path.display())))?;
        let delimiter = if content.lines().next().unwrap_or("").contains('\t') { b'\t' } else { b',' };
        let mut reader = csv::ReaderBuilder::new().delimiter(delimiter).from_reader(content.as_bytes());
        let bad = |e: ::csv::Error| CliError::new("INPUT", e.to_string());
        let header: Vec<String> = reader.headers().map_err(bad)?.iter().skip(1).map(str::to_string).collect();
        match &classifiers {
            Some(c) if *c != header => return Err(CliError::new("INPUT", "score tables list different classifiers")),
            _ => classifiers = Some(header),
        }
        for rec in reader.records() {
            let rec = rec.map_err(bad)?;
            datasets.push(rec.get(0).unwrap_or("").to_string());
            scores.push(
                rec.iter()
                    .skip(1)
                    .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::new("INPUT", format!("bad score `{v}`"))))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
    }
    Ok(ScoreTable::new(datasets, classifiers.unwrap_or_default(), scores)?)
}

pub fn compare(common: &Common, model: &ModelArgs, args: &CompareArgs) -> Result<(), CliError> {
    let (table, measure) = if args.scores {
        (read_score_tables(&common.inputs)?, None)
    } else {
        let measure: MeasureKind = parse_measures(std::slice::from_ref(&args.measure))?[0];
        let mut datasets = Vec::new();
        let mut scores = Vec::new();
        for path in &common.inputs {
            let gold = load_gold(std::slice::from_ref(path))?;
            let mut row = Vec::new();
            for variant in Variant::ALL {
                let cv = cross_validate(&pipeline(model, common.seed, variant), &gold, args.k, &[measure])
                    .map_err(|e| CliError::from(e).with_context(&format!("{} / {variant}", dataset_name(path))))?;
                row.push(cv.results[0].mean);
            }
            datasets.push(dataset_name(path));
            scores.push(row);
        }
        let classifiers = Variant::ALL.iter().map(|v| v.name().to_string()).collect();
        (ScoreTable::new(datasets, classifiers, scores)?, Some(measure))
    };
    let options = FriedmanOptions {
        higher_is_better: true,
        iman_davenport: args.iman_davenport,
    };
    let summary = friedman(&table, options)?.with_critical_distance(args.level)?;
    let comparison = nemenyi_compare(&summary).expect("critical distance set");
    let significant_pairs = comparison
        .significant_pairs()
        .into_iter()
        .map(|(i, j)| PairRow {
            first: comparison.classifiers[i].clone(),
            second: comparison.classifiers[j].clone(),
            rank_difference: comparison.rank_difference[i][j],
        })
        .collect();
    let diagram = rank_diagram(&summary).expect("critical distance set");
    let report = CompareReport {
        measure,
        table,
        summary,
        significant_pairs,
        diagram,
    };
    let text = match common.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let s = &report.summary;
            let cd = s.critical_distance.unwrap_or(f64::NAN);
            let rows: Vec<Vec<String>> = s
                .classifiers
                .iter()
                .zip(&s.average_ranks)
                .map(|(c, r)| vec![c.clone(), num(*r), num(cd), num(s.statistic), num(s.p_value)])
                .collect();
            csv(&["classifier", "average_rank", "critical_distance", "statistic", "p_value"], &rows)?
        }
    };
    emit(common.out.as_deref(), &text)
}

impl CliError {
    fn with_context(mut self, context: &str) -> Self {
        self.message = format!("{context}: {}", self.message);
        self
    }
}
