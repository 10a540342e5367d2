//! Annotation ingestion, duplicate-pair extraction and gold-standard merging.
//!
//! Input files are delimiter-separated text with a header row. The
//! delimiter (comma or tab) is detected from the header line and columns
//! are located by name, so the public label releases load as-is:
//!
//! | column        | aliases             | required |
//! |---------------|---------------------|----------|
//! | post id       | `TweetID`, `ID`     | yes      |
//! | label         | `HandLabel`, `Label`| yes      |
//! | annotator id  | `AnnotatorID`       | yes      |
//! | timestamp     | `Date`              | no       |
//! | text          | `Text`              | no       |

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, NaiveDateTime, SecondsFormat, Utc};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed delimited input: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing required column `{0}`")]
    MissingColumn(&'static str),
    #[error("line {line}: unknown label `{token}`")]
    UnknownLabel { line: u64, token: String },
    #[error("line {line}: empty {field}")]
    EmptyField { line: u64, field: &'static str },
    #[error("line {line}: unparsable timestamp `{token}`")]
    BadTimestamp { line: u64, token: String },
    #[error("chunk step must be at least 1")]
    ZeroStep,
}

/// Ordered three-valued sentiment code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SentimentLabel {
    Negative = -1,
    Neutral = 0,
    Positive = 1,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 3] = [Self::Negative, Self::Neutral, Self::Positive];

    pub fn code(self) -> i8 {
        self as i8
    }

    pub fn from_code(code: i64) -> Option<Self> {
        match code {
            -1 => Some(Self::Negative),
            0 => Some(Self::Neutral),
            1 => Some(Self::Positive),
            _ => None,
        }
    }

    /// Dense index 0..3 in code order.
    pub fn index(self) -> usize {
        (self.code() + 1) as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Negative => "Negative",
            Self::Neutral => "Neutral",
            Self::Positive => "Positive",
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownLabel(pub String);

impl FromStr for SentimentLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("negative") {
            Ok(Self::Negative)
        } else if t.eq_ignore_ascii_case("neutral") {
            Ok(Self::Neutral)
        } else if t.eq_ignore_ascii_case("positive") {
            Ok(Self::Positive)
        } else {
            match t {
                "-1" => Ok(Self::Negative),
                "0" => Ok(Self::Neutral),
                "1" | "+1" => Ok(Self::Positive),
                _ => Err(UnknownLabel(s.to_string())),
            }
        }
    }
}

/// Small bitset over the three labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LabelSet(u8);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    pub fn of(labels: &[SentimentLabel]) -> Self {
        labels.iter().fold(Self::EMPTY, |s, &l| s.with(l))
    }

    pub fn with(self, label: SentimentLabel) -> Self {
        LabelSet(self.0 | (1 << label.index()))
    }

    pub fn contains(self, label: SentimentLabel) -> bool {
        self.0 & (1 << label.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_disjoint(self, other: LabelSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = SentimentLabel> {
        SentimentLabel::ALL.into_iter().filter(move |&l| self.contains(l))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn from_bits(bits: u8) -> Self {
        LabelSet(bits & 0b111)
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in self.iter() {
            if !first {
                f.write_str("+")?;
            }
            first = false;
            f.write_str(match l {
                SentimentLabel::Negative => "neg",
                SentimentLabel::Neutral => "neu",
                SentimentLabel::Positive => "pos",
            })?;
        }
        Ok(())
    }
}

/// One annotator's label of one post.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationRecord {
    pub post_id: String,
    pub annotator_id: String,
    pub label: SentimentLabel,
    /// Ingestion index, unique within a loaded set.
    pub seq: usize,
    pub timestamp: Option<DateTime<Utc>>,
    pub text: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    #[serde(rename = "self")]
    SelfAgreement,
    Inter,
}

impl PairKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PairKind::SelfAgreement => "self",
            PairKind::Inter => "inter",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelPair {
    pub first: SentimentLabel,
    pub second: SentimentLabel,
    pub kind: PairKind,
    pub post_id: String,
}

impl LabelPair {
    /// Pair without provenance, for synthetic data and prediction scoring.
    pub fn new(first: SentimentLabel, second: SentimentLabel) -> Self {
        LabelPair {
            first,
            second,
            kind: PairKind::Inter,
            post_id: String::new(),
        }
    }
}

/// One merged, post-level training example.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldPost {
    pub post_id: String,
    pub label: SentimentLabel,
    pub timestamp: Option<DateTime<Utc>>,
    pub text: Option<String>,
    /// Number of annotations merged into this post.
    pub merged_from: usize,
    /// Smallest ingestion index among the merged annotations.
    pub seq: usize,
}

/// Column-name aliases used to locate fields in the header row.
#[derive(Debug, Clone)]
pub struct ColumnMapping {
    pub post_id: Vec<String>,
    pub label: Vec<String>,
    pub annotator_id: Vec<String>,
    pub timestamp: Vec<String>,
    pub text: Vec<String>,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        let v = |names: &[&str]| names.iter().map(|s| s.to_string()).collect();
        ColumnMapping {
            post_id: v(&["TweetID", "ID"]),
            label: v(&["HandLabel", "Label"]),
            annotator_id: v(&["AnnotatorID"]),
            timestamp: v(&["Date"]),
            text: v(&["Text"]),
        }
    }
}

fn find_column(headers: &csv::StringRecord, aliases: &[String]) -> Option<usize> {
    aliases.iter().find_map(|alias| {
        headers
            .iter()
            .position(|h| h.trim().trim_start_matches('\u{feff}').eq_ignore_ascii_case(alias))
    })
}

fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(t.and_utc());
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|t| t.and_utc())
}

/// Loads annotation records from a delimited file.
pub fn load_annotations(
    path: impl AsRef<Path>,
    mapping: &ColumnMapping,
) -> Result<Vec<AnnotationRecord>, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_annotations(file, mapping).map_err(|e| match e {
        CorpusError::Csv(err) if err.is_io_error() => match err.into_kind() {
            csv::ErrorKind::Io(source) => CorpusError::Io {
                path: path.to_path_buf(),
                source,
            },
            _ => unreachable!(),
        },
        other => other,
    })
}

/// Reads annotation records from any reader; see [`load_annotations`].
pub fn read_annotations<R: Read>(
    reader: R,
    mapping: &ColumnMapping,
) -> Result<Vec<AnnotationRecord>, CorpusError> {
    let mut reader = BufReader::new(reader);
    let mut header_line = String::new();
    reader
        .read_line(&mut header_line)
        .map_err(|e| CorpusError::Csv(e.into()))?;
    let delimiter = if header_line.contains('\t') { b'\t' } else { b',' };
    let mut csv_reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .from_reader(io::Cursor::new(header_line).chain(reader));

    let headers = csv_reader.headers()?.clone();
    let id_col = find_column(&headers, &mapping.post_id).ok_or(CorpusError::MissingColumn("post id"))?;
    let label_col = find_column(&headers, &mapping.label).ok_or(CorpusError::MissingColumn("label"))?;
    let annotator_col = find_column(&headers, &mapping.annotator_id)
        .ok_or(CorpusError::MissingColumn("annotator id"))?;
    let ts_col = find_column(&headers, &mapping.timestamp);
    let text_col = find_column(&headers, &mapping.text);

    let mut records = Vec::new();
    for row in csv_reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(i).unwrap_or("").trim();

        let post_id = field(id_col);
        if post_id.is_empty() {
            return Err(CorpusError::EmptyField { line, field: "post id" });
        }
        let annotator_id = field(annotator_col);
        if annotator_id.is_empty() {
            return Err(CorpusError::EmptyField {
                line,
                field: "annotator id",
            });
        }
        let token = field(label_col);
        let label = token.parse::<SentimentLabel>().map_err(|_| CorpusError::UnknownLabel {
            line,
            token: token.to_string(),
        })?;
        let timestamp = match ts_col.map(field) {
            None | Some("") => None,
            Some(s) => Some(parse_timestamp(s).ok_or_else(|| CorpusError::BadTimestamp {
                line,
                token: s.to_string(),
            })?),
        };
        let text = text_col
            .and_then(|i| row.get(i))
            .filter(|t| !t.trim().is_empty())
            .map(str::to_string);

        records.push(AnnotationRecord {
            post_id: post_id.to_string(),
            annotator_id: annotator_id.to_string(),
            label,
            seq: records.len(),
            timestamp,
            text,
        });
    }
    Ok(records)
}

fn group_by_post(records: &[AnnotationRecord]) -> IndexMap<&str, Vec<&AnnotationRecord>> {
    let mut groups: IndexMap<&str, Vec<&AnnotationRecord>> = IndexMap::new();
    for r in records {
        groups.entry(r.post_id.as_str()).or_default().push(r);
    }
    groups
}

/// All unordered annotation pairs of every multiply-annotated post.
///
/// Pairs are emitted per post in first-appearance order, and within a
/// post in `(i, j)`, `i < j` order of ingestion.
pub fn extract_pairs(records: &[AnnotationRecord]) -> Vec<LabelPair> {
    let mut pairs = Vec::new();
    for (post_id, group) in group_by_post(records) {
        for (i, a) in group.iter().enumerate() {
            for b in &group[i + 1..] {
                let kind = if a.annotator_id == b.annotator_id {
                    PairKind::SelfAgreement
                } else {
                    PairKind::Inter
                };
                pairs.push(LabelPair {
                    first: a.label,
                    second: b.label,
                    kind,
                    post_id: post_id.to_string(),
                });
            }
        }
    }
    pairs
}

/// Merged label of a set of annotations of one post.
///
/// Unanimous labels are kept. Two distinct values follow the fixed
/// conflict table (neutral+negative to negative, neutral+positive to
/// positive, negative+positive to neutral) irrespective of multiplicity.
/// All three values present merge to neutral.
pub fn merge_labels(labels: impl IntoIterator<Item = SentimentLabel>) -> Option<SentimentLabel> {
    use SentimentLabel::*;
    let present = labels.into_iter().fold(LabelSet::EMPTY, LabelSet::with);
    match present.len() {
        0 => None,
        1 => present.iter().next(),
        2 if !present.contains(Neutral) => Some(Neutral),
        2 if present.contains(Negative) => Some(Negative),
        2 => Some(Positive),
        _ => Some(Neutral),
    }
}

/// Merges duplicate annotations into one [`GoldPost`] per post id,
/// ordered by time.
pub fn merge_gold(records: &[AnnotationRecord]) -> Vec<GoldPost> {
    let mut gold: Vec<GoldPost> = group_by_post(records)
        .into_iter()
        .map(|(post_id, group)| {
            let label = merge_labels(group.iter().map(|r| r.label)).expect("non-empty group");
            GoldPost {
                post_id: post_id.to_string(),
                label,
                timestamp: group.iter().filter_map(|r| r.timestamp).min(),
                text: group.iter().find_map(|r| r.text.clone()),
                merged_from: group.len(),
                seq: group.iter().map(|r| r.seq).min().expect("non-empty group"),
            }
        })
        .collect();
    sort_time_ordered(&mut gold);
    gold
}

impl GoldPost {
    /// Re-expresses the post as a single annotation, so a gold corpus can
    /// be fed back through the annotation pipeline.
    pub fn to_record(&self, seq: usize) -> AnnotationRecord {
        AnnotationRecord {
            post_id: self.post_id.clone(),
            annotator_id: "gold".to_string(),
            label: self.label,
            seq,
            timestamp: self.timestamp,
            text: self.text.clone(),
        }
    }
}

/// Sorts by timestamp then ingestion order. When any post lacks a
/// timestamp the whole corpus is ordered by ingestion index alone.
pub fn sort_time_ordered(gold: &mut [GoldPost]) {
    if gold.iter().all(|g| g.timestamp.is_some()) {
        gold.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then(a.seq.cmp(&b.seq)));
    } else {
        gold.sort_by_key(|g| g.seq);
    }
}

/// Time-sorted corpus with the growing prefixes used for learning curves.
#[derive(Debug, Clone)]
pub struct TimeOrderedChunks {
    posts: Vec<GoldPost>,
    sizes: Vec<usize>,
}

impl TimeOrderedChunks {
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn corpus(&self) -> &[GoldPost] {
        &self.posts
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[GoldPost]> + '_ {
        self.sizes.iter().map(move |&n| &self.posts[..n])
    }
}

/// Prefixes of size `step`, `2*step`, ... with the full corpus last.
pub fn time_ordered_chunks(gold: &[GoldPost], step: usize) -> Result<TimeOrderedChunks, CorpusError> {
    if step == 0 {
        return Err(CorpusError::ZeroStep);
    }
    let mut posts = gold.to_vec();
    sort_time_ordered(&mut posts);
    let n = posts.len();
    let mut sizes: Vec<usize> = (1..).map(|i| i * step).take_while(|&s| s < n).collect();
    if n > 0 {
        sizes.push(n);
    }
    Ok(TimeOrderedChunks { posts, sizes })
}

/// Writes a gold corpus in the annotation layout plus a `MergedFrom` column.
pub fn write_gold<W: Write>(writer: W, gold: &[GoldPost], delimiter: u8) -> Result<(), CorpusError> {
    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(writer);
    w.write_record(["TweetID", "HandLabel", "AnnotatorID", "Date", "Text", "MergedFrom"])?;
    for g in gold {
        let date = g
            .timestamp
            .map(|t| t.to_rfc3339_opts(SecondsFormat::Secs, true))
            .unwrap_or_default();
        let merged = g.merged_from.to_string();
        w.write_record([
            g.post_id.as_str(),
            g.label.name(),
            "gold",
            date.as_str(),
            g.text.as_deref().unwrap_or(""),
            merged.as_str(),
        ])?;
    }
    w.flush().map_err(|e| CorpusError::Csv(e.into()))?;
    Ok(())
}

/// Label counts in code order: negative, neutral, positive.
pub fn label_counts<'a>(labels: impl IntoIterator<Item = &'a SentimentLabel>) -> [usize; 3] {
    let mut counts = [0usize; 3];
    for l in labels {
        counts[l.index()] += 1;
    }
    counts
}
