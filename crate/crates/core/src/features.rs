//! Tweet normalization, n-gram vocabularies and Delta TF-IDF weighting.
//!
//! # Normalization table (version 1)
//!
//! Text is split on whitespace and each raw token is handled by the first
//! matching rule:
//!
//! | rule      | pattern                                   | output                         |
//! |-----------|-------------------------------------------|--------------------------------|
//! | url       | starts with `http://`, `https://`, `www.` | `<url>`                        |
//! | mention   | `@` followed by a word character          | `<user>`                       |
//! | hashtag   | `#` followed by word characters           | `<hashtag>`, then the tag word |
//! | emoticon  | whole token (trailing `.,!?` ignored) in [`EMOTICONS`] | `<emo_pos>` / `<emo_neg>` / `<emo_other>` |
//! | word      | anything else                             | lowercased letter/digit runs   |
//!
//! Every other character is punctuation and dropped. Inside a word, a run
//! of three or more identical letters is cut to two and `<elong>` is
//! emitted right after the word.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use regex::Regex;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{GoldPost, LabelSet, SentimentLabel};
use crate::scalar::Real;

pub const NORMALIZATION_VERSION: u32 = 1;
pub const VOCABULARY_FORMAT: &str = "senti-vocabulary";
pub const VOCABULARY_VERSION: u32 = 1;

pub const URL_TOKEN: &str = "<url>";
pub const USER_TOKEN: &str = "<user>";
pub const HASHTAG_TOKEN: &str = "<hashtag>";
pub const ELONGATION_TOKEN: &str = "<elong>";
pub const EMO_POSITIVE: &str = "<emo_pos>";
pub const EMO_NEGATIVE: &str = "<emo_neg>";
pub const EMO_OTHER: &str = "<emo_other>";

/// Built-in emoticon table: `(emoticon, category token)`.
pub const EMOTICONS: &[(&str, &str)] = &[
    (":)", EMO_POSITIVE),
    (":-)", EMO_POSITIVE),
    (":]", EMO_POSITIVE),
    ("=)", EMO_POSITIVE),
    (":D", EMO_POSITIVE),
    (":-D", EMO_POSITIVE),
    ("=D", EMO_POSITIVE),
    (";)", EMO_POSITIVE),
    (";-)", EMO_POSITIVE),
    (":P", EMO_POSITIVE),
    (":-P", EMO_POSITIVE),
    (":p", EMO_POSITIVE),
    (":-p", EMO_POSITIVE),
    (":*", EMO_POSITIVE),
    ("<3", EMO_POSITIVE),
    ("xD", EMO_POSITIVE),
    ("XD", EMO_POSITIVE),
    ("^_^", EMO_POSITIVE),
    (":(", EMO_NEGATIVE),
    (":-(", EMO_NEGATIVE),
    (":[", EMO_NEGATIVE),
    ("=(", EMO_NEGATIVE),
    (":'(", EMO_NEGATIVE),
    (":'-(", EMO_NEGATIVE),
    (">:(", EMO_NEGATIVE),
    ("D:", EMO_NEGATIVE),
    (":c", EMO_NEGATIVE),
    ("</3", EMO_NEGATIVE),
    (":O", EMO_OTHER),
    (":o", EMO_OTHER),
    (":-O", EMO_OTHER),
    (":-o", EMO_OTHER),
    (":|", EMO_OTHER),
    (":-|", EMO_OTHER),
    (":/", EMO_OTHER),
    (":-/", EMO_OTHER),
    (":\\", EMO_OTHER),
    (":S", EMO_OTHER),
    (":s", EMO_OTHER),
    ("o_O", EMO_OTHER),
    ("O_o", EMO_OTHER),
];

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("post `{0}` has no text")]
    MissingText(String),
    #[error("vocabulary has no class-side counts for split {0}")]
    MissingSplit(BinarySplit),
    #[error("invalid sparse vector: {0}")]
    InvalidVector(&'static str),
    #[error("vocabulary file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Normalized token sequence of one post.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenStream {
    tokens: Vec<String>,
}

impl TokenStream {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    fn push(&mut self, t: impl Into<String>) {
        let t = t.into();
        if !t.is_empty() {
            self.tokens.push(t);
        }
    }
}

struct Patterns {
    mention: Regex,
    hashtag: Regex,
    word: Regex,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| Patterns {
        mention: Regex::new(r"^@[\p{L}\p{N}_]").unwrap(),
        hashtag: Regex::new(r"^#([\p{L}\p{N}_]+)").unwrap(),
        word: Regex::new(r"[\p{L}\p{N}]+").unwrap(),
    })
}

fn emoticon_category(token: &str) -> Option<&'static str> {
    let lookup = |t: &str| EMOTICONS.iter().find(|(e, _)| *e == t).map(|(_, c)| *c);
    lookup(token).or_else(|| {
        let trimmed = token.trim_end_matches(['.', ',', '!', '?']);
        (trimmed != token && !trimmed.is_empty()).then(|| lookup(trimmed)).flatten()
    })
}

/// Cuts runs of three or more identical letters to two.
fn squeeze_elongation(word: &str) -> (String, bool) {
    let mut out = String::with_capacity(word.len());
    let mut squeezed = false;
    let mut prev = None;
    let mut run = 0;
    for ch in word.chars() {
        if Some(ch) == prev {
            run += 1;
        } else {
            prev = Some(ch);
            run = 1;
        }
        if run <= 2 || !ch.is_alphabetic() {
            out.push(ch);
        } else {
            squeezed = true;
        }
    }
    (out, squeezed)
}

fn push_words(stream: &mut TokenStream, raw: &str) {
    let lower = raw.to_lowercase();
    for m in patterns().word.find_iter(&lower) {
        let (word, elongated) = squeeze_elongation(m.as_str());
        stream.push(word);
        if elongated {
            stream.push(ELONGATION_TOKEN);
        }
    }
}

/// Applies the normalization table to raw post text.
pub fn normalize(text: &str) -> TokenStream {
    let p = patterns();
    let mut stream = TokenStream::default();
    for raw in text.split_whitespace() {
        let lower_prefix = raw.get(..8).unwrap_or(raw).to_ascii_lowercase();
        if lower_prefix.starts_with("http://") || lower_prefix.starts_with("https://") || lower_prefix.starts_with("www.") {
            stream.push(URL_TOKEN);
        } else if p.mention.is_match(raw) {
            stream.push(USER_TOKEN);
        } else if let Some(c) = p.hashtag.captures(raw) {
            stream.push(HASHTAG_TOKEN);
            push_words(&mut stream, &c[1]);
        } else if let Some(category) = emoticon_category(raw) {
            stream.push(category);
        } else {
            push_words(&mut stream, raw);
        }
    }
    stream
}

fn is_marker(token: &str) -> bool {
    token.starts_with('<') && token.ends_with('>') && token.len() > 2
}

/// Pluggable stemming/lemmatization step applied to word tokens.
pub trait Stemmer: Send + Sync {
    fn stem<'a>(&self, token: &'a str) -> Cow<'a, str>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityStemmer;

impl Stemmer for IdentityStemmer {
    fn stem<'a>(&self, token: &'a str) -> Cow<'a, str> {
        Cow::Borrowed(token)
    }
}

/// Light English suffix stripper. Keeps at least three characters of stem.
#[derive(Debug, Clone, Copy, Default)]
pub struct SuffixStemmer;

impl Stemmer for SuffixStemmer {
    fn stem<'a>(&self, token: &'a str) -> Cow<'a, str> {
        const SUFFIXES: [&str; 8] = ["ingly", "edly", "ing", "ies", "ed", "ly", "es", "s"];
        for suffix in SUFFIXES {
            if let Some(stem) = token.strip_suffix(suffix) {
                if stem.chars().count() >= 3 && !(suffix == "s" && stem.ends_with('s')) {
                    return if suffix == "ies" {
                        Cow::Owned(format!("{stem}y"))
                    } else {
                        Cow::Borrowed(stem)
                    };
                }
            }
        }
        Cow::Borrowed(token)
    }
}

/// Term → occurrence count of one document.
pub type TermBag = BTreeMap<String, u32>;

/// Text → term bag pipeline: normalization, stemming and n-grams.
pub struct Featurizer {
    stemmer: Box<dyn Stemmer>,
    max_ngram: usize,
}

impl Default for Featurizer {
    fn default() -> Self {
        Featurizer::new(Box::new(IdentityStemmer), 2)
    }
}

impl Featurizer {
    /// `max_ngram` is 1 (unigrams) or 2 (unigrams and bigrams).
    pub fn new(stemmer: Box<dyn Stemmer>, max_ngram: usize) -> Self {
        Featurizer {
            stemmer,
            max_ngram: max_ngram.clamp(1, 2),
        }
    }

    pub fn max_ngram(&self) -> usize {
        self.max_ngram
    }

    pub fn terms(&self, text: &str) -> TermBag {
        let tokens: Vec<Cow<'_, str>> = normalize(text)
            .tokens
            .into_iter()
            .map(|t| {
                if is_marker(&t) {
                    Cow::Owned(t)
                } else {
                    Cow::Owned(self.stemmer.stem(&t).into_owned())
                }
            })
            .collect();
        let mut bag = TermBag::new();
        for t in &tokens {
            *bag.entry(t.to_string()).or_insert(0) += 1;
        }
        if self.max_ngram >= 2 {
            for w in tokens.windows(2) {
                *bag.entry(format!("{}_{}", w[0], w[1])).or_insert(0) += 1;
            }
        }
        bag
    }
}

/// Sparse vector with strictly increasing indices and no stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<T> {
    indices: Vec<u32>,
    values: Vec<T>,
    dim: usize,
}

impl<T: Real> SparseVector<T> {
    pub fn zeros(dim: usize) -> Self {
        SparseVector {
            indices: Vec::new(),
            values: Vec::new(),
            dim,
        }
    }

    /// Builds from `(index, value)` entries, which must be strictly
    /// increasing and below `dim`. Zero values are dropped.
    pub fn new(dim: usize, entries: impl IntoIterator<Item = (u32, T)>) -> Result<Self, FeatureError> {
        let mut v = Self::zeros(dim);
        for (i, x) in entries {
            if (i as usize) >= dim {
                return Err(FeatureError::InvalidVector("index out of range"));
            }
            if v.indices.last().is_some_and(|&last| last >= i) {
                return Err(FeatureError::InvalidVector("indices not strictly increasing"));
            }
            if x != T::zero() {
                v.indices.push(i);
                v.values.push(x);
            }
        }
        Ok(v)
    }

    pub fn from_dense(values: &[T]) -> Self {
        let entries = values.iter().enumerate().map(|(i, &x)| (i as u32, x));
        Self::new(values.len(), entries).expect("dense input is well formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.indices.iter().zip(&self.values).map(|(&i, &x)| (i as usize, x))
    }

    pub fn get(&self, index: usize) -> T {
        match self.indices.binary_search(&(index as u32)) {
            Ok(pos) => self.values[pos],
            Err(_) => T::zero(),
        }
    }

    pub fn dot(&self, dense: &[T]) -> T {
        self.iter().map(|(i, x)| x * dense[i]).sum()
    }

    pub fn squared_norm(&self) -> T {
        self.values.iter().map(|&x| x * x).sum()
    }

    /// Elementwise product with a dense weight vector.
    pub fn weighted(&self, weights: &[T]) -> Self {
        let entries = self.iter().map(|(i, x)| (i as u32, x * weights[i]));
        Self::new(self.dim, entries).expect("indices stay valid")
    }
}

/// One binary subproblem: labels on the positive and on the negative side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinarySplit {
    pub positive: LabelSet,
    pub negative: LabelSet,
}

impl BinarySplit {
    pub fn new(negative: &[SentimentLabel], positive: &[SentimentLabel]) -> Self {
        let split = BinarySplit {
            positive: LabelSet::of(positive),
            negative: LabelSet::of(negative),
        };
        assert!(split.positive.is_disjoint(split.negative), "overlapping split sides");
        split
    }

    /// `+1` / `-1` for labels on a side, `None` for labels outside the split.
    pub fn sign(&self, label: SentimentLabel) -> Option<i8> {
        if self.positive.contains(label) {
            Some(1)
        } else if self.negative.contains(label) {
            Some(-1)
        } else {
            None
        }
    }

    /// The same split with the sides swapped.
    pub fn flipped(&self) -> Self {
        BinarySplit {
            positive: self.negative,
            negative: self.positive,
        }
    }
}

impl std::fmt::Display for BinarySplit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}|{}", self.negative, self.positive)
    }
}

/// How `min_df` is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PruneMode {
    /// Number of documents containing the term.
    #[default]
    DocumentFrequency,
    /// Total occurrences over the corpus.
    Occurrences,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VocabularyConfig {
    pub min_df: u32,
    pub prune: PruneMode,
    /// Additive smoothing inside the Delta TF-IDF log ratio.
    pub smoothing: f64,
}

impl Default for VocabularyConfig {
    fn default() -> Self {
        VocabularyConfig {
            min_df: 5,
            prune: PruneMode::DocumentFrequency,
            smoothing: 0.5,
        }
    }
}

/// Per-split document frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct SideCounts {
    pub split: BinarySplit,
    pub positive_df: Vec<u32>,
    pub negative_df: Vec<u32>,
    pub positive_docs: u32,
    pub negative_docs: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, u32>,
    df: Vec<u32>,
    docs: u32,
    config: VocabularyConfig,
    sides: Vec<SideCounts>,
}

/// Builds a pruned vocabulary over labelled term bags and records
/// class-side document frequencies for every requested split.
pub fn build_vocabulary(
    docs: &[(&TermBag, SentimentLabel)],
    config: &VocabularyConfig,
    splits: &[BinarySplit],
) -> Result<Vocabulary, FeatureError> {
    if docs.is_empty() {
        return Err(FeatureError::EmptyCorpus);
    }
    let mut df: BTreeMap<&str, (u32, u64)> = BTreeMap::new();
    for (bag, _) in docs {
        for (term, &count) in bag.iter() {
            let e = df.entry(term.as_str()).or_insert((0, 0));
            e.0 += 1;
            e.1 += u64::from(count);
        }
    }
    let keep = |&(d, occ): &(u32, u64)| match config.prune {
        PruneMode::DocumentFrequency => d >= config.min_df,
        PruneMode::Occurrences => occ >= u64::from(config.min_df),
    };
    let (terms, df): (Vec<String>, Vec<u32>) = df
        .into_iter()
        .filter(|(_, stats)| keep(stats))
        .map(|(t, (d, _))| (t.to_string(), d))
        .unzip();
    let index: HashMap<String, u32> = terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();

    let mut splits = splits.to_vec();
    splits.sort();
    splits.dedup();
    let sides = splits
        .into_iter()
        .map(|split| {
            let mut side = SideCounts {
                split,
                positive_df: vec![0; terms.len()],
                negative_df: vec![0; terms.len()],
                positive_docs: 0,
                negative_docs: 0,
            };
            for (bag, label) in docs {
                let (counter, total) = match split.sign(*label) {
                    Some(1) => (&mut side.positive_df, &mut side.positive_docs),
                    Some(_) => (&mut side.negative_df, &mut side.negative_docs),
                    None => continue,
                };
                *total += 1;
                for term in bag.keys() {
                    if let Some(&i) = index.get(term) {
                        counter[i as usize] += 1;
                    }
                }
            }
            side
        })
        .collect();

    Ok(Vocabulary {
        terms,
        index,
        df,
        docs: docs.len() as u32,
        config: *config,
        sides,
    })
}

/// Featurizes gold posts and builds their vocabulary.
pub fn build_vocabulary_from_posts(
    gold: &[GoldPost],
    featurizer: &Featurizer,
    config: &VocabularyConfig,
    splits: &[BinarySplit],
) -> Result<(Vocabulary, Vec<TermBag>), FeatureError> {
    let bags = gold
        .iter()
        .map(|g| {
            g.text
                .as_deref()
                .map(|t| featurizer.terms(t))
                .ok_or_else(|| FeatureError::MissingText(g.post_id.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let docs: Vec<_> = bags.iter().zip(gold).map(|(b, g)| (b, g.label)).collect();
    let vocab = build_vocabulary(&docs, config, splits)?;
    Ok((vocab, bags))
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).map(|&i| i as usize)
    }

    pub fn document_frequency(&self, term: &str) -> Option<u32> {
        self.index_of(term).map(|i| self.df[i])
    }

    pub fn documents(&self) -> u32 {
        self.docs
    }

    pub fn config(&self) -> &VocabularyConfig {
        &self.config
    }

    pub fn sides(&self) -> &[SideCounts] {
        &self.sides
    }

    pub fn side(&self, split: BinarySplit) -> Option<&SideCounts> {
        self.sides.iter().find(|s| s.split == split)
    }

    /// Delta TF-IDF factor of every term for one split:
    /// `log2((N_t + s)(|P| + s) / ((P_t + s)(|N| + s)))`.
    pub fn delta_weights<T: Real>(&self, split: BinarySplit) -> Result<Vec<T>, FeatureError> {
        let side = self.side(split).ok_or(FeatureError::MissingSplit(split))?;
        let s = T::lit(self.config.smoothing);
        let pos_docs = T::lit(f64::from(side.positive_docs)) + s;
        let neg_docs = T::lit(f64::from(side.negative_docs)) + s;
        Ok(side
            .positive_df
            .iter()
            .zip(&side.negative_df)
            .map(|(&p, &n)| {
                let p = T::lit(f64::from(p)) + s;
                let n = T::lit(f64::from(n)) + s;
                ((n * pos_docs) / (p * neg_docs)).log2()
            })
            .collect())
    }

    /// Raw in-vocabulary term counts.
    pub fn count_vector<T: Real>(&self, bag: &TermBag) -> SparseVector<T> {
        let mut entries: Vec<(u32, T)> = bag
            .iter()
            .filter_map(|(t, &c)| self.index.get(t).map(|&i| (i, T::lit(f64::from(c)))))
            .collect();
        entries.sort_by_key(|e| e.0);
        SparseVector::new(self.len(), entries).expect("vocabulary indices are valid")
    }

    /// Delta TF-IDF vector of one document for one split.
    pub fn vectorize<T: Real>(&self, bag: &TermBag, split: BinarySplit) -> Result<SparseVector<T>, FeatureError> {
        let weights = self.delta_weights::<T>(split)?;
        Ok(self.count_vector::<T>(bag).weighted(&weights))
    }

    /// Vectorizes a gold post with the given featurizer.
    pub fn vectorize_post<T: Real>(
        &self,
        post: &GoldPost,
        featurizer: &Featurizer,
        split: BinarySplit,
    ) -> Result<SparseVector<T>, FeatureError> {
        let text = post.text.as_deref().ok_or_else(|| FeatureError::MissingText(post.post_id.clone()))?;
        self.vectorize(&featurizer.terms(text), split)
    }

    /// Serializes to the versioned tab-separated text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let prune = match self.config.prune {
            PruneMode::DocumentFrequency => "document",
            PruneMode::Occurrences => "occurrence",
        };
        writeln!(out, "{VOCABULARY_FORMAT}\t{VOCABULARY_VERSION}").unwrap();
        writeln!(out, "normalization\t{NORMALIZATION_VERSION}").unwrap();
        writeln!(out, "documents\t{}", self.docs).unwrap();
        writeln!(out, "min_df\t{}\t{prune}", self.config.min_df).unwrap();
        writeln!(out, "smoothing\t{:?}", self.config.smoothing).unwrap();
        for side in &self.sides {
            writeln!(
                out,
                "split\t{}\t{}\t{}\t{}",
                side.split.negative.bits(),
                side.split.positive.bits(),
                side.negative_docs,
                side.positive_docs
            )
            .unwrap();
        }
        writeln!(out, "terms\t{}", self.terms.len()).unwrap();
        for (i, term) in self.terms.iter().enumerate() {
            write!(out, "{term}\t{i}\t{}", self.df[i]).unwrap();
            for side in &self.sides {
                write!(out, "\t{}\t{}", side.negative_df[i], side.positive_df[i]).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// SHA-256 of the serialized form, used to bind models to vocabularies.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), FeatureError> {
        w.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Self, FeatureError> {
        let bad = |msg: &str| FeatureError::Format(msg.to_string());
        let mut lines = reader.lines();
        let mut next = || -> Result<Vec<String>, FeatureError> {
            let line = lines.next().ok_or_else(|| bad("unexpected end of file"))??;
            Ok(line.split('\t').map(str::to_string).collect())
        };
        let num = |s: &str| s.parse::<u32>().map_err(|_| bad("bad integer"));

        let head = next()?;
        if head.first().map(String::as_str) != Some(VOCABULARY_FORMAT) {
            return Err(bad("not a vocabulary file"));
        }
        if head.get(1).map(String::as_str) != Some(&VOCABULARY_VERSION.to_string()) {
            return Err(bad("unsupported vocabulary version"));
        }
        let norm = next()?;
        if norm.get(1).map(String::as_str) != Some(&NORMALIZATION_VERSION.to_string()) {
            return Err(bad("unsupported normalization version"));
        }
        let docs = num(next()?.get(1).ok_or_else(|| bad("documents"))?)?;
        let min_line = next()?;
        let min_df = num(min_line.get(1).ok_or_else(|| bad("min_df"))?)?;
        let prune = match min_line.get(2).map(String::as_str) {
            Some("document") => PruneMode::DocumentFrequency,
            Some("occurrence") => PruneMode::Occurrences,
            _ => return Err(bad("prune mode")),
        };
        let smoothing = next()?
            .get(1)
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or_else(|| bad("smoothing"))?;

        let mut sides = Vec::new();
        let term_count = loop {
            let fields = next()?;
            match fields.first().map(String::as_str) {
                Some("split") if fields.len() == 5 => {
                    let neg = LabelSet::from_bits(num(&fields[1])? as u8);
                    let pos = LabelSet::from_bits(num(&fields[2])? as u8);
                    sides.push(SideCounts {
                        split: BinarySplit { positive: pos, negative: neg },
                        positive_df: Vec::new(),
                        negative_df: Vec::new(),
                        negative_docs: num(&fields[3])?,
                        positive_docs: num(&fields[4])?,
                    });
                }
                Some("terms") if fields.len() == 2 => break num(&fields[1])? as usize,
                _ => return Err(bad("expected split or terms line")),
            }
        };
        let mut terms = Vec::with_capacity(term_count);
        let mut df = Vec::with_capacity(term_count);
        for i in 0..term_count {
            let fields = next()?;
            if fields.len() != 3 + 2 * sides.len() || num(&fields[1])? as usize != i {
                return Err(bad("malformed term line"));
            }
            df.push(num(&fields[2])?);
            for (k, side) in sides.iter_mut().enumerate() {
                side.negative_df.push(num(&fields[3 + 2 * k])?);
                side.positive_df.push(num(&fields[4 + 2 * k])?);
            }
            terms.push(fields[0].clone());
        }
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Ok(Vocabulary {
            terms,
            index,
            df,
            docs,
            config: VocabularyConfig { min_df, prune, smoothing },
            sides,
        })
    }
}
