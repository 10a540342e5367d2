#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::Path;
use std::process::{Command, Output};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const LABELS: [&str; 3] = ["Negative", "Neutral", "Positive"];

pub fn senti(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_senti"))
        .args(args)
        .env_remove("SENTI_DATA_DIR")
        .output()
        .expect("senti runs")
}

/// Runs senti and returns stdout, panicking with stderr on failure.
pub fn senti_ok(args: &[&str]) -> String {
    let out = senti(args);
    assert!(
        out.status.success(),
        "senti {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Writes an annotation file from `(post, annotator, label)` rows.
pub fn write_annotations(path: &Path, rows: &[(&str, &str, &str)]) {
    let mut s = String::from("TweetID\tHandLabel\tAnnotatorID\n");
    for (post, annotator, label) in rows {
        writeln!(s, "{post}\t{label}\t{annotator}").unwrap();
    }
    std::fs::write(path, s).unwrap();
}

/// A labelled document of a synthetic corpus.
pub struct Doc {
    pub label: usize,
    pub text: String,
}

/// Three-class corpus: each document draws four words from its class pool
/// and four from a shared filler pool. From document `shift_at` on, the
/// class pools are replaced by fresh words.
pub fn synthetic_docs(n: usize, seed: u64, shift_at: Option<usize>) -> Vec<Doc> {
    let pool = |prefix: &str| -> Vec<String> { (0..15).map(|i| format!("{prefix}{i}")).collect() };
    let before = [pool("bad"), pool("meh"), pool("good")];
    let after = [pool("awful"), pool("plain"), pool("great")];
    let filler = pool("the");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let label = rng.random_range(0..3);
            let pools = if shift_at.is_some_and(|s| i >= s) { &after } else { &before };
            let mut words: Vec<&str> = (0..4).map(|_| pools[label].choose(&mut rng).unwrap().as_str()).collect();
            words.extend((0..4).map(|_| filler.choose(&mut rng).unwrap().as_str()));
            Doc {
                label,
                text: words.join(" "),
            }
        })
        .collect()
}

/// Writes documents as a single-annotator corpus with a text column.
pub fn write_corpus(path: &Path, docs: &[Doc]) {
    let mut s = String::from("TweetID\tHandLabel\tAnnotatorID\tText\n");
    for (i, d) in docs.iter().enumerate() {
        writeln!(s, "t{i}\t{}\ta1\t{}", LABELS[d.label], d.text).unwrap();
    }
    std::fs::write(path, s).unwrap();
}

/// The small worked pair set: (-,-) x2, (0,0) x2, (-,+), as five posts
/// labelled by two annotators.
pub fn worked_fixture(path: &Path) {
    let posts = [
        ("Negative", "Negative"),
        ("Negative", "Negative"),
        ("Neutral", "Neutral"),
        ("Neutral", "Neutral"),
        ("Negative", "Positive"),
    ];
    let ids: Vec<String> = (0..posts.len()).map(|i| format!("p{i}")).collect();
    let mut rows = Vec::new();
    for (id, (a, b)) in ids.iter().zip(posts) {
        rows.push((id.as_str(), "ann1", a));
        rows.push((id.as_str(), "ann2", b));
    }
    write_annotations(path, &rows);
}

/// Column of a CSV report by header name.
pub fn csv_column(text: &str, name: &str) -> Vec<String> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().expect("header").split(',').collect();
    let col = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(col).unwrap_or("").to_string()).collect()
}
