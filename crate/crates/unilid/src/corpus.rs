//! Labeled text corpora: ingestion, stratified splits, per-language
//! subsampling, and train/eval contamination filtering.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// One labeled text sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub text: String,
    pub lang: String,
}

impl Sample {
    pub fn new(text: impl Into<String>, lang: impl Into<String>) -> Result<Self> {
        let text = text.into();
        let lang = lang.into();
        if text.is_empty() {
            return Err(Error::InvalidSample("empty text".into()));
        }
        if lang.is_empty() {
            return Err(Error::InvalidSample("empty label".into()));
        }
        if lang.chars().any(char::is_whitespace) {
            return Err(Error::InvalidSample(format!(
                "label {lang:?} contains whitespace"
            )));
        }
        Ok(Self { text, lang })
    }
}

/// Input file formats understood by [`read_corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// One JSON object per line with string fields `"text"` and `"lang"`.
    Jsonl,
    /// `lang<TAB>text`, one sample per line.
    Tsv,
}

impl std::str::FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(Self::Jsonl),
            "tsv" => Ok(Self::Tsv),
            other => Err(Error::InvalidConfig(format!(
                "unknown corpus format {other:?} (expected jsonl or tsv)"
            ))),
        }
    }
}

/// What happened while reading a corpus file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReadReport {
    /// Lines seen in the file.
    pub lines: usize,
    /// Samples that parsed cleanly.
    pub kept: usize,
    /// Malformed lines dropped because skipping was requested.
    pub skipped: usize,
}

/// An ordered collection of samples plus the distinct labels in
/// first-appearance order. Iteration order always follows the source.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledCorpus {
    samples: Vec<Sample>,
    label_set: Vec<String>,
}

impl LabeledCorpus {
    pub fn from_samples(samples: Vec<Sample>) -> Self {
        let mut label_set = Vec::new();
        let mut seen = HashSet::new();
        for s in &samples {
            if seen.insert(s.lang.clone()) {
                label_set.push(s.lang.clone());
            }
        }
        Self { samples, label_set }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    /// Distinct labels in order of first appearance.
    pub fn label_set(&self) -> &[String] {
        &self.label_set
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Texts of every sample carrying `label`, in corpus order.
    pub fn texts_for(&self, label: &str) -> Vec<&str> {
        self.samples
            .iter()
            .filter(|s| s.lang == label)
            .map(|s| s.text.as_str())
            .collect()
    }

    /// `(label, texts)` pairs in label_set order.
    pub fn by_label(&self) -> Vec<(&str, Vec<&str>)> {
        self.label_set
            .iter()
            .map(|l| (l.as_str(), self.texts_for(l)))
            .collect()
    }

    /// Sample counts per label, in label_set order.
    pub fn label_counts(&self) -> Vec<(&str, usize)> {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for s in &self.samples {
            *counts.entry(s.lang.as_str()).or_default() += 1;
        }
        self.label_set
            .iter()
            .map(|l| (l.as_str(), counts[l.as_str()]))
            .collect()
    }

    /// Per-label stratified split. Each label's samples are shuffled with a
    /// generator derived from `seed` and that label, `floor(n · train_frac)`
    /// go to train and the rest to test. Labels with a single sample cannot
    /// be stratified; their sample goes to train and a warning is logged.
    /// Both halves keep the original corpus order.
    pub fn split(&self, train_frac: f64, seed: u64) -> Result<(Self, Self)> {
        if !(train_frac > 0.0 && train_frac < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "train_frac must be in (0, 1), got {train_frac}"
            )));
        }
        let mut to_train = vec![false; self.samples.len()];
        for label in &self.label_set {
            let idxs = self.label_indices(label);
            if idxs.len() < 2 {
                log::warn!("label {label:?} has {} sample(s); all assigned to train", idxs.len());
                for i in idxs {
                    to_train[i] = true;
                }
                continue;
            }
            let n_train = ((idxs.len() as f64) * train_frac).floor() as usize;
            let chosen = shuffled_prefix(&idxs, n_train, seed, DOMAIN_SPLIT, label);
            for i in chosen {
                to_train[i] = true;
            }
        }
        Ok(self.partition(&to_train))
    }

    /// Keep at most `k` samples per label, chosen by seeded shuffle. Labels
    /// with fewer than `k` samples are kept whole (and logged). Order is
    /// preserved.
    pub fn subsample_per_language(&self, k: usize, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig("subsample size must be ≥ 1".into()));
        }
        let mut keep = vec![false; self.samples.len()];
        for label in &self.label_set {
            let idxs = self.label_indices(label);
            if idxs.len() < k {
                log::warn!(
                    "label {label:?} has only {} sample(s), fewer than requested {k}; keeping all",
                    idxs.len()
                );
            }
            let take = k.min(idxs.len());
            for i in shuffled_prefix(&idxs, take, seed, DOMAIN_SUBSAMPLE, label) {
                keep[i] = true;
            }
        }
        Ok(self.partition(&keep).0)
    }

    /// Remove every sample whose exact text occurs in any of `eval_sets`.
    /// Returns the filtered corpus and, per eval set, how many removed
    /// samples it accounts for (a sample contaminated by several sets is
    /// counted once in each). Idempotent.
    pub fn decontaminate(&self, eval_sets: &[&LabeledCorpus]) -> (Self, Vec<usize>) {
        let eval_texts: Vec<HashSet<&str>> = eval_sets
            .iter()
            .map(|c| c.samples.iter().map(|s| s.text.as_str()).collect())
            .collect();
        let mut counts = vec![0usize; eval_sets.len()];
        let mut keep = vec![true; self.samples.len()];
        for (i, s) in self.samples.iter().enumerate() {
            for (j, texts) in eval_texts.iter().enumerate() {
                if texts.contains(s.text.as_str()) {
                    keep[i] = false;
                    counts[j] += 1;
                }
            }
        }
        (self.partition(&keep).0, counts)
    }

    fn label_indices(&self, label: &str) -> Vec<usize> {
        self.samples
            .iter()
            .enumerate()
            .filter(|(_, s)| s.lang == label)
            .map(|(i, _)| i)
            .collect()
    }

    /// Split samples by mask, preserving order on both sides.
    fn partition(&self, mask: &[bool]) -> (Self, Self) {
        let mut yes = Vec::new();
        let mut no = Vec::new();
        for (s, &m) in self.samples.iter().zip(mask) {
            if m {
                yes.push(s.clone());
            } else {
                no.push(s.clone());
            }
        }
        (Self::from_samples(yes), Self::from_samples(no))
    }
}

const DOMAIN_SPLIT: u64 = 0x73706c6974; // "split"
const DOMAIN_SUBSAMPLE: u64 = 0x737562; // "sub"

/// First `take` elements of `idxs` under a shuffle keyed by (seed, domain,
/// label). Separate domains keep split and subsample decisions independent
/// even when the caller reuses one seed.
fn shuffled_prefix(idxs: &[usize], take: usize, seed: u64, domain: u64, label: &str) -> Vec<usize> {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ domain;
    for &b in label.as_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(h));
    let mut shuffled = idxs.to_vec();
    shuffled.shuffle(&mut rng);
    shuffled.truncate(take);
    shuffled
}

/// Read a labeled corpus from disk, preserving file order.
///
/// With `skip_bad` set, malformed lines are counted in the report and logged;
/// otherwise the first malformed line aborts the read with its line number.
/// A file yielding zero valid samples is an error either way.
pub fn read_corpus(
    path: impl AsRef<Path>,
    format: CorpusFormat,
    skip_bad: bool,
) -> Result<(LabeledCorpus, ReadReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut report = ReadReport::default();
    let mut samples = Vec::new();
    for (idx, line) in BufReader::new(file).split(b'\n').enumerate() {
        let raw = line.map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        report.lines += 1;
        match parse_line(&raw, format) {
            Ok(sample) => {
                samples.push(sample);
                report.kept += 1;
            }
            Err(reason) if skip_bad => {
                log::warn!("{}:{}: {reason} (skipped)", path.display(), idx + 1);
                report.skipped += 1;
            }
            Err(reason) => {
                return Err(Error::Malformed {
                    path: path.to_owned(),
                    line: idx + 1,
                    reason,
                });
            }
        }
    }
    if samples.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{}: no valid samples",
            path.display()
        )));
    }
    Ok((LabeledCorpus::from_samples(samples), report))
}

fn parse_line(raw: &[u8], format: CorpusFormat) -> std::result::Result<Sample, String> {
    // Tolerate CRLF input even though the canonical encoding is LF.
    let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
    let line = std::str::from_utf8(raw).map_err(|e| format!("invalid UTF-8: {e}"))?;
    let sample = match format {
        CorpusFormat::Tsv => {
            let (lang, text) = line
                .split_once('\t')
                .ok_or_else(|| "missing TAB separator".to_string())?;
            Sample::new(text, lang)
        }
        CorpusFormat::Jsonl => {
            #[derive(serde::Deserialize)]
            struct Row {
                text: String,
                lang: String,
            }
            let row: Row =
                serde_json::from_str(line).map_err(|e| format!("invalid JSON object: {e}"))?;
            Sample::new(row.text, row.lang)
        }
    };
    sample.map_err(|e| e.to_string())
}
