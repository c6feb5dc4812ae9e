//! Evaluation: confusion-matrix metrics (macro F1 / macro FPR / accuracy),
//! accuracy by input length, sample-efficiency sweeps, and a throughput
//! benchmark.

use std::collections::HashMap;
use std::time::Instant;

use serde::Serialize;

use crate::corpus::LabeledCorpus;
use crate::em::EmConfig;
use crate::error::{Error, Result};
use crate::model::UniLidModel;
use crate::vocab::Vocabulary;

/// Counts of (true label, predicted label) pairs. Rows are truth, columns
/// predictions, both in the same label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    counts: Vec<u64>, // row-major |labels|²
}

impl ConfusionMatrix {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyInput("confusion matrix label list".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let n = labels.len();
        Ok(Self {
            labels,
            counts: vec![0; n * n],
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn record(&mut self, true_idx: usize, pred_idx: usize) {
        let n = self.n();
        self.counts[true_idx * n + pred_idx] += 1;
    }

    pub fn count(&self, true_idx: usize, pred_idx: usize) -> u64 {
        self.counts[true_idx * self.n() + pred_idx]
    }

    /// Samples whose true label is `i`.
    pub fn row_sum(&self, i: usize) -> u64 {
        let n = self.n();
        self.counts[i * n..(i + 1) * n].iter().sum()
    }

    /// Samples predicted as `i`.
    pub fn col_sum(&self, i: usize) -> u64 {
        let n = self.n();
        (0..n).map(|r| self.counts[r * n + i]).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Per-class metrics; `support` is the class's sample count in the test set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub fpr: f64,
    pub support: u64,
}

/// Headline metrics plus the per-class breakdown.
///
/// Macro averages run over the classes present in the test set (support > 0);
/// model languages the test never exercises contribute nothing. This matters
/// when comparing against tools that average over the full label inventory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub macro_fpr: f64,
    pub total: u64,
    pub per_class: Vec<ClassMetrics>,
}

impl EvalReport {
    /// CSV: one row per class, then `__macro__` and `__accuracy__` summary
    /// rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,precision,recall,f1,fpr,support\n");
        for c in &self.per_class {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                csv_field(&c.label),
                c.precision,
                c.recall,
                c.f1,
                c.fpr,
                c.support
            ));
        }
        out.push_str(&format!(
            "__macro__,,,{},{},{}\n",
            self.macro_f1, self.macro_fpr, self.total
        ));
        out.push_str(&format!("__accuracy__,{},,,,\n", self.accuracy));
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Derive all metrics from a filled confusion matrix.
///
/// Division rules: precision is 0 when nothing was predicted as the class,
/// F1 is 0 when precision + recall is 0, and FPR is 0 when the class has no
/// negatives — every value stays finite.
pub fn report_from_confusion(cm: &ConfusionMatrix) -> EvalReport {
    let total = cm.total();
    let mut per_class = Vec::new();
    for i in 0..cm.n() {
        let support = cm.row_sum(i);
        if support == 0 {
            continue;
        }
        let tp = cm.count(i, i) as f64;
        let fp = (cm.col_sum(i) - cm.count(i, i)) as f64;
        let negatives = (total - support) as f64;
        let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let recall = tp / support as f64;
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        let fpr = if negatives > 0.0 { fp / negatives } else { 0.0 };
        per_class.push(ClassMetrics {
            label: cm.labels()[i].clone(),
            precision,
            recall,
            f1,
            fpr,
            support,
        });
    }
    let k = per_class.len() as f64;
    let correct: u64 = (0..cm.n()).map(|i| cm.count(i, i)).sum();
    EvalReport {
        accuracy: if total > 0 { correct as f64 / total as f64 } else { 0.0 },
        macro_f1: if k > 0.0 {
            per_class.iter().map(|c| c.f1).sum::<f64>() / k
        } else {
            0.0
        },
        macro_fpr: if k > 0.0 {
            per_class.iter().map(|c| c.fpr).sum::<f64>() / k
        } else {
            0.0
        },
        total,
        per_class,
    }
}

/// Classify the whole test corpus and compute metrics. Test labels must all
/// be known to the model; unknown ones are rejected up front, listed in the
/// error.
pub fn evaluate(model: &UniLidModel, test: &LabeledCorpus) -> Result<EvalReport> {
    Ok(report_from_confusion(&confusion_matrix(model, test)?))
}

/// The (truth, prediction) counts underlying [`evaluate`]; rows/columns use
/// the model's label order.
pub fn confusion_matrix(model: &UniLidModel, test: &LabeledCorpus) -> Result<ConfusionMatrix> {
    if test.is_empty() {
        return Err(Error::EmptyInput("evaluation corpus".into()));
    }
    let unknown: Vec<&str> = test
        .label_set()
        .iter()
        .filter(|l| model.label_index(l).is_none())
        .map(|l| l.as_str())
        .collect();
    if !unknown.is_empty() {
        return Err(Error::UnknownLabel(format!(
            "test labels not in the model: {}",
            unknown.join(", ")
        )));
    }
    let index: HashMap<&str, usize> = model
        .labels()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let texts: Vec<&str> = test.samples().iter().map(|s| s.text.as_str()).collect();
    let predictions = model.predict_batch(&texts);
    let mut cm = ConfusionMatrix::new(model.labels().to_vec())?;
    for (sample, pred) in test.samples().iter().zip(predictions) {
        let pred = pred?;
        cm.record(index[sample.lang.as_str()], index[pred.label.as_str()]);
    }
    Ok(cm)
}

/// How sample length is measured for bucketing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthUnit {
    Chars,
    Bytes,
}

impl std::str::FromStr for LengthUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chars" => Ok(Self::Chars),
            "bytes" => Ok(Self::Bytes),
            other => Err(Error::InvalidConfig(format!(
                "unknown length unit {other:?} (expected chars or bytes)"
            ))),
        }
    }
}

/// Inclusive length range; `max = None` means unbounded above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LenBucket {
    pub min: usize,
    pub max: Option<usize>,
}

impl LenBucket {
    pub fn contains(&self, len: usize) -> bool {
        len >= self.min && self.max.is_none_or(|m| len <= m)
    }

    pub fn label(&self) -> String {
        match self.max {
            Some(m) => format!("{}-{}", self.min, m),
            None => format!("{}+", self.min),
        }
    }
}

/// The usual reporting buckets: 101–150, 151–200, 201–300, 301–500,
/// 501–1000, 1001+.
pub fn default_length_buckets() -> Vec<LenBucket> {
    [
        (101, Some(150)),
        (151, Some(200)),
        (201, Some(300)),
        (301, Some(500)),
        (501, Some(1000)),
        (1001, None),
    ]
    .into_iter()
    .map(|(min, max)| LenBucket { min, max })
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthRow {
    /// Bucket label, e.g. `"101-150"`, `"1001+"`, or `"other"` for samples
    /// outside every bucket.
    pub label: String,
    pub count: u64,
    pub correct: u64,
    /// `None` when the bucket is empty.
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthReport {
    pub unit: String,
    pub rows: Vec<LengthRow>,
    pub total: u64,
    pub overall_accuracy: f64,
}

impl LengthReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bucket,count,correct,accuracy\n");
        for r in &self.rows {
            match r.accuracy {
                Some(a) => out.push_str(&format!("{},{},{},{}\n", r.label, r.count, r.correct, a)),
                None => out.push_str(&format!("{},{},{},\n", r.label, r.count, r.correct)),
            }
        }
        out.push_str(&format!(
            "__overall__,{},,{}\n",
            self.total, self.overall_accuracy
        ));
        out
    }
}

/// Accuracy broken down by sample length. Buckets must be ordered and
/// non-overlapping; samples fitting none of them land in a trailing "other"
/// row. The overall accuracy equals the count-weighted mean of the rows.
pub fn accuracy_by_length(
    model: &UniLidModel,
    test: &LabeledCorpus,
    buckets: &[LenBucket],
    unit: LengthUnit,
) -> Result<LengthReport> {
    if test.is_empty() {
        return Err(Error::EmptyInput("evaluation corpus".into()));
    }
    if buckets.is_empty() {
        return Err(Error::InvalidConfig("no length buckets given".into()));
    }
    for b in buckets {
        if b.max.is_some_and(|m| m < b.min) {
            return Err(Error::InvalidConfig(format!(
                "bucket {} is empty (max < min)",
                b.label()
            )));
        }
    }
    for pair in buckets.windows(2) {
        let ok = match pair[0].max {
            Some(m) => m < pair[1].min,
            None => false, // an unbounded bucket must be last
        };
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "buckets {} and {} overlap or are out of order",
                pair[0].label(),
                pair[1].label()
            )));
        }
    }

    let texts: Vec<&str> = test.samples().iter().map(|s| s.text.as_str()).collect();
    let predictions = model.predict_batch(&texts);
    // counts[i] covers buckets[i]; the last slot is "other".
    let mut counts = vec![(0u64, 0u64); buckets.len() + 1];
    for (sample, pred) in test.samples().iter().zip(predictions) {
        let pred = pred?;
        let len = match unit {
            LengthUnit::Chars => sample.text.chars().count(),
            LengthUnit::Bytes => sample.text.len(),
        };
        let slot = buckets
            .iter()
            .position(|b| b.contains(len))
            .unwrap_or(buckets.len());
        counts[slot].0 += 1;
        counts[slot].1 += u64::from(pred.label == sample.lang);
    }

    let mut rows = Vec::new();
    for (i, b) in buckets.iter().enumerate() {
        let (count, correct) = counts[i];
        rows.push(LengthRow {
            label: b.label(),
            count,
            correct,
            accuracy: (count > 0).then(|| correct as f64 / count as f64),
        });
    }
    let (other_count, other_correct) = counts[buckets.len()];
    if other_count > 0 {
        rows.push(LengthRow {
            label: "other".into(),
            count: other_count,
            correct: other_correct,
            accuracy: Some(other_correct as f64 / other_count as f64),
        });
    }
    let total: u64 = counts.iter().map(|c| c.0).sum();
    let correct: u64 = counts.iter().map(|c| c.1).sum();
    Ok(LengthReport {
        unit: match unit {
            LengthUnit::Chars => "chars".into(),
            LengthUnit::Bytes => "bytes".into(),
        },
        rows,
        total,
        overall_accuracy: correct as f64 / total as f64,
    })
}

/// One (k, seed) training run of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRun {
    pub k: usize,
    pub seed: u64,
    pub accuracy: f64,
    /// True when k met or exceeded every class size, so the subsample was
    /// the whole training set.
    pub used_full_data: bool,
}

/// Accuracy summary over seeds at one k (sample std, n−1 denominator; absent
/// with a single seed).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub k: usize,
    pub mean: f64,
    pub std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub runs: Vec<SweepRun>,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn runs_csv(&self) -> String {
        let mut out = String::from("k,seed,accuracy\n");
        for r in &self.runs {
            out.push_str(&format!("{},{},{}\n", r.k, r.seed, r.accuracy));
        }
        out
    }

    pub fn points_csv(&self) -> String {
        let mut out = String::from("k,mean,std\n");
        for p in &self.points {
            match p.std {
                Some(s) => out.push_str(&format!("{},{},{}\n", p.k, p.mean, s)),
                None => out.push_str(&format!("{},{},\n", p.k, p.mean)),
            }
        }
        out
    }
}

/// Train-and-evaluate at each (k samples per language, seed): subsample the
/// training corpus, fit a model on the fixed vocabulary, score the test set.
pub fn sample_efficiency_sweep(
    vocab: &Vocabulary,
    train: &LabeledCorpus,
    test: &LabeledCorpus,
    ks: &[usize],
    seeds: &[u64],
    em: &EmConfig,
) -> Result<SweepResult> {
    if ks.is_empty() {
        return Err(Error::InvalidConfig("no sample sizes given".into()));
    }
    if !ks.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidConfig(
            "sample sizes must be strictly ascending".into(),
        ));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("no seeds given".into()));
    }
    let mut runs = Vec::new();
    let mut points = Vec::new();
    for &k in ks {
        let mut accs = Vec::new();
        for &seed in seeds {
            let sub = train.subsample_per_language(k, seed)?;
            let used_full_data = sub.len() == train.len();
            if used_full_data {
                log::warn!("k={k} covers every class; the run degenerates to full data");
            }
            let model = UniLidModel::train(vocab.clone(), &sub, em)?;
            let accuracy = evaluate(&model, test)?.accuracy;
            runs.push(SweepRun {
                k,
                seed,
                accuracy,
                used_full_data,
            });
            accs.push(accuracy);
        }
        let n = accs.len() as f64;
        let mean = accs.iter().sum::<f64>() / n;
        let std = (accs.len() >= 2).then(|| {
            (accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        });
        points.push(SweepPoint { k, mean, std });
    }
    Ok(SweepResult { runs, points })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub mean_latency_ms: f64,
    pub samples_per_sec: f64,
    pub vocab_size: usize,
    pub n_texts: usize,
    pub repetitions: usize,
}

/// Sequential single-stream timing: one unmeasured warmup pass, then
/// `repetitions` timed passes over `texts`. Latency is per prediction;
/// throughput is its reciprocal (same clock).
pub fn throughput_bench<T: AsRef<[u8]>>(
    model: &UniLidModel,
    texts: &[T],
    repetitions: usize,
) -> Result<BenchReport> {
    if texts.is_empty() {
        return Err(Error::EmptyInput("benchmark texts".into()));
    }
    if repetitions < 1 {
        return Err(Error::InvalidConfig("repetitions must be ≥ 1".into()));
    }
    for t in texts {
        model.predict(t.as_ref())?; // warmup; also surfaces bad inputs early
    }
    let started = Instant::now();
    for _ in 0..repetitions {
        for t in texts {
            let p = model.predict(t.as_ref()).expect("inputs validated in warmup");
            std::hint::black_box(&p);
        }
    }
    let elapsed = started.elapsed();
    let total = (repetitions * texts.len()) as f64;
    Ok(BenchReport {
        mean_latency_ms: elapsed.as_secs_f64() * 1e3 / total,
        samples_per_sec: total / elapsed.as_secs_f64(),
        vocab_size: model.vocab().len(),
        n_texts: texts.len(),
        repetitions,
    })
}
