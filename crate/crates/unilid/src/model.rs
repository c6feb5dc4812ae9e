//! The language-identification model: one unigram distribution per language
//! over a shared vocabulary, Bayes-rule prediction on the best-segmentation
//! likelihood, incremental language addition, and a checksummed binary
//! format.

use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::corpus::LabeledCorpus;
use crate::em::{em_fit, EmConfig, EmTrace};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, UnigramDist};
use crate::num::KahanSum;
use crate::vocab::Vocabulary;

/// On-disk format version this build writes and reads.
pub const MODEL_FORMAT_VERSION: u32 = 1;

const MAGIC: [u8; 4] = *b"ULID";

/// Provenance carried alongside the distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMeta {
    pub format_version: u32,
    /// EM settings of the most recent training operation on this model.
    pub em: EmConfig,
    /// Training samples per language, aligned with the label list.
    pub sample_counts: Vec<u64>,
    /// Optional non-uniform language prior, aligned with the label list.
    /// `None` means uniform, which is what training produces.
    pub prior: Option<Vec<f64>>,
}

/// A trained model: shared vocabulary, ordered labels Λ, and one
/// distribution per label. Immutable; all "mutating" operations return a new
/// value.
#[derive(Debug, Clone)]
pub struct UniLidModel {
    vocab: Vocabulary,
    labels: Vec<String>,
    dists: Vec<UnigramDist>,
    meta: ModelMeta,
}

/// The outcome of classifying one string. `log_likelihoods[i]` is the raw
/// max-segmentation log-probability under language `i`; `posterior` is the
/// Bayes posterior over labels (uniform prior unless the model carries one).
#[derive(Debug, Clone)]
pub struct Prediction {
    pub label: String,
    pub log_likelihoods: Vec<f64>,
    pub posterior: Vec<f64>,
}

impl Prediction {
    /// Label indices ranked by posterior, descending; equal posteriors keep
    /// label order.
    pub fn ranked(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.posterior.len()).collect();
        idx.sort_by(|&a, &b| {
            self.posterior[b]
                .total_cmp(&self.posterior[a])
                .then(a.cmp(&b))
        });
        idx
    }
}

impl UniLidModel {
    /// Fit one distribution per label by EM, independently and in parallel.
    /// The result does not depend on label processing order, so training
    /// `{A,B}` and later adding `C` reproduces `train({A,B,C})` exactly.
    ///
    /// Every label in the corpus has at least one sample by construction of
    /// [`LabeledCorpus`].
    pub fn train(vocab: Vocabulary, corpus: &LabeledCorpus, em: &EmConfig) -> Result<Self> {
        Ok(Self::train_traced(vocab, corpus, em)?.0)
    }

    /// [`Self::train`], additionally returning each language's EM trace
    /// (round-by-round log-likelihood and TV movement) in label order.
    pub fn train_traced(
        vocab: Vocabulary,
        corpus: &LabeledCorpus,
        em: &EmConfig,
    ) -> Result<(Self, Vec<EmTrace>)> {
        em.validate()?;
        if corpus.is_empty() {
            return Err(Error::EmptyInput("training corpus".into()));
        }
        let by_label = corpus.by_label();
        let fits = by_label
            .par_iter()
            .map(|(label, texts)| {
                let (dist, trace) = em_fit(&vocab, texts, em)?;
                log::info!(
                    "{label}: {} texts, {} EM rounds, converged={}",
                    texts.len(),
                    trace.rounds_run,
                    trace.converged(em.tv_tolerance)
                );
                Ok((dist, trace, texts.len() as u64))
            })
            .collect::<Result<Vec<_>>>()?;
        let labels: Vec<String> = by_label.iter().map(|(l, _)| l.to_string()).collect();
        let mut dists = Vec::with_capacity(fits.len());
        let mut traces = Vec::with_capacity(fits.len());
        let mut sample_counts = Vec::with_capacity(fits.len());
        for (dist, trace, count) in fits {
            dists.push(dist);
            traces.push(trace);
            sample_counts.push(count);
        }
        let model = Self {
            vocab,
            labels,
            dists,
            meta: ModelMeta {
                format_version: MODEL_FORMAT_VERSION,
                em: em.clone(),
                sample_counts,
                prior: None,
            },
        };
        Ok((model, traces))
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_languages(&self) -> usize {
        self.labels.len()
    }

    pub fn dists(&self) -> &[UnigramDist] {
        &self.dists
    }

    pub fn meta(&self) -> &ModelMeta {
        &self.meta
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Classify one byte string: build its lattice once, score the best
    /// segmentation under every language, and take the Bayes argmax. Ties go
    /// to the earlier label.
    pub fn predict(&self, text: &[u8]) -> Result<Prediction> {
        let lattice = Lattice::build(&self.vocab, text)?;
        let log_likelihoods = lattice.score_all(&self.dists);
        let scored: Vec<f64> = match &self.meta.prior {
            None => log_likelihoods.clone(),
            Some(p) => log_likelihoods
                .iter()
                .zip(p)
                .map(|(ll, w)| ll + w.ln())
                .collect(),
        };
        let mut best = 0usize;
        for (i, &s) in scored.iter().enumerate() {
            if s > scored[best] {
                best = i;
            }
        }
        let posterior = softmax(&scored);
        Ok(Prediction {
            label: self.labels[best].clone(),
            log_likelihoods,
            posterior,
        })
    }

    /// Elementwise [`Self::predict`], parallel over texts, output order
    /// matching input order. Per-item failures (empty strings) stay at their
    /// index instead of aborting the batch.
    pub fn predict_batch<T: AsRef<[u8]> + Sync>(&self, texts: &[T]) -> Vec<Result<Prediction>> {
        texts
            .par_iter()
            .map(|t| self.predict(t.as_ref()))
            .collect()
    }

    /// Fit one more language on the shared vocabulary. Existing
    /// distributions are carried over bit-identically.
    pub fn add_language<S: AsRef<[u8]> + Sync>(
        &self,
        label: &str,
        corpus: &[S],
        em: &EmConfig,
    ) -> Result<Self> {
        if self.labels.iter().any(|l| l == label) {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
        if corpus.is_empty() {
            return Err(Error::EmptyInput(format!("training corpus for {label:?}")));
        }
        let (dist, trace) = em_fit(&self.vocab, corpus, em)?;
        log::info!(
            "{label}: {} texts, {} EM rounds, converged={}",
            corpus.len(),
            trace.rounds_run,
            trace.converged(em.tv_tolerance)
        );
        let mut next = self.clone();
        next.labels.push(label.to_string());
        next.dists.push(dist);
        next.meta.sample_counts.push(corpus.len() as u64);
        next.meta.em = em.clone();
        if next.meta.prior.is_some() {
            // A stored prior cannot cover the new language; drop back to
            // uniform rather than invent a weight.
            log::warn!("dropping stored language prior: new language {label:?} has no weight");
            next.meta.prior = None;
        }
        Ok(next)
    }

    /// Restrict the model to `keep` (original label order, surviving
    /// distributions bit-identical). Posteriors renormalize over the subset.
    pub fn subset_languages(&self, keep: &[String]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyInput("label subset".into()));
        }
        for k in keep {
            if !self.labels.contains(k) {
                return Err(Error::UnknownLabel(k.clone()));
            }
        }
        let mut labels = Vec::new();
        let mut dists = Vec::new();
        let mut sample_counts = Vec::new();
        let mut prior = self.meta.prior.as_ref().map(|_| Vec::new());
        for (i, l) in self.labels.iter().enumerate() {
            if keep.contains(l) {
                labels.push(l.clone());
                dists.push(self.dists[i].clone());
                sample_counts.push(self.meta.sample_counts[i]);
                if let (Some(p), Some(src)) = (&mut prior, &self.meta.prior) {
                    p.push(src[i]);
                }
            }
        }
        Ok(Self {
            vocab: self.vocab.clone(),
            labels,
            dists,
            meta: ModelMeta {
                format_version: self.meta.format_version,
                em: self.meta.em.clone(),
                sample_counts,
                prior,
            },
        })
    }

    /// Serialize: `"ULID"`, format version, SHA-256 of the payload, payload.
    /// Everything little-endian; floats as raw bits, so round-trips are
    /// bit-exact.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut p = Vec::new();
        p.extend((self.vocab.len() as u32).to_le_bytes());
        for tok in self.vocab.tokens() {
            p.extend((tok.len() as u32).to_le_bytes());
            p.extend(tok);
        }
        p.extend((self.meta.em.max_rounds as u32).to_le_bytes());
        p.extend(self.meta.em.tv_tolerance.to_le_bytes());
        p.extend(self.meta.em.floor_log_prob.to_le_bytes());
        p.extend(self.meta.em.seed.to_le_bytes());
        p.push(u8::from(self.meta.prior.is_some()));
        p.extend((self.labels.len() as u32).to_le_bytes());
        for (i, label) in self.labels.iter().enumerate() {
            let bytes = label.as_bytes();
            p.extend((bytes.len() as u32).to_le_bytes());
            p.extend(bytes);
            p.extend(self.meta.sample_counts[i].to_le_bytes());
            for &lp in self.dists[i].log_probs() {
                p.extend(lp.to_le_bytes());
            }
        }
        if let Some(prior) = &self.meta.prior {
            for &w in prior {
                p.extend(w.to_le_bytes());
            }
        }

        let digest = Sha256::digest(&p);
        let mut out = Vec::with_capacity(4 + 4 + 32 + p.len());
        out.extend(MAGIC);
        out.extend(MODEL_FORMAT_VERSION.to_le_bytes());
        out.extend(digest.as_slice());
        out.extend(p);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 40 {
            return Err(Error::ModelFormat("file shorter than the header".into()));
        }
        if bytes[..4] != MAGIC {
            return Err(Error::ModelFormat("bad magic (not a model file)".into()));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelVersion {
                found: version,
                supported: MODEL_FORMAT_VERSION,
            });
        }
        let stored = &bytes[8..40];
        let payload = &bytes[40..];
        if Sha256::digest(payload).as_slice() != stored {
            return Err(Error::ModelFormat(
                "checksum mismatch (file corrupted)".into(),
            ));
        }

        let mut r = Reader {
            buf: payload,
            pos: 0,
        };
        let vocab_count = r.u32()? as usize;
        let mut tokens = Vec::with_capacity(vocab_count);
        for _ in 0..vocab_count {
            let len = r.u32()? as usize;
            tokens.push(r.take(len)?.to_vec());
        }
        let vocab = Vocabulary::from_tokens(tokens)?;
        let em = EmConfig {
            max_rounds: r.u32()? as usize,
            tv_tolerance: r.f64()?,
            floor_log_prob: r.f64()?,
            seed: r.u64()?,
        };
        let has_prior = r.u8()? != 0;
        let label_count = r.u32()? as usize;
        if label_count == 0 {
            return Err(Error::ModelFormat("model has no languages".into()));
        }
        let mut labels = Vec::with_capacity(label_count);
        let mut sample_counts = Vec::with_capacity(label_count);
        let mut dists = Vec::with_capacity(label_count);
        for _ in 0..label_count {
            let len = r.u32()? as usize;
            let label = String::from_utf8(r.take(len)?.to_vec())
                .map_err(|_| Error::ModelFormat("label is not UTF-8".into()))?;
            if labels.contains(&label) {
                return Err(Error::DuplicateLabel(label));
            }
            sample_counts.push(r.u64()?);
            let mut lp = Vec::with_capacity(vocab_count);
            for _ in 0..vocab_count {
                lp.push(r.f64()?);
            }
            dists.push(UnigramDist::from_log_probs(lp)?);
            labels.push(label);
        }
        let prior = if has_prior {
            let mut p = Vec::with_capacity(label_count);
            for _ in 0..label_count {
                p.push(r.f64()?);
            }
            Some(p)
        } else {
            None
        };
        if r.pos != payload.len() {
            return Err(Error::ModelFormat(format!(
                "{} trailing bytes after the payload",
                payload.len() - r.pos
            )));
        }
        Ok(Self {
            vocab,
            labels,
            dists,
            meta: ModelMeta {
                format_version: version,
                em,
                sample_counts,
                prior,
            },
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_bytes(&bytes)
    }
}

/// Softmax in log space. If every score is -inf (no language can spell the
/// string, which byte-floored training rules out), falls back to uniform so
/// the posterior invariant still holds.
fn softmax(scored: &[f64]) -> Vec<f64> {
    let m = scored.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return vec![1.0 / scored.len() as f64; scored.len()];
    }
    let unnorm: Vec<f64> = scored.iter().map(|&s| (s - m).exp()).collect();
    let z = KahanSum::from_iter(unnorm.iter().copied()).value();
    unnorm.into_iter().map(|u| u / z).collect()
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let s = &self.buf[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::ModelFormat(format!(
                "truncated: wanted {n} bytes at offset {}, have {}",
                self.pos,
                self.buf.len() - self.pos
            ))),
        }
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sample;

    fn vocab(tokens: &[&str]) -> Vocabulary {
        Vocabulary::from_tokens(tokens.iter().map(|t| t.as_bytes().to_vec()).collect()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// A two-language model with hand-picked distributions, bypassing EM.
    fn hand_model(d1: &[f64], d2: &[f64]) -> UniLidModel {
        UniLidModel {
            vocab: vocab(&["a", "b", "ab"]),
            labels: vec!["l1".into(), "l2".into()],
            dists: vec![
                UnigramDist::from_probs(d1).unwrap(),
                UnigramDist::from_probs(d2).unwrap(),
            ],
            meta: ModelMeta {
                format_version: MODEL_FORMAT_VERSION,
                em: EmConfig::default(),
                sample_counts: vec![1, 1],
                prior: None,
            },
        }
    }

    fn toy_corpus() -> LabeledCorpus {
        let mut samples = Vec::new();
        for t in ["aaab", "aaa", "abaa", "aa"] {
            samples.push(Sample::new(t, "aaa-ish").unwrap());
        }
        for t in ["bbba", "bbb", "babb", "bb"] {
            samples.push(Sample::new(t, "bbb-ish").unwrap());
        }
        LabeledCorpus::from_samples(samples)
    }

    #[test]
    fn predict_scores_each_language_and_normalizes() {
        let m = hand_model(&[0.7, 0.1, 0.2], &[0.1, 0.7, 0.2]);
        let p = m.predict(b"aa").unwrap();
        assert_eq!(p.label, "l1");
        assert!(close(p.log_likelihoods[0], 0.49f64.ln(), 1e-12));
        assert!(close(p.log_likelihoods[1], 0.01f64.ln(), 1e-12));
        assert!(close(p.posterior[0], 0.98, 1e-12));
        assert!(close(p.posterior[1], 0.02, 1e-12));
        assert!(close(p.posterior.iter().sum::<f64>(), 1.0, 1e-9));
    }

    #[test]
    fn identical_languages_tie_toward_the_first_label() {
        let m = hand_model(&[0.4, 0.4, 0.2], &[0.4, 0.4, 0.2]);
        let p = m.predict(b"ab").unwrap();
        assert_eq!(p.label, "l1");
        assert!(close(p.posterior[0], 0.5, 1e-12));
        assert!(close(p.posterior[1], 0.5, 1e-12));
    }

    #[test]
    fn each_language_is_scored_under_its_own_best_segmentation() {
        // l1's best path for "ab" is ⟨ab⟩ (0.9); l2's is ⟨a,b⟩ (0.234).
        let m = hand_model(&[0.05, 0.05, 0.9], &[0.6, 0.39, 0.01]);
        let p = m.predict(b"ab").unwrap();
        assert!(close(p.log_likelihoods[0], 0.9f64.ln(), 1e-12));
        assert!(close(p.log_likelihoods[1], (0.6f64 * 0.39).ln(), 1e-12));
    }

    #[test]
    fn predict_rejects_empty_text() {
        let m = hand_model(&[0.7, 0.1, 0.2], &[0.1, 0.7, 0.2]);
        assert!(m.predict(b"").is_err());
    }

    #[test]
    fn predict_batch_preserves_order_and_per_item_errors() {
        let m = hand_model(&[0.7, 0.1, 0.2], &[0.1, 0.7, 0.2]);
        let texts: Vec<&[u8]> = vec![b"aa", b"", b"bb"];
        let out = m.predict_batch(&texts);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].as_ref().unwrap().label, "l1");
        assert!(out[1].is_err());
        assert_eq!(out[2].as_ref().unwrap().label, "l2");
    }

    #[test]
    fn ranked_orders_by_posterior_with_stable_ties() {
        let m = hand_model(&[0.4, 0.4, 0.2], &[0.4, 0.4, 0.2]);
        let p = m.predict(b"ab").unwrap();
        assert_eq!(p.ranked(), vec![0, 1]);
        let m2 = hand_model(&[0.1, 0.7, 0.2], &[0.7, 0.1, 0.2]);
        let p2 = m2.predict(b"aa").unwrap();
        assert_eq!(p2.ranked(), vec![1, 0]);
    }

    #[test]
    fn train_produces_self_consistent_labels() {
        let vocab = Vocabulary::with_byte_coverage(vec![
            b"aa".to_vec(),
            b"bb".to_vec(),
            b"aaa".to_vec(),
            b"bbb".to_vec(),
        ])
        .unwrap()
        .0;
        let m = UniLidModel::train(vocab, &toy_corpus(), &EmConfig::default()).unwrap();
        assert_eq!(m.labels(), ["aaa-ish", "bbb-ish"]);
        assert_eq!(m.meta().sample_counts, vec![4, 4]);
        assert_eq!(m.predict(b"aaaa").unwrap().label, "aaa-ish");
        assert_eq!(m.predict(b"bbbb").unwrap().label, "bbb-ish");
    }

    #[test]
    fn training_is_independent_of_label_order() {
        let vocab = || {
            Vocabulary::with_byte_coverage(vec![b"aa".to_vec(), b"bb".to_vec()])
                .unwrap()
                .0
        };
        let fwd = toy_corpus();
        // Same samples with the label blocks swapped; within each label the
        // order is untouched, so each per-label fit sees an identical input.
        let mut rev_samples: Vec<Sample> = Vec::new();
        for label in ["bbb-ish", "aaa-ish"] {
            rev_samples.extend(
                fwd.samples().iter().filter(|s| s.lang == label).cloned(),
            );
        }
        let rev = LabeledCorpus::from_samples(rev_samples);
        let m1 = UniLidModel::train(vocab(), &fwd, &EmConfig::default()).unwrap();
        let m2 = UniLidModel::train(vocab(), &rev, &EmConfig::default()).unwrap();
        assert_ne!(m1.labels(), m2.labels());
        // Label order differs, but each label's distribution is identical.
        for label in m1.labels() {
            let i1 = m1.label_index(label).unwrap();
            let i2 = m2.label_index(label).unwrap();
            assert_eq!(m1.dists()[i1].log_probs(), m2.dists()[i2].log_probs());
        }
    }

    #[test]
    fn add_language_keeps_existing_dists_bit_identical() {
        let vocab = Vocabulary::with_byte_coverage(vec![b"aa".to_vec(), b"bb".to_vec()])
            .unwrap()
            .0;
        let em = EmConfig::default();
        let base = UniLidModel::train(vocab, &toy_corpus(), &em).unwrap();
        let bigger = base.add_language("ccc-ish", &["cccc", "ccc", "cc"], &em).unwrap();
        assert_eq!(bigger.labels().len(), 3);
        for i in 0..2 {
            assert_eq!(
                base.dists()[i].log_probs(),
                bigger.dists()[i].log_probs()
            );
        }
        assert_eq!(bigger.predict(b"cccc").unwrap().label, "ccc-ish");
        // Re-adding an existing label is rejected.
        assert!(bigger.add_language("aaa-ish", &["a"], &em).is_err());
    }

    #[test]
    fn subset_languages_restricts_and_renormalizes() {
        let m = hand_model(&[0.7, 0.1, 0.2], &[0.1, 0.7, 0.2]);
        let only_l2 = m.subset_languages(&["l2".to_string()]).unwrap();
        let p = only_l2.predict(b"aa").unwrap();
        assert_eq!(p.label, "l2");
        assert!(close(p.posterior[0], 1.0, 1e-12));
        assert_eq!(
            only_l2.dists()[0].log_probs(),
            m.dists()[1].log_probs()
        );
        assert!(m.subset_languages(&["nope".to_string()]).is_err());
        assert!(m.subset_languages(&[]).is_err());
        // Keeping everything is the identity.
        let all = m.subset_languages(&["l1".to_string(), "l2".to_string()]).unwrap();
        assert_eq!(all.to_bytes(), m.to_bytes());
    }

    #[test]
    fn save_load_roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.ulid");
        let m = hand_model(&[0.7, 0.1, 0.2], &[0.1, 0.7, 0.2]);
        m.save(&path).unwrap();
        let back = UniLidModel::load(&path).unwrap();
        assert_eq!(m.to_bytes(), back.to_bytes());
        assert_eq!(m.labels(), back.labels());
        for i in 0..2 {
            assert_eq!(m.dists()[i].log_probs(), back.dists()[i].log_probs());
        }
        assert_eq!(m.meta(), back.meta());
    }

    #[test]
    fn corrupting_any_region_is_detected() {
        let m = hand_model(&[0.7, 0.1, 0.2], &[0.1, 0.7, 0.2]);
        let clean = m.to_bytes();

        // Flip one payload byte: checksum failure.
        let mut bad = clean.clone();
        *bad.last_mut().unwrap() ^= 0x01;
        assert!(matches!(
            UniLidModel::from_bytes(&bad),
            Err(Error::ModelFormat(_))
        ));

        // Future version: version error, not a parse crash.
        let mut future = clean.clone();
        future[4..8].copy_from_slice(&2u32.to_le_bytes());
        assert!(matches!(
            UniLidModel::from_bytes(&future),
            Err(Error::ModelVersion { found: 2, .. })
        ));

        // Truncation: checksum can't match.
        assert!(UniLidModel::from_bytes(&clean[..clean.len() - 9]).is_err());
        assert!(UniLidModel::from_bytes(&clean[..17]).is_err());

        // Wrong magic.
        let mut junk = clean;
        junk[0] = b'X';
        assert!(matches!(
            UniLidModel::from_bytes(&junk),
            Err(Error::ModelFormat(_))
        ));
    }
}
