//! EM estimation of unigram distributions, and vocabulary learning by
//! alternating EM with lowest-loss token pruning.

use std::collections::HashMap;
use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{CountAccumulator, Lattice, UnigramDist};
use crate::num::{kahan_total, KahanSum};
use crate::vocab::Vocabulary;

/// Settings for one EM fit.
#[derive(Debug, Clone, PartialEq)]
pub struct EmConfig {
    /// Hard cap on EM rounds.
    pub max_rounds: usize,
    /// Stop once the total variation distance between consecutive rounds'
    /// distributions falls below this.
    pub tv_tolerance: f64,
    /// Log-probability assigned to single-byte tokens whose expected count
    /// hit zero, so every byte string keeps a nonzero-probability
    /// segmentation in every language.
    pub floor_log_prob: f64,
    /// Recorded for provenance; EM itself is deterministic and draws no
    /// random numbers.
    pub seed: u64,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            max_rounds: 20,
            tv_tolerance: 1e-6,
            floor_log_prob: 1e-12f64.ln(),
            seed: 0,
        }
    }
}

impl EmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_rounds < 1 {
            return Err(Error::InvalidConfig("max_rounds must be ≥ 1".into()));
        }
        if self.tv_tolerance.is_nan() || self.tv_tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tv_tolerance must be > 0, got {}",
                self.tv_tolerance
            )));
        }
        if self.floor_log_prob.is_nan() || self.floor_log_prob >= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "floor_log_prob must be negative, got {}",
                self.floor_log_prob
            )));
        }
        Ok(())
    }
}

/// Settings for vocabulary pruning inside [`learn_vocab`].
#[derive(Debug, Clone, PartialEq)]
pub struct PruneConfig {
    /// Final vocabulary size to shrink down to.
    pub target_size: usize,
    /// Each prune keeps `ceil(shrink_factor × current_size)` tokens (floored
    /// at `target_size`).
    pub shrink_factor: f64,
    /// EM rounds between consecutive prunes.
    pub em_rounds_per_prune: usize,
}

impl Default for PruneConfig {
    fn default() -> Self {
        Self {
            target_size: 100_000,
            shrink_factor: 0.75,
            em_rounds_per_prune: 2,
        }
    }
}

impl PruneConfig {
    pub fn validate(&self) -> Result<()> {
        if self.target_size < 256 {
            return Err(Error::InvalidConfig(format!(
                "target_size must be ≥ 256 (single-byte tokens alone fill that), got {}",
                self.target_size
            )));
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "shrink_factor must be in (0, 1), got {}",
                self.shrink_factor
            )));
        }
        if self.em_rounds_per_prune < 1 {
            return Err(Error::InvalidConfig("em_rounds_per_prune must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// One row of an EM trace: the corpus log-likelihood of that round's
/// distribution, and its TV distance to the previous round's (absent for the
/// initial distribution).
#[derive(Debug, Clone, PartialEq)]
pub struct EmRound {
    pub round: usize,
    pub log_likelihood: f64,
    pub tv: Option<f64>,
}

/// Convergence record of one EM fit. Row 0 describes the initial
/// distribution; row `rounds_run` the returned one. Log-likelihood is
/// non-decreasing down the rows (up to tiny floor-renormalization noise).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmTrace {
    pub rounds: Vec<EmRound>,
    /// Number of E/M updates actually performed (≤ max_rounds).
    pub rounds_run: usize,
}

impl EmTrace {
    /// Did the last update move less than `tolerance` in TV distance?
    pub fn converged(&self, tolerance: f64) -> bool {
        self.rounds
            .last()
            .and_then(|r| r.tv)
            .is_some_and(|tv| tv < tolerance)
    }

    pub fn final_log_likelihood(&self) -> Option<f64> {
        self.rounds.last().map(|r| r.log_likelihood)
    }

    /// CSV rendering (`round,loglik,tv`), one row per trace row; the initial
    /// row's TV column is empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,loglik,tv\n");
        for r in &self.rounds {
            match r.tv {
                Some(tv) => out.push_str(&format!("{},{},{}\n", r.round, r.log_likelihood, tv)),
                None => out.push_str(&format!("{},{},\n", r.round, r.log_likelihood)),
            }
        }
        out
    }
}

/// Corpus prepared for repeated EM passes: strings deduplicated into
/// (unique string, multiplicity) in first-appearance order, lattices built
/// up front when they fit comfortably in memory and rebuilt on the fly
/// otherwise (bit-identical results either way).
struct Prepped<'a> {
    strings: Vec<&'a [u8]>,
    weights: Vec<f64>,
    cached: Option<Vec<Lattice>>,
    /// Fixed work partition: depends only on corpus and vocabulary size, so
    /// results cannot vary with the number of worker threads.
    ranges: Vec<Range<usize>>,
}

/// Keep at most this much lattice data resident across EM rounds.
const LATTICE_CACHE_BYTES: usize = 256 << 20;
/// Cap on E-step shards; also bounded so per-shard accumulators (16 bytes per
/// vocabulary entry each) stay within ~256 MB total.
const MAX_CHUNKS: usize = 64;

impl<'a> Prepped<'a> {
    fn build<S: AsRef<[u8]> + Sync>(vocab: &Vocabulary, corpus: &'a [S]) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::EmptyInput("EM training corpus".into()));
        }
        let mut index: HashMap<&[u8], usize> = HashMap::new();
        let mut strings: Vec<&[u8]> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for s in corpus {
            let s = s.as_ref();
            match index.entry(s) {
                std::collections::hash_map::Entry::Occupied(e) => weights[*e.get()] += 1.0,
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(strings.len());
                    strings.push(s);
                    weights.push(1.0);
                }
            }
        }
        let lattices = strings
            .par_iter()
            .map(|s| Lattice::build(vocab, s))
            .collect::<Result<Vec<_>>>()?;
        let bytes: usize = lattices
            .iter()
            .map(|l| l.edge_count() * 8 + (l.n() + 2) * 4)
            .sum();
        let cached = (bytes <= LATTICE_CACHE_BYTES).then_some(lattices);

        let max_chunks = MAX_CHUNKS.min(((256 << 20) / (16 * vocab.len())).max(1));
        let ranges = chunk_ranges(strings.len(), max_chunks);
        Ok(Self {
            strings,
            weights,
            cached,
            ranges,
        })
    }

    fn with_lattice<R>(&self, vocab: &Vocabulary, i: usize, f: impl FnOnce(&Lattice) -> R) -> R {
        match &self.cached {
            Some(lats) => f(&lats[i]),
            None => f(&Lattice::build(vocab, self.strings[i])
                .expect("string was lattice-checked during preparation")),
        }
    }
}

fn chunk_ranges(n: usize, max_chunks: usize) -> Vec<Range<usize>> {
    let chunks = max_chunks.min(n).max(1);
    let base = n / chunks;
    let rem = n % chunks;
    let mut ranges = Vec::with_capacity(chunks);
    let mut start = 0;
    for c in 0..chunks {
        let len = base + usize::from(c < rem);
        ranges.push(start..start + len);
        start += len;
    }
    ranges
}

/// One E-step: expected token counts over the whole corpus plus the corpus
/// log-likelihood of `dist`. Shards run in parallel and merge in a fixed
/// order with compensated sums.
fn e_step(vocab: &Vocabulary, prepped: &Prepped, dist: &UnigramDist) -> (CountAccumulator, f64) {
    let parts: Vec<(CountAccumulator, f64)> = prepped
        .ranges
        .par_iter()
        .map(|range| {
            let mut acc = CountAccumulator::new(vocab.len());
            let mut ll = KahanSum::new();
            for i in range.clone() {
                let w = prepped.weights[i];
                let z = prepped.with_lattice(vocab, i, |lat| {
                    lat.expected_counts_weighted(dist, w, &mut acc)
                });
                ll.add(w * z);
            }
            (acc, ll.value())
        })
        .collect();
    let mut acc = CountAccumulator::new(vocab.len());
    let mut ll = KahanSum::new();
    for (part, part_ll) in &parts {
        acc.merge(part);
        ll.add(*part_ll);
    }
    (acc, ll.value())
}

/// Σ_s weight(s) · log p(s), the observed-data log-likelihood.
fn corpus_log_likelihood(vocab: &Vocabulary, prepped: &Prepped, dist: &UnigramDist) -> f64 {
    let parts: Vec<f64> = prepped
        .ranges
        .par_iter()
        .map(|range| {
            let mut ll = KahanSum::new();
            for i in range.clone() {
                let z = prepped.with_lattice(vocab, i, |lat| lat.forward_marginal(dist));
                ll.add(prepped.weights[i] * z);
            }
            ll.value()
        })
        .collect();
    kahan_total(&parts)
}

/// M-step: normalize expected counts. Multi-byte tokens with zero count get
/// probability zero; single-byte tokens get the floor instead (then the
/// whole vector is renormalized) so byte-level coverage survives.
fn m_step(counts: &CountAccumulator, vocab: &Vocabulary, floor_log_prob: f64) -> UnigramDist {
    let counts = counts.values();
    let total = kahan_total(counts);
    let mut lp: Vec<f64> = counts
        .iter()
        .map(|&c| if c > 0.0 { (c / total).ln() } else { f64::NEG_INFINITY })
        .collect();
    let mut floored = false;
    for (i, &c) in counts.iter().enumerate() {
        if c <= 0.0 && vocab.is_single_byte(i as u32) {
            lp[i] = floor_log_prob;
            floored = true;
        }
    }
    if floored {
        let mass = KahanSum::from_iter(lp.iter().map(|l| l.exp())).value();
        let log_mass = mass.ln();
        for l in &mut lp {
            if *l != f64::NEG_INFINITY {
                *l -= log_mass;
            }
        }
    }
    UnigramDist::from_log_probs_unchecked(lp)
}

fn run_em(
    vocab: &Vocabulary,
    prepped: &Prepped,
    init: UnigramDist,
    config: &EmConfig,
) -> (UnigramDist, EmTrace) {
    let mut dist = init;
    let mut trace = EmTrace::default();
    let mut last_tv: Option<f64> = None;
    for round in 0..config.max_rounds {
        let (counts, ll) = e_step(vocab, prepped, &dist);
        trace.rounds.push(EmRound {
            round,
            log_likelihood: ll,
            tv: last_tv,
        });
        let next = m_step(&counts, vocab, config.floor_log_prob);
        let tv = dist
            .tv_distance(&next)
            .expect("EM keeps the vocabulary fixed");
        dist = next;
        last_tv = Some(tv);
        trace.rounds_run = round + 1;
        if tv < config.tv_tolerance {
            break;
        }
    }
    trace.rounds.push(EmRound {
        round: trace.rounds_run,
        log_likelihood: corpus_log_likelihood(vocab, prepped, &dist),
        tv: last_tv,
    });
    (dist, trace)
}

/// Fit a unigram distribution to `corpus` by EM, starting from uniform.
///
/// Each round accumulates posterior-expected token counts over every string's
/// segmentation lattice and renormalizes. Stops after `max_rounds` or as soon
/// as consecutive rounds differ by less than `tv_tolerance` in total
/// variation. Fully deterministic for fixed inputs, independent of thread
/// count.
pub fn em_fit<S: AsRef<[u8]> + Sync>(
    vocab: &Vocabulary,
    corpus: &[S],
    config: &EmConfig,
) -> Result<(UnigramDist, EmTrace)> {
    config.validate()?;
    let prepped = Prepped::build(vocab, corpus)?;
    Ok(run_em(vocab, &prepped, UnigramDist::uniform(vocab.len()), config))
}

/// Learn a vocabulary: alternate a few EM rounds with pruning of the tokens
/// whose removal costs the corpus log-likelihood the least, until the size
/// reaches `prune.target_size`; then run one full EM fit on the survivors.
///
/// The loss of a multi-byte token v is estimated over the corpus's current
/// Viterbi segmentations: (occurrences of v) × (log 𝛟(v) − best log-prob of
/// segmenting v's bytes without using v). Single-byte tokens are never
/// pruned.
pub fn learn_vocab<S: AsRef<[u8]> + Sync>(
    corpus: &[S],
    seed_vocab: Vocabulary,
    prune: &PruneConfig,
    em: &EmConfig,
) -> Result<(Vocabulary, UnigramDist)> {
    prune.validate()?;
    em.validate()?;
    if seed_vocab.len() <= prune.target_size {
        return Err(Error::InvalidConfig(format!(
            "seed vocabulary ({} tokens) must exceed target_size ({})",
            seed_vocab.len(),
            prune.target_size
        )));
    }
    let mut vocab = seed_vocab;
    let mut dist = UnigramDist::uniform(vocab.len());
    loop {
        let prepped = Prepped::build(&vocab, corpus)?;
        let leg = EmConfig {
            max_rounds: prune.em_rounds_per_prune,
            ..em.clone()
        };
        dist = run_em(&vocab, &prepped, dist, &leg).0;
        let (next_vocab, next_dist) = prune_tokens(&vocab, &dist, &prepped, prune);
        log::info!("pruned vocabulary {} → {}", vocab.len(), next_vocab.len());
        let done = next_vocab.len() <= prune.target_size;
        vocab = next_vocab;
        dist = next_dist;
        if done {
            break;
        }
    }
    let (final_dist, _) = em_fit(&vocab, corpus, em)?;
    Ok((vocab, final_dist))
}

fn prune_tokens(
    vocab: &Vocabulary,
    dist: &UnigramDist,
    prepped: &Prepped,
    config: &PruneConfig,
) -> (Vocabulary, UnigramDist) {
    let v_len = vocab.len();

    // Token occurrence counts across the corpus's Viterbi segmentations.
    // Counts are integer-weighted sums, so parallel-shard merging is exact.
    let freq: Vec<f64> = prepped
        .ranges
        .par_iter()
        .map(|range| {
            let mut f = vec![0.0f64; v_len];
            for i in range.clone() {
                let (tokens, _) = prepped.with_lattice(vocab, i, |lat| lat.viterbi(dist));
                for t in tokens {
                    f[t as usize] += prepped.weights[i];
                }
            }
            f
        })
        .reduce(
            || vec![0.0f64; v_len],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    // Likelihood loss if each multi-byte token were removed.
    let mut candidates: Vec<(u32, f64)> = (0..v_len as u32)
        .into_par_iter()
        .filter(|&id| !vocab.is_single_byte(id))
        .map(|id| {
            let f = freq[id as usize];
            let lp = dist.log_prob(id);
            if f == 0.0 || lp == f64::NEG_INFINITY {
                return (id, 0.0);
            }
            let lat = Lattice::build(vocab, vocab.token(id))
                .expect("a token's own bytes are covered by at least itself");
            let alt = lat.viterbi_value_excluding(dist, id);
            if alt == f64::NEG_INFINITY {
                // No way to spell these bytes without the token: unprunable.
                (id, f64::INFINITY)
            } else {
                (id, f * (lp - alt))
            }
        })
        .collect();

    let n_single = v_len - candidates.len();
    let shrunk = (config.shrink_factor * v_len as f64).ceil() as usize;
    // Floor at target_size, and force strict progress for shrink factors so
    // close to 1 that ceil() would not move.
    let new_size = shrunk.max(config.target_size).min(v_len - 1);
    let multi_keep = new_size.saturating_sub(n_single);

    candidates.sort_unstable_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut survives = vec![false; v_len];
    for id in 0..v_len as u32 {
        if vocab.is_single_byte(id) {
            survives[id as usize] = true;
        }
    }
    for &(id, _) in candidates.iter().take(multi_keep) {
        survives[id as usize] = true;
    }

    let mut tokens = Vec::new();
    let mut kept_lp = Vec::new();
    for id in 0..v_len as u32 {
        if survives[id as usize] {
            tokens.push(vocab.token(id).to_vec());
            kept_lp.push(dist.log_prob(id));
        }
    }
    // Renormalize the survivors' probability mass.
    let mass = KahanSum::from_iter(kept_lp.iter().map(|l| l.exp())).value();
    let log_mass = mass.ln();
    for l in &mut kept_lp {
        if *l != f64::NEG_INFINITY {
            *l -= log_mass;
        }
    }
    let vocab = Vocabulary::from_tokens(tokens)
        .expect("survivors are a non-empty subset of unique tokens");
    (vocab, UnigramDist::from_log_probs_unchecked(kept_lp))
}
