//! Shared fixtures for the integration suites: a brute-force segmentation
//! oracle (exponential, fine for tiny cases) and a generator of artificial
//! languages with known unigram distributions.

#![allow(dead_code)] // each test target uses its own subset

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use unilid::corpus::{LabeledCorpus, Sample};
use unilid::lattice::UnigramDist;
use unilid::vocab::Vocabulary;

/// Every segmentation of `text`: each result is a token-id sequence whose
/// concatenated bytes reproduce the input.
pub fn enumerate_segmentations(vocab: &Vocabulary, text: &[u8]) -> Vec<Vec<u32>> {
    fn go(vocab: &Vocabulary, text: &[u8], pos: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == text.len() {
            out.push(cur.clone());
            return;
        }
        for (id, len) in vocab.match_prefixes(text, pos) {
            cur.push(id);
            go(vocab, text, pos + len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if !text.is_empty() {
        go(vocab, text, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Log-probability of one segmentation, summed back to front. The fold
/// direction matters: it reproduces the suffix dynamic program's exact
/// float associations, so maxima agree bitwise, not just approximately.
pub fn path_score(path: &[u32], dist: &UnigramDist) -> f64 {
    path.iter()
        .rev()
        .fold(0.0, |acc, &id| dist.log_prob(id) + acc)
}

/// Best segmentation by exhaustive search. `None` when the string has no
/// segmentation (or is empty).
///
/// The score is the maximum right-fold over all full paths; because float
/// addition is monotone, this equals the suffix dynamic program's value bit
/// for bit. The returned path is the fewest-token, then lexicographically
/// smallest sequence among paths that attain the brute-force suffix optimum
/// at *every* step (exact float equality). Restricting ties to
/// suffix-optimal paths matters: an outer addition can round away a one-ulp
/// difference between suffixes, making a suffix-suboptimal path's total
/// collide with the true optimum — no backward pass can prefer such a path.
pub fn oracle_viterbi(
    vocab: &Vocabulary,
    text: &[u8],
    dist: &UnigramDist,
) -> Option<(Vec<u32>, f64)> {
    if text.is_empty() {
        return None;
    }
    let mut best_suffix = vec![f64::NEG_INFINITY; text.len() + 1];
    best_suffix[text.len()] = 0.0;
    for p in (0..text.len()).rev() {
        let folds: Vec<f64> = enumerate_segmentations(vocab, &text[p..])
            .iter()
            .map(|path| path_score(path, dist))
            .collect();
        if folds.is_empty() {
            return None; // some byte past p is not in the vocabulary
        }
        best_suffix[p] = folds.into_iter().fold(f64::NEG_INFINITY, f64::max);
    }

    let suffix_optimal = |path: &Vec<u32>| -> bool {
        let mut p = 0usize;
        for &id in path {
            let q = p + vocab.token(id).len();
            if dist.log_prob(id) + best_suffix[q] != best_suffix[p] {
                return false;
            }
            p = q;
        }
        true
    };
    let path = enumerate_segmentations(vocab, text)
        .into_iter()
        .filter(suffix_optimal)
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .expect("the greedy suffix-optimal path always exists");
    Some((path, best_suffix[0]))
}

/// Total log-probability over all segmentations (log-sum-exp by exhaustive
/// search).
pub fn oracle_marginal(vocab: &Vocabulary, text: &[u8], dist: &UnigramDist) -> Option<f64> {
    let scores: Vec<f64> = enumerate_segmentations(vocab, text)
        .iter()
        .map(|p| path_score(p, dist))
        .collect();
    if scores.is_empty() {
        return None;
    }
    let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return Some(f64::NEG_INFINITY);
    }
    Some(m + scores.iter().map(|s| (s - m).exp()).sum::<f64>().ln())
}

/// Posterior-expected token occurrence counts over all segmentations.
pub fn oracle_expected_counts(
    vocab: &Vocabulary,
    text: &[u8],
    dist: &UnigramDist,
) -> Option<Vec<f64>> {
    let paths = enumerate_segmentations(vocab, text);
    let z = oracle_marginal(vocab, text, dist)?;
    let mut counts = vec![0.0; vocab.len()];
    if z == f64::NEG_INFINITY {
        return Some(counts); // no path has positive probability
    }
    for p in &paths {
        let w = (path_score(p, dist) - z).exp();
        for &id in p {
            counts[id as usize] += w;
        }
    }
    Some(counts)
}

/// One randomized oracle case: a small vocabulary over a tiny alphabet (so
/// lattices stay dense), a string over that alphabet, and a random strictly
/// positive distribution.
pub struct OracleCase {
    pub vocab: Vocabulary,
    pub text: Vec<u8>,
    pub dist: UnigramDist,
}

pub fn random_oracle_case(rng: &mut ChaCha8Rng) -> OracleCase {
    let alphabet_size = rng.random_range(2..=3usize);
    let alphabet = &b"abc"[..alphabet_size];

    // Single-byte coverage of the alphabet plus random multi-byte tokens,
    // capped at 12 tokens total.
    let mut tokens: Vec<Vec<u8>> = alphabet.iter().map(|&b| vec![b]).collect();
    let n_multi = rng.random_range(0..=(12 - alphabet_size));
    for _ in 0..n_multi {
        let len = rng.random_range(2..=4usize);
        let tok: Vec<u8> = (0..len)
            .map(|_| alphabet[rng.random_range(0..alphabet_size)])
            .collect();
        tokens.push(tok);
    }
    let (vocab, _) = Vocabulary::with_byte_coverage(tokens).unwrap();

    let text_len = rng.random_range(1..=12usize);
    let text: Vec<u8> = (0..text_len)
        .map(|_| alphabet[rng.random_range(0..alphabet_size)])
        .collect();

    let raw: Vec<f64> = (0..vocab.len()).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let dist =
        UnigramDist::from_log_probs(raw.iter().map(|r| (r / total).ln()).collect()).unwrap();
    OracleCase { vocab, text, dist }
}

/// Artificial languages drawn from known unigram distributions over one
/// shared vocabulary.
///
/// Language ℓ owns a marker byte; its tokens are the two-byte strings
/// `[marker_ℓ, payload]` over a payload alphabet shared by all languages.
/// Tokens therefore never straddle each other, the generating segmentation
/// is unambiguous, and languages are distinguishable while every token
/// remains reachable by the byte-level fallback.
pub struct Synthetic {
    pub vocab: Vocabulary,
    pub labels: Vec<String>,
    /// The generating distribution 𝛟* of each language, over the full
    /// vocabulary (zero off the language's own tokens).
    pub true_dists: Vec<UnigramDist>,
    pub train: LabeledCorpus,
    pub test: LabeledCorpus,
}

pub const SYNTH_LANGS: usize = 5;
pub const SYNTH_PAYLOADS: usize = 49;

pub fn synthetic_languages(n_train: usize, n_test: usize, seed: u64) -> Synthetic {
    // Everything ASCII so the byte strings survive the round trip through
    // `String` unchanged.
    let markers: [u8; SYNTH_LANGS] = *b"ABCDE";
    let payloads: Vec<u8> = (b'F'..=b'v').collect();
    assert_eq!(payloads.len(), SYNTH_PAYLOADS);

    // Shared vocabulary: every language's token block, then byte coverage.
    // 5 × 49 two-byte tokens + 256 single bytes = 501.
    let mut tokens: Vec<Vec<u8>> = Vec::new();
    for &m in &markers {
        for &p in &payloads {
            tokens.push(vec![m, p]);
        }
    }
    let (vocab, dups) = Vocabulary::with_byte_coverage(tokens).unwrap();
    assert_eq!(dups, 0);
    assert_eq!(vocab.len(), SYNTH_LANGS * SYNTH_PAYLOADS + 256);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<String> = markers.iter().map(|m| format!("lang-{}", *m as char)).collect();

    let mut true_dists = Vec::new();
    let mut own_token_ids: Vec<Vec<u32>> = Vec::new();
    for &marker in &markers {
        // Flat Dirichlet over the language's own tokens via exponentials.
        let weights: Vec<f64> = (0..SYNTH_PAYLOADS)
            .map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln())
            .collect();
        let total: f64 = weights.iter().sum();
        let mut probs = vec![0.0; vocab.len()];
        let ids: Vec<u32> = payloads
            .iter()
            .map(|&p| vocab.token_id(&[marker, p]).unwrap())
            .collect();
        for (&id, &w) in ids.iter().zip(&weights) {
            probs[id as usize] = w / total;
        }
        true_dists.push(UnigramDist::from_probs(&probs).unwrap());
        own_token_ids.push(ids);
    }

    let draw_string = |lang: usize, rng: &mut ChaCha8Rng| -> String {
        // 10–40 two-byte tokens: 20–80 bytes.
        let n_tokens = rng.random_range(10..=40usize);
        let ids = &own_token_ids[lang];
        let dist = &true_dists[lang];
        let mut cdf = Vec::with_capacity(ids.len());
        let mut acc = 0.0;
        for &id in ids {
            acc += dist.prob(id);
            cdf.push(acc);
        }
        let mut bytes = Vec::with_capacity(2 * n_tokens);
        for _ in 0..n_tokens {
            let u = rng.random::<f64>() * acc;
            let k = cdf.partition_point(|&c| c < u).min(ids.len() - 1);
            bytes.extend_from_slice(vocab.token(ids[k]));
        }
        String::from_utf8(bytes).expect("marker and payload bytes are ASCII")
    };

    let make_corpus = |n_per: usize, rng: &mut ChaCha8Rng| -> LabeledCorpus {
        let mut samples = Vec::with_capacity(n_per * SYNTH_LANGS);
        for (lang, label) in labels.iter().enumerate() {
            for _ in 0..n_per {
                samples.push(Sample::new(draw_string(lang, rng), label).unwrap());
            }
        }
        LabeledCorpus::from_samples(samples)
    };

    let train = make_corpus(n_train, &mut rng);
    let test = make_corpus(n_test, &mut rng);
    Synthetic {
        vocab,
        labels,
        true_dists,
        train,
        test,
    }
}

/// A vocabulary of `n_multi` distinct random tokens (2–`max_len` bytes)
/// plus full byte coverage, for scaling experiments.
pub fn random_token_vocab(n_multi: usize, max_len: usize, seed: u64) -> Vocabulary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::new();
    let mut tokens = Vec::with_capacity(n_multi);
    while tokens.len() < n_multi {
        let len = rng.random_range(2..=max_len);
        let tok: Vec<u8> = (0..len).map(|_| rng.random::<u8>()).collect();
        if seen.insert(tok.clone()) {
            tokens.push(tok);
        }
    }
    Vocabulary::with_byte_coverage(tokens).unwrap().0
}
