//! The segmentation lattice: a DAG whose source-to-sink paths are exactly the
//! valid segmentations of a string, built once per string and then scored
//! against any number of unigram distributions.
//!
//! All probability arithmetic is in natural-log space; products over many
//! tokens underflow otherwise.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::num::{kahan_total, log_add_exp, KahanSum};
use crate::vocab::Vocabulary;

/// Tolerance for the simplex invariant: Σ exp(log_probs) must equal 1 within
/// this much.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// A categorical distribution over a vocabulary, stored as natural-log
/// probabilities. `NEG_INFINITY` marks tokens with probability exactly zero
/// (pruned or never seen).
#[derive(Debug, Clone, PartialEq)]
pub struct UnigramDist {
    log_probs: Vec<f64>,
}

impl UnigramDist {
    /// The uniform distribution over `n` tokens.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution needs at least one token");
        Self {
            log_probs: vec![-(n as f64).ln(); n],
        }
    }

    pub fn from_probs(probs: &[f64]) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInput("probability vector".into()));
        }
        for &p in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!(
                    "probability {p} outside [0, 1]"
                )));
            }
        }
        let lp = probs
            .iter()
            .map(|&p| if p == 0.0 { f64::NEG_INFINITY } else { p.ln() })
            .collect();
        Self::from_log_probs(lp)
    }

    pub fn from_log_probs(log_probs: Vec<f64>) -> Result<Self> {
        if log_probs.is_empty() {
            return Err(Error::EmptyInput("log-probability vector".into()));
        }
        if log_probs.iter().any(|lp| lp.is_nan() || *lp == f64::INFINITY) {
            return Err(Error::InvalidConfig(
                "log probabilities must be finite or -inf".into(),
            ));
        }
        let mass = KahanSum::from_iter(log_probs.iter().map(|lp| lp.exp()));
        if (mass.value() - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::NotNormalized {
                sum: mass.value(),
                tolerance: SIMPLEX_TOLERANCE,
            });
        }
        Ok(Self { log_probs })
    }

    /// Internal constructor for vectors the EM loop has just normalized
    /// itself.
    pub(crate) fn from_log_probs_unchecked(log_probs: Vec<f64>) -> Self {
        debug_assert!(
            (kahan_total(&log_probs.iter().map(|lp| lp.exp()).collect::<Vec<_>>()) - 1.0).abs()
                <= SIMPLEX_TOLERANCE
        );
        Self { log_probs }
    }

    pub fn len(&self) -> usize {
        self.log_probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_probs.is_empty()
    }

    #[inline]
    pub fn log_prob(&self, id: u32) -> f64 {
        self.log_probs[id as usize]
    }

    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn prob(&self, id: u32) -> f64 {
        self.log_probs[id as usize].exp()
    }

    /// Total variation distance ½ Σ |p − q|, in [0, 1].
    pub fn tv_distance(&self, other: &UnigramDist) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let mut acc = KahanSum::new();
        for (a, b) in self.log_probs.iter().zip(&other.log_probs) {
            acc.add((a.exp() - b.exp()).abs());
        }
        Ok(0.5 * acc.value())
    }
}

/// Per-token expected-count accumulator with compensated summation, so that
/// sharded E-steps merge to bit-identical totals in any chunking.
#[derive(Debug, Clone)]
pub struct CountAccumulator {
    sums: Vec<f64>,
    comps: Vec<f64>,
}

impl CountAccumulator {
    pub fn new(vocab_size: usize) -> Self {
        Self {
            sums: vec![0.0; vocab_size],
            comps: vec![0.0; vocab_size],
        }
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    #[inline]
    pub fn add(&mut self, id: u32, x: f64) {
        let i = id as usize;
        let y = x - self.comps[i];
        let t = self.sums[i] + y;
        self.comps[i] = (t - self.sums[i]) - y;
        self.sums[i] = t;
    }

    /// Fold another accumulator in. Callers are responsible for merging in a
    /// fixed order when determinism matters.
    pub fn merge(&mut self, other: &CountAccumulator) {
        assert_eq!(self.sums.len(), other.sums.len(), "accumulator size mismatch");
        for i in 0..other.sums.len() {
            let id = i as u32;
            self.add(id, other.sums[i]);
            if other.comps[i] != 0.0 {
                self.add(id, -other.comps[i]);
            }
        }
    }

    pub fn value(&self, id: u32) -> f64 {
        self.sums[id as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.sums
    }
}

/// Segmentation lattice of one string. Nodes are byte positions `0..=n`;
/// an edge `(p → q, v)` exists iff token `v` equals `text[p..q]`. Edges are
/// stored in CSR form grouped by start position.
#[derive(Debug, Clone)]
pub struct Lattice {
    n: usize,
    vocab_size: usize,
    start_lo: Vec<u32>,
    edge_token: Vec<u32>,
    edge_end: Vec<u32>,
}

impl Lattice {
    /// Walk the trie at every byte position: O(n · t_max) lookups.
    pub fn build(vocab: &Vocabulary, text: &[u8]) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::EmptyInput("cannot build a lattice for empty text".into()));
        }
        let n = text.len();
        let mut start_lo = Vec::with_capacity(n + 1);
        let mut edge_token = Vec::new();
        let mut edge_end = Vec::new();
        for pos in 0..n {
            start_lo.push(edge_token.len() as u32);
            vocab.for_each_prefix(text, pos, |id, len| {
                edge_token.push(id);
                edge_end.push((pos + len) as u32);
            });
            if edge_token.len() == start_lo[pos] as usize {
                return Err(Error::NoCoverage {
                    pos,
                    byte: text[pos],
                });
            }
        }
        start_lo.push(edge_token.len() as u32);
        Ok(Self {
            n,
            vocab_size: vocab.len(),
            start_lo,
            edge_token,
            edge_end,
        })
    }

    /// String length in bytes (`n`; nodes run `0..=n`).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_token.len()
    }

    /// Edges leaving byte position `p` as `(token_id, end_position)`.
    pub fn edges_from(&self, p: usize) -> impl Iterator<Item = (u32, usize)> + '_ {
        let lo = self.start_lo[p] as usize;
        let hi = self.start_lo[p + 1] as usize;
        (lo..hi).map(move |e| (self.edge_token[e], self.edge_end[e] as usize))
    }

    #[inline]
    fn edge_range(&self, p: usize) -> std::ops::Range<usize> {
        self.start_lo[p] as usize..self.start_lo[p + 1] as usize
    }

    fn check_dist(&self, dist: &UnigramDist) {
        assert_eq!(
            dist.len(),
            self.vocab_size,
            "distribution size does not match the vocabulary this lattice was built from"
        );
    }

    /// Fill `best[p]` with the max log-probability over paths p → n
    /// (`best[n] = 0`). This exact loop backs both `viterbi` and
    /// `score_all`, so their values agree bit-for-bit.
    fn suffix_best(&self, dist: &UnigramDist, best: &mut Vec<f64>) {
        best.clear();
        best.resize(self.n + 1, f64::NEG_INFINITY);
        best[self.n] = 0.0;
        for p in (0..self.n).rev() {
            let mut b = f64::NEG_INFINITY;
            for e in self.edge_range(p) {
                let v = dist.log_prob(self.edge_token[e]) + best[self.edge_end[e] as usize];
                if v > b {
                    b = v;
                }
            }
            best[p] = b;
        }
    }

    /// Max-segmentation log-probability (the value half of [`Self::viterbi`]).
    pub fn viterbi_value(&self, dist: &UnigramDist) -> f64 {
        self.check_dist(dist);
        let mut best = Vec::new();
        self.suffix_best(dist, &mut best);
        best[0]
    }

    /// Best path with the banned token's edges removed. Backs the pruning
    /// loss: "what would this token's occurrences cost if segmented some
    /// other way".
    pub(crate) fn viterbi_value_excluding(&self, dist: &UnigramDist, banned: u32) -> f64 {
        self.check_dist(dist);
        let mut best = vec![f64::NEG_INFINITY; self.n + 1];
        best[self.n] = 0.0;
        for p in (0..self.n).rev() {
            let mut b = f64::NEG_INFINITY;
            for e in self.edge_range(p) {
                if self.edge_token[e] == banned {
                    continue;
                }
                let v = dist.log_prob(self.edge_token[e]) + best[self.edge_end[e] as usize];
                if v > b {
                    b = v;
                }
            }
            best[p] = b;
        }
        best[0]
    }

    /// Most probable segmentation and its log-probability.
    ///
    /// Among segmentations that attain the optimum at every suffix
    /// comparison (exact float equality), ties break toward fewer tokens,
    /// then the lexicographically smallest token-id sequence, so the result
    /// is fully deterministic. Paths through probability-zero edges lose to
    /// any finite path.
    pub fn viterbi(&self, dist: &UnigramDist) -> (Vec<u32>, f64) {
        self.check_dist(dist);
        let n = self.n;
        let mut best = Vec::new();
        self.suffix_best(dist, &mut best);

        // Minimum token count among probability-optimal suffix paths.
        // Comparisons against best[] are exact: every candidate below is the
        // same `w + best[q]` expression suffix_best maximized over.
        let mut mincnt = vec![0u32; n + 1];
        for p in (0..n).rev() {
            let mut c = u32::MAX;
            for e in self.edge_range(p) {
                let q = self.edge_end[e] as usize;
                if dist.log_prob(self.edge_token[e]) + best[q] == best[p] {
                    c = c.min(1 + mincnt[q]);
                }
            }
            mincnt[p] = c;
        }

        let mut tokens = Vec::new();
        let mut p = 0usize;
        while p < n {
            let mut chosen: Option<(u32, usize)> = None;
            for e in self.edge_range(p) {
                let t = self.edge_token[e];
                let q = self.edge_end[e] as usize;
                if dist.log_prob(t) + best[q] == best[p] && 1 + mincnt[q] == mincnt[p] {
                    match chosen {
                        Some((ct, _)) if ct <= t => {}
                        _ => chosen = Some((t, q)),
                    }
                }
            }
            let (t, q) = chosen.expect("coverage guarantees an optimal edge at every position");
            tokens.push(t);
            p = q;
        }
        (tokens, best[0])
    }

    /// log Σ over all segmentations of Π 𝛟[v]: a forward pass with
    /// log-sum-exp at every node. Always ≥ the viterbi value.
    pub fn forward_marginal(&self, dist: &UnigramDist) -> f64 {
        self.check_dist(dist);
        self.forward(dist).1
    }

    fn forward(&self, dist: &UnigramDist) -> (Vec<f64>, f64) {
        let n = self.n;
        let mut fwd = vec![f64::NEG_INFINITY; n + 1];
        fwd[0] = 0.0;
        for p in 0..n {
            let f = fwd[p];
            if f == f64::NEG_INFINITY {
                continue; // position unreachable from the source
            }
            for e in self.edge_range(p) {
                let q = self.edge_end[e] as usize;
                fwd[q] = log_add_exp(fwd[q], f + dist.log_prob(self.edge_token[e]));
            }
        }
        let z = fwd[n];
        (fwd, z)
    }

    /// Accumulate posterior-expected token counts for this string:
    /// ĉ(v) = Σ_paths p(path | string) · count(v in path), computed by
    /// forward–backward with per-edge posteriors
    /// exp(fwd[p] + log𝛟[v] + bwd[q] − fwd[n]).
    pub fn expected_counts(&self, dist: &UnigramDist, acc: &mut CountAccumulator) {
        self.expected_counts_weighted(dist, 1.0, acc);
    }

    /// Weighted variant (for corpora with duplicate strings folded into
    /// multiplicities). Returns the string's log marginal, which the EM
    /// round's likelihood bookkeeping wants anyway.
    pub(crate) fn expected_counts_weighted(
        &self,
        dist: &UnigramDist,
        weight: f64,
        acc: &mut CountAccumulator,
    ) -> f64 {
        self.check_dist(dist);
        assert_eq!(acc.len(), self.vocab_size, "accumulator size mismatch");
        let n = self.n;
        let (fwd, z) = self.forward(dist);
        if z == f64::NEG_INFINITY {
            // Every path has probability zero; there is no posterior.
            return z;
        }
        let mut bwd = vec![f64::NEG_INFINITY; n + 1];
        bwd[n] = 0.0;
        for p in (0..n).rev() {
            let mut b = f64::NEG_INFINITY;
            for e in self.edge_range(p) {
                b = log_add_exp(
                    b,
                    dist.log_prob(self.edge_token[e]) + bwd[self.edge_end[e] as usize],
                );
            }
            bwd[p] = b;
        }
        for (p, &f) in fwd.iter().enumerate().take(n) {
            if f == f64::NEG_INFINITY {
                continue;
            }
            for e in self.edge_range(p) {
                let t = self.edge_token[e];
                let lw = f + dist.log_prob(t) + bwd[self.edge_end[e] as usize] - z;
                if lw != f64::NEG_INFINITY {
                    acc.add(t, weight * lw.exp());
                }
            }
        }
        z
    }

    /// Max-segmentation log-probability under every distribution, reusing
    /// this one lattice. Element `i` equals `viterbi(dists[i]).1` exactly.
    pub fn score_all(&self, dists: &[UnigramDist]) -> Vec<f64> {
        dists.par_iter().map(|d| self.viterbi_value(d)).collect()
    }

    /// GraphViz rendering for debugging.
    pub fn to_dot(&self, vocab: &Vocabulary) -> String {
        use std::fmt::Write;
        let mut out = String::from("digraph lattice {\n  rankdir=LR;\n");
        for p in 0..=self.n {
            let _ = writeln!(out, "  n{p} [shape=circle,label=\"{p}\"];");
        }
        for p in 0..self.n {
            for (t, q) in self.edges_from(p) {
                let label = crate::vocab::escape_token(vocab.token(t)).replace('"', "\\\"");
                let _ = writeln!(out, "  n{p} -> n{q} [label=\"{label} ({t})\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(tokens: &[&str]) -> Vocabulary {
        Vocabulary::from_tokens(tokens.iter().map(|t| t.as_bytes().to_vec()).collect()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn build_enumerates_expected_edges() {
        let v = vocab(&["a", "b", "ab"]);
        let lat = Lattice::build(&v, b"ab").unwrap();
        assert_eq!(lat.n(), 2);
        assert_eq!(lat.edge_count(), 3);
        let e0: Vec<_> = lat.edges_from(0).collect();
        assert_eq!(e0, vec![(0, 1), (2, 2)]);
        let e1: Vec<_> = lat.edges_from(1).collect();
        assert_eq!(e1, vec![(1, 2)]);
    }

    #[test]
    fn build_rejects_empty_and_uncovered_text() {
        let v = vocab(&["a", "b", "ab"]);
        assert!(matches!(
            Lattice::build(&v, b""),
            Err(Error::EmptyInput(_))
        ));
        assert!(matches!(
            Lattice::build(&v, b"az"),
            Err(Error::NoCoverage { pos: 1, byte: b'z' })
        ));
    }

    #[test]
    fn viterbi_picks_the_single_token_when_it_wins() {
        let v = vocab(&["a", "b", "ab"]);
        let lat = Lattice::build(&v, b"ab").unwrap();
        let d = UnigramDist::from_probs(&[0.4, 0.4, 0.2]).unwrap();
        let (tokens, lp) = lat.viterbi(&d);
        assert_eq!(tokens, vec![2]); // 0.2 beats 0.4 × 0.4
        assert!(close(lp, 0.2f64.ln(), 1e-12));

        let u = UnigramDist::uniform(3);
        let (tokens, lp) = lat.viterbi(&u);
        assert_eq!(tokens, vec![2]); // 1/3 beats 1/9
        assert!(close(lp, (1.0f64 / 3.0).ln(), 1e-12));
    }

    #[test]
    fn viterbi_tokens_reconstruct_the_input() {
        let v = vocab(&["a", "b", "ab", "ba", "aba"]);
        let lat = Lattice::build(&v, b"ababa").unwrap();
        let d = UnigramDist::uniform(5);
        let (tokens, _) = lat.viterbi(&d);
        let bytes: Vec<u8> = tokens.iter().flat_map(|&t| v.token(t).to_vec()).collect();
        assert_eq!(bytes, b"ababa");
    }

    #[test]
    fn viterbi_tie_prefers_fewer_tokens() {
        // ⟨a,a⟩ and ⟨aa⟩ tie exactly: lp(aa) is constructed as 2·lp(a), and
        // both path sums reduce to the same float.
        let v = vocab(&["a", "aa", "b"]);
        let l = 0.5f64.ln();
        let d = UnigramDist::from_log_probs(vec![l, 2.0 * l, 0.25f64.ln()]).unwrap();
        let lat = Lattice::build(&v, b"aa").unwrap();
        let (tokens, lp) = lat.viterbi(&d);
        assert_eq!(tokens, vec![1]);
        assert_eq!(lp, 2.0 * l);
    }

    #[test]
    fn viterbi_tie_prefers_lexicographically_smaller_token_ids() {
        // ⟨a,bc⟩ (ids [0,4]) vs ⟨ab,c⟩ (ids [3,2]): same probability (the
        // same two floats added in either order), same length.
        let v = vocab(&["a", "b", "c", "ab", "bc"]);
        let d = UnigramDist::from_probs(&[0.125, 0.25, 0.125, 0.25, 0.25]).unwrap();
        let lat = Lattice::build(&v, b"abc").unwrap();
        let (tokens, _) = lat.viterbi(&d);
        assert_eq!(tokens, vec![0, 4]);
    }

    #[test]
    fn viterbi_avoids_zero_probability_edges_when_it_can() {
        let v = vocab(&["a", "b", "ab"]);
        let d = UnigramDist::from_probs(&[0.5, 0.5, 0.0]).unwrap();
        let lat = Lattice::build(&v, b"ab").unwrap();
        let (tokens, lp) = lat.viterbi(&d);
        assert_eq!(tokens, vec![0, 1]);
        assert!(lp.is_finite());
    }

    #[test]
    fn forward_marginal_sums_over_paths() {
        let v = vocab(&["a", "b", "ab"]);
        let lat = Lattice::build(&v, b"ab").unwrap();
        let u = UnigramDist::uniform(3);
        // Two paths: 1/9 + 1/3 = 4/9.
        assert!(close(lat.forward_marginal(&u), (4.0f64 / 9.0).ln(), 1e-12));
        // Single-path string: marginal equals the (only) path probability.
        let single = Lattice::build(&v, b"a").unwrap();
        assert!(close(single.forward_marginal(&u), (1.0f64 / 3.0).ln(), 1e-12));
    }

    #[test]
    fn forward_marginal_dominates_viterbi() {
        let v = vocab(&["a", "b", "ab", "ba"]);
        let d = UnigramDist::from_probs(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        for text in [&b"ab"[..], b"aba", b"bab", b"aabb"] {
            let lat = Lattice::build(&v, text).unwrap();
            let (_, vit) = lat.viterbi(&d);
            assert!(lat.forward_marginal(&d) >= vit);
        }
    }

    #[test]
    fn expected_counts_match_hand_computed_posterior() {
        let v = vocab(&["a", "b", "ab"]);
        let lat = Lattice::build(&v, b"ab").unwrap();
        let u = UnigramDist::uniform(3);
        let mut acc = CountAccumulator::new(3);
        lat.expected_counts(&u, &mut acc);
        // Path ⟨a,b⟩ has posterior 1/4, path ⟨ab⟩ has 3/4.
        assert!(close(acc.value(0), 0.25, 1e-12));
        assert!(close(acc.value(1), 0.25, 1e-12));
        assert!(close(acc.value(2), 0.75, 1e-12));
    }

    #[test]
    fn expected_counts_conserve_byte_mass() {
        let v = vocab(&["a", "b", "ab", "ba", "aab"]);
        let d = UnigramDist::from_probs(&[0.3, 0.2, 0.2, 0.2, 0.1]).unwrap();
        for text in [&b"aab"[..], b"abab", b"baaab"] {
            let lat = Lattice::build(&v, text).unwrap();
            let mut acc = CountAccumulator::new(5);
            lat.expected_counts(&d, &mut acc);
            let mass: f64 = (0..5u32)
                .map(|t| acc.value(t) * v.token(t).len() as f64)
                .sum();
            assert!(close(mass, text.len() as f64, 1e-9), "mass {mass} for {text:?}");
        }
    }

    #[test]
    fn score_all_equals_per_language_viterbi_exactly() {
        let v = vocab(&["a", "b", "ab"]);
        let lat = Lattice::build(&v, b"aa").unwrap();
        let d1 = UnigramDist::from_probs(&[0.7, 0.1, 0.2]).unwrap();
        let d2 = UnigramDist::from_probs(&[0.1, 0.7, 0.2]).unwrap();
        let scores = lat.score_all(&[d1.clone(), d2.clone()]);
        assert_eq!(scores[0], lat.viterbi(&d1).1);
        assert_eq!(scores[1], lat.viterbi(&d2).1);
        assert!(close(scores[0], 0.49f64.ln(), 1e-12));
        assert!(close(scores[1], 0.01f64.ln(), 1e-12));
        // Permuting distributions permutes outputs.
        let flipped = lat.score_all(&[d2, d1]);
        assert_eq!(flipped[0], scores[1]);
        assert_eq!(flipped[1], scores[0]);
    }

    #[test]
    fn count_accumulator_merge_is_exact_for_chunked_sums() {
        let mut whole = CountAccumulator::new(2);
        let xs = [1.0, 1e-16, 1e-16, 2.5, 1e-16, 3.0];
        for &x in &xs {
            whole.add(0, x);
        }
        let mut left = CountAccumulator::new(2);
        let mut right = CountAccumulator::new(2);
        for &x in &xs[..3] {
            left.add(0, x);
        }
        for &x in &xs[3..] {
            right.add(0, x);
        }
        let mut merged = CountAccumulator::new(2);
        merged.merge(&left);
        merged.merge(&right);
        assert_eq!(merged.value(0), whole.value(0));
    }

    #[test]
    fn tv_distance_matches_hand_values() {
        let u = UnigramDist::uniform(3);
        let d = UnigramDist::from_probs(&[0.2, 0.2, 0.6]).unwrap();
        let tv = u.tv_distance(&d).unwrap();
        assert!(close(tv, 4.0 / 15.0, 1e-12)); // ½(2/15 + 2/15 + 4/15)
        assert_eq!(d.tv_distance(&d).unwrap(), 0.0);
        let p = UnigramDist::from_probs(&[1.0, 0.0]).unwrap();
        let q = UnigramDist::from_probs(&[0.0, 1.0]).unwrap();
        assert!(close(p.tv_distance(&q).unwrap(), 1.0, 1e-12));
        assert!(UnigramDist::uniform(2).tv_distance(&u).is_err());
    }

    #[test]
    fn dist_constructors_validate_the_simplex() {
        assert!(UnigramDist::from_probs(&[0.5, 0.6]).is_err());
        assert!(UnigramDist::from_probs(&[0.5, -0.1]).is_err());
        assert!(UnigramDist::from_log_probs(vec![0.0, f64::NAN]).is_err());
        assert!(UnigramDist::from_probs(&[]).is_err());
        let d = UnigramDist::from_probs(&[0.25, 0.75]).unwrap();
        assert!(close(d.prob(1), 0.75, 1e-15));
    }

    #[test]
    fn dot_output_mentions_every_edge() {
        let v = vocab(&["a", "b", "ab"]);
        let lat = Lattice::build(&v, b"ab").unwrap();
        let dot = lat.to_dot(&v);
        assert!(dot.contains("n0 -> n2 [label=\"ab (2)\"]"));
        assert!(dot.contains("n1 -> n2 [label=\"b (1)\"]"));
    }
}
