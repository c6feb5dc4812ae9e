//! The shared token vocabulary: byte-string tokens, a prefix trie for
//! longest-match walks, seed construction from corpora, and a plain-text
//! import/export format.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::LabeledCorpus;
use crate::error::{Error, Result};

const NO_TOKEN: u32 = u32::MAX;
const NO_NODE: u32 = u32::MAX;

/// Configuration for [`build_seed_vocab`].
#[derive(Debug, Clone)]
pub struct SeedVocabConfig {
    /// Size the vocabulary will eventually be pruned down to.
    pub target_size: usize,
    /// The seed keeps `seed_multiplier × target_size` substrings.
    pub seed_multiplier: usize,
    /// Longest substring considered, in bytes.
    pub max_token_len: usize,
}

impl Default for SeedVocabConfig {
    fn default() -> Self {
        Self {
            target_size: 100_000,
            seed_multiplier: 4,
            max_token_len: 16,
        }
    }
}

impl SeedVocabConfig {
    pub fn validate(&self) -> Result<()> {
        if self.target_size < 256 {
            return Err(Error::InvalidConfig(format!(
                "target_size must be ≥ 256 (one slot per byte), got {}",
                self.target_size
            )));
        }
        if self.seed_multiplier < 1 {
            return Err(Error::InvalidConfig("seed_multiplier must be ≥ 1".into()));
        }
        if self.max_token_len < 1 {
            return Err(Error::InvalidConfig("max_token_len must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// Flat-array prefix trie over token bytes.
///
/// Nodes are numbered in insertion order with 0 as the root; each node's
/// children sit in one contiguous, byte-sorted slice of the edge arrays.
/// The root additionally gets a direct 256-entry dispatch table since every
/// single lattice edge enumeration starts there.
#[derive(Debug, Clone)]
struct Trie {
    root_child: Box<[u32; 256]>,
    edge_lo: Vec<u32>,
    edge_byte: Vec<u8>,
    edge_child: Vec<u32>,
    token_at: Vec<u32>,
}

impl Trie {
    fn build(tokens: &[Box<[u8]>]) -> Self {
        #[derive(Default)]
        struct TmpNode {
            children: Vec<(u8, u32)>, // sorted by byte
            token: u32,
        }
        let mut nodes: Vec<TmpNode> = vec![TmpNode {
            children: Vec::new(),
            token: NO_TOKEN,
        }];
        for (id, tok) in tokens.iter().enumerate() {
            let mut cur = 0usize;
            for &b in tok.iter() {
                cur = match nodes[cur].children.binary_search_by_key(&b, |e| e.0) {
                    Ok(i) => nodes[cur].children[i].1 as usize,
                    Err(i) => {
                        let next = nodes.len() as u32;
                        nodes[cur].children.insert(i, (b, next));
                        nodes.push(TmpNode {
                            children: Vec::new(),
                            token: NO_TOKEN,
                        });
                        next as usize
                    }
                };
            }
            nodes[cur].token = id as u32;
        }

        let n_edges: usize = nodes.iter().map(|n| n.children.len()).sum();
        let mut edge_lo = Vec::with_capacity(nodes.len() + 1);
        let mut edge_byte = Vec::with_capacity(n_edges);
        let mut edge_child = Vec::with_capacity(n_edges);
        let mut token_at = Vec::with_capacity(nodes.len());
        edge_lo.push(0);
        for node in &nodes {
            for &(b, c) in &node.children {
                edge_byte.push(b);
                edge_child.push(c);
            }
            edge_lo.push(edge_byte.len() as u32);
            token_at.push(node.token);
        }
        let mut root_child = Box::new([NO_NODE; 256]);
        for &(b, c) in &nodes[0].children {
            root_child[b as usize] = c;
        }
        Self {
            root_child,
            edge_lo,
            edge_byte,
            edge_child,
            token_at,
        }
    }

    #[inline]
    fn child(&self, node: u32, b: u8) -> u32 {
        let lo = self.edge_lo[node as usize] as usize;
        let hi = self.edge_lo[node as usize + 1] as usize;
        match self.edge_byte[lo..hi].binary_search(&b) {
            Ok(i) => self.edge_child[lo + i],
            Err(_) => NO_NODE,
        }
    }
}

/// Immutable token inventory with dense ids `0..len` and a prefix trie.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    tokens: Vec<Box<[u8]>>,
    trie: Trie,
    t_max: usize,
}

impl Vocabulary {
    /// Build from an explicit token list; ids follow list order.
    ///
    /// Tokens must be non-empty and unique. No byte-coverage augmentation
    /// happens here — this is the constructor for exact, already-complete
    /// token sets (model deserialization, tests).
    pub fn from_tokens(tokens: Vec<Vec<u8>>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::EmptyInput("vocabulary token list".into()));
        }
        if tokens.len() >= NO_TOKEN as usize {
            return Err(Error::InvalidConfig(format!(
                "vocabulary of {} tokens exceeds the id space",
                tokens.len()
            )));
        }
        let mut seen: HashSet<&[u8]> = HashSet::with_capacity(tokens.len());
        for tok in &tokens {
            if tok.is_empty() {
                return Err(Error::InvalidToken("empty token".into()));
            }
            if !seen.insert(tok.as_slice()) {
                return Err(Error::InvalidToken(format!(
                    "duplicate token {:?}",
                    escape_token(tok)
                )));
            }
        }
        let tokens: Vec<Box<[u8]>> = tokens.into_iter().map(Vec::into_boxed_slice).collect();
        let t_max = tokens.iter().map(|t| t.len()).max().unwrap_or(0);
        let trie = Trie::build(&tokens);
        Ok(Self {
            tokens,
            trie,
            t_max,
        })
    }

    /// Deduplicate `tokens` (keeping first appearance), append any of the 256
    /// single-byte tokens that are missing, and build. Returns the vocabulary
    /// and the number of duplicate entries dropped.
    pub fn with_byte_coverage(tokens: Vec<Vec<u8>>) -> Result<(Self, usize)> {
        let mut seen: HashSet<Vec<u8>> = HashSet::with_capacity(tokens.len() + 256);
        let mut uniq: Vec<Vec<u8>> = Vec::with_capacity(tokens.len() + 256);
        let mut dups = 0usize;
        for tok in tokens {
            if tok.is_empty() {
                return Err(Error::InvalidToken("empty token".into()));
            }
            if seen.insert(tok.clone()) {
                uniq.push(tok);
            } else {
                dups += 1;
            }
        }
        for b in 0..=255u8 {
            if !seen.contains(std::slice::from_ref(&b)) {
                uniq.push(vec![b]);
            }
        }
        Ok((Self::from_tokens(uniq)?, dups))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Byte length of the longest token.
    pub fn t_max(&self) -> usize {
        self.t_max
    }

    pub fn token(&self, id: u32) -> &[u8] {
        &self.tokens[id as usize]
    }

    pub fn tokens(&self) -> impl Iterator<Item = &[u8]> {
        self.tokens.iter().map(|t| t.as_ref())
    }

    #[inline]
    pub fn is_single_byte(&self, id: u32) -> bool {
        self.tokens[id as usize].len() == 1
    }

    /// Exact-match lookup.
    pub fn token_id(&self, token: &[u8]) -> Option<u32> {
        if token.is_empty() {
            return None;
        }
        let mut node = self.trie.root_child[token[0] as usize];
        for &b in &token[1..] {
            if node == NO_NODE {
                return None;
            }
            node = self.trie.child(node, b);
        }
        if node == NO_NODE {
            return None;
        }
        match self.trie.token_at[node as usize] {
            NO_TOKEN => None,
            id => Some(id),
        }
    }

    /// All tokens that are prefixes of `text[pos..]`, as `(token_id, byte
    /// length)` in increasing length order.
    pub fn match_prefixes(&self, text: &[u8], pos: usize) -> Vec<(u32, usize)> {
        let mut out = Vec::new();
        self.for_each_prefix(text, pos, |id, len| out.push((id, len)));
        out
    }

    /// Non-allocating prefix walk; the lattice builder's inner loop.
    #[inline]
    pub(crate) fn for_each_prefix(&self, text: &[u8], pos: usize, mut f: impl FnMut(u32, usize)) {
        debug_assert!(pos < text.len());
        let mut node = self.trie.root_child[text[pos] as usize];
        if node == NO_NODE {
            return;
        }
        let max_len = self.t_max.min(text.len() - pos);
        let mut len = 1;
        loop {
            let tok = self.trie.token_at[node as usize];
            if tok != NO_TOKEN {
                f(tok, len);
            }
            if len == max_len {
                return;
            }
            node = self.trie.child(node, text[pos + len]);
            if node == NO_NODE {
                return;
            }
            len += 1;
        }
    }

    /// Canonical one-token-per-line text form (see [`escape_token`]).
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for tok in &self.tokens {
            out.push_str(&escape_token(tok));
            out.push('\n');
        }
        out
    }

    pub fn export(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io_err = |source| Error::Io {
            path: path.to_owned(),
            source,
        };
        let mut f = File::create(path).map_err(io_err)?;
        f.write_all(self.to_file_string().as_bytes()).map_err(io_err)
    }
}

/// Most frequent substrings of the corpus (length ≤ `max_token_len`), capped
/// at `seed_multiplier × target_size`, always augmented with all 256
/// single-byte tokens. Ordering is count descending, then length descending,
/// then bytes ascending — fully deterministic.
pub fn build_seed_vocab(corpus: &LabeledCorpus, config: &SeedVocabConfig) -> Result<Vocabulary> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyInput("seed vocabulary corpus".into()));
    }
    let cap = config.seed_multiplier * config.target_size;
    let ranked = top_substrings(corpus, config.max_token_len, cap);
    let tokens: Vec<Vec<u8>> = ranked.into_iter().map(|(t, _)| t.to_vec()).collect();
    let (vocab, _) = Vocabulary::with_byte_coverage(tokens)?;
    Ok(vocab)
}

/// Exact top-`cap` substrings by (count desc, length desc, bytes asc).
///
/// Counting all substrings up to length 16 of a large corpus in one map is
/// memory-hostile (most long windows are unique). Instead we go length by
/// length and prune with the a-priori rule: a substring is at least as rare
/// as its own prefix, so once we know the running cap-th best count θ, any
/// length-k substring whose (k−1)-prefix fell below θ can never reach the
/// final cut and its extensions need not be counted at all. All surviving
/// counts are exact, so the final selection equals the brute-force one.
fn top_substrings(corpus: &LabeledCorpus, max_len: usize, cap: usize) -> Vec<(&[u8], u64)> {
    let samples = corpus.samples();
    let mut pool: Vec<(&[u8], u64)> = Vec::new();
    let mut theta: u64 = 1;
    let mut prev: HashSet<&[u8]> = HashSet::new();

    for k in 1..=max_len {
        let counts: HashMap<&[u8], u64> = samples
            .par_chunks(256)
            .map(|chunk| {
                let mut m: HashMap<&[u8], u64> = HashMap::new();
                for s in chunk {
                    let bytes = s.text.as_bytes();
                    if bytes.len() < k {
                        continue;
                    }
                    for start in 0..=bytes.len() - k {
                        let w = &bytes[start..start + k];
                        if k > 1 && !prev.contains(&w[..k - 1]) {
                            continue;
                        }
                        *m.entry(w).or_default() += 1;
                    }
                }
                m
            })
            .reduce(HashMap::new, |a, b| {
                if a.len() < b.len() {
                    return merge_counts(b, a);
                }
                merge_counts(a, b)
            });

        if counts.is_empty() {
            break; // no sample is long enough; longer k can't match either
        }
        pool.extend(counts.into_iter().filter(|&(_, c)| c >= theta));

        if pool.len() > cap {
            // Tighten θ to the cap-th best count; keep ties for the final
            // ordering pass.
            let (_, nth, _) = pool.select_nth_unstable_by(cap - 1, |a, b| b.1.cmp(&a.1));
            theta = nth.1;
            pool.retain(|&(_, c)| c >= theta);
        }
        prev = pool
            .iter()
            .filter(|(t, _)| t.len() == k)
            .map(|&(t, _)| t)
            .collect();
        if prev.is_empty() {
            break; // nothing of length k survived, so nothing longer can
        }
    }

    pool.sort_unstable_by(|a, b| {
        b.1.cmp(&a.1)
            .then(b.0.len().cmp(&a.0.len()))
            .then(a.0.cmp(b.0))
    });
    pool.truncate(cap);
    pool
}

fn merge_counts<'a>(
    mut into: HashMap<&'a [u8], u64>,
    from: HashMap<&'a [u8], u64>,
) -> HashMap<&'a [u8], u64> {
    for (k, v) in from {
        *into.entry(k).or_default() += v;
    }
    into
}

/// Read a vocabulary from its text form: one token per line, `\xNN` escapes
/// for bytes that don't print. Missing single-byte tokens are appended so the
/// coverage guarantee holds. Returns the vocabulary and the number of
/// duplicate lines collapsed (each also logged).
pub fn import_vocab(path: impl AsRef<Path>) -> Result<(Vocabulary, usize)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut tokens: Vec<Vec<u8>> = Vec::new();
    for (idx, line) in BufReader::new(file).split(b'\n').enumerate() {
        let raw = line.map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        let raw = raw.strip_suffix(b"\r").unwrap_or(&raw);
        let token = unescape_token(raw).map_err(|reason| Error::Malformed {
            path: path.to_owned(),
            line: idx + 1,
            reason,
        })?;
        tokens.push(token);
    }
    if tokens.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{}: vocabulary file has no tokens",
            path.display()
        )));
    }
    let (vocab, dups) = Vocabulary::with_byte_coverage(tokens)?;
    if dups > 0 {
        log::warn!("{}: {dups} duplicate token line(s) collapsed", path.display());
    }
    Ok((vocab, dups))
}

/// Render token bytes as a vocabulary-file line: printable text stays
/// literal, backslash doubles, and control characters or bytes that don't
/// form valid UTF-8 become `\xNN`.
pub fn escape_token(bytes: &[u8]) -> String {
    let mut out = String::new();
    let mut rest = bytes;
    while !rest.is_empty() {
        match std::str::from_utf8(rest) {
            Ok(s) => {
                push_escaped_chars(&mut out, s);
                break;
            }
            Err(e) => {
                let (valid, bad) = rest.split_at(e.valid_up_to());
                // split_at never fails: valid_up_to ≤ len
                push_escaped_chars(&mut out, std::str::from_utf8(valid).unwrap());
                let skip = e.error_len().unwrap_or(bad.len());
                for &b in &bad[..skip] {
                    out.push_str(&format!("\\x{b:02x}"));
                }
                rest = &bad[skip..];
            }
        }
    }
    out
}

fn push_escaped_chars(out: &mut String, s: &str) {
    for c in s.chars() {
        if c == '\\' {
            out.push_str("\\\\");
        } else if c.is_control() {
            let mut buf = [0u8; 4];
            for &b in c.encode_utf8(&mut buf).as_bytes() {
                out.push_str(&format!("\\x{b:02x}"));
            }
        } else {
            out.push(c);
        }
    }
}

/// Inverse of [`escape_token`]; accepts any byte sequence the escape form
/// can denote.
pub fn unescape_token(line: &[u8]) -> std::result::Result<Vec<u8>, String> {
    let mut out = Vec::with_capacity(line.len());
    let mut i = 0;
    while i < line.len() {
        if line[i] != b'\\' {
            out.push(line[i]);
            i += 1;
            continue;
        }
        match line.get(i + 1) {
            Some(b'\\') => {
                out.push(b'\\');
                i += 2;
            }
            Some(b'x') => {
                let hex = line
                    .get(i + 2..i + 4)
                    .ok_or_else(|| "truncated \\xNN escape".to_string())?;
                let hex = std::str::from_utf8(hex).map_err(|_| "bad \\xNN escape".to_string())?;
                let byte =
                    u8::from_str_radix(hex, 16).map_err(|_| format!("bad hex in \\x{hex}"))?;
                out.push(byte);
                i += 4;
            }
            _ => return Err("lone backslash (use \\\\ or \\xNN)".to_string()),
        }
    }
    if out.is_empty() {
        return Err("empty token".to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sample;

    fn tiny_vocab(tokens: &[&str]) -> Vocabulary {
        Vocabulary::from_tokens(tokens.iter().map(|t| t.as_bytes().to_vec()).collect()).unwrap()
    }

    fn corpus_of(texts: &[&str]) -> LabeledCorpus {
        LabeledCorpus::from_samples(
            texts
                .iter()
                .map(|t| Sample::new(*t, "xx").unwrap())
                .collect(),
        )
    }

    #[test]
    fn match_prefixes_enumerates_in_length_order() {
        let v = tiny_vocab(&["a", "b", "ab"]);
        let matched = v.match_prefixes(b"ab", 0);
        assert_eq!(matched, vec![(0, 1), (2, 2)]);
        assert_eq!(v.match_prefixes(b"ab", 1), vec![(1, 1)]);
    }

    #[test]
    fn match_prefixes_handles_missing_bytes() {
        let v = tiny_vocab(&["a"]);
        assert!(v.match_prefixes(b"z", 0).is_empty());
    }

    #[test]
    fn token_id_roundtrips_and_rejects_non_tokens() {
        let v = tiny_vocab(&["a", "ab", "abc"]);
        assert_eq!(v.token_id(b"ab"), Some(1));
        assert_eq!(v.token_id(b"b"), None);
        assert_eq!(v.token_id(b"abcd"), None);
        assert_eq!(v.token_id(b""), None);
    }

    #[test]
    fn from_tokens_rejects_duplicates_and_empties() {
        assert!(Vocabulary::from_tokens(vec![b"a".to_vec(), b"a".to_vec()]).is_err());
        assert!(Vocabulary::from_tokens(vec![vec![]]).is_err());
        assert!(Vocabulary::from_tokens(vec![]).is_err());
    }

    #[test]
    fn seed_vocab_orders_by_count_then_length_then_bytes() {
        // Substrings of "abab" up to length 2: a:2, b:2, ab:2, ba:1.
        let c = corpus_of(&["abab"]);
        let cfg = SeedVocabConfig {
            target_size: 1000,
            seed_multiplier: 1,
            max_token_len: 2,
        };
        let v = build_seed_vocab(&c, &cfg).unwrap();
        assert_eq!(v.token(0), b"ab"); // count 2, longest wins the tie
        assert_eq!(v.token(1), b"a");
        assert_eq!(v.token(2), b"b");
        assert_eq!(v.token(3), b"ba");
        assert_eq!(v.len(), 256 + 2); // ab and ba on top of full byte coverage
    }

    #[test]
    fn seed_vocab_on_single_byte_corpus_is_just_the_byte_alphabet() {
        let c = corpus_of(&["x"]);
        let cfg = SeedVocabConfig {
            target_size: 256,
            seed_multiplier: 4,
            max_token_len: 16,
        };
        let v = build_seed_vocab(&c, &cfg).unwrap();
        assert_eq!(v.len(), 256);
        assert_eq!(v.token(0), b"x"); // the one observed byte ranks first
    }

    #[test]
    fn seed_vocab_ignores_sample_order() {
        let cfg = SeedVocabConfig {
            target_size: 300,
            seed_multiplier: 2,
            max_token_len: 4,
        };
        let a = build_seed_vocab(&corpus_of(&["hello world", "hold the door"]), &cfg).unwrap();
        let b = build_seed_vocab(&corpus_of(&["hold the door", "hello world"]), &cfg).unwrap();
        let ta: Vec<&[u8]> = a.tokens().collect();
        let tb: Vec<&[u8]> = b.tokens().collect();
        assert_eq!(ta, tb);
    }

    #[test]
    fn seed_vocab_respects_size_bound() {
        let c = corpus_of(&["the quick brown fox jumps over the lazy dog"]);
        let cfg = SeedVocabConfig {
            target_size: 256,
            seed_multiplier: 1,
            max_token_len: 8,
        };
        let v = build_seed_vocab(&c, &cfg).unwrap();
        assert!(v.len() <= 256 + 256);
    }

    #[test]
    fn apriori_pruned_counting_matches_bruteforce() {
        let texts = ["the cat sat on the mat", "the bat and the rat", "cats!"];
        let c = corpus_of(&texts);
        let max_len = 5;
        let cap = 40; // small cap forces θ > 1 so pruning actually happens

        let got = top_substrings(&c, max_len, cap);

        let mut brute: HashMap<&[u8], u64> = HashMap::new();
        for t in &texts {
            let bytes = t.as_bytes();
            for start in 0..bytes.len() {
                for len in 1..=max_len.min(bytes.len() - start) {
                    *brute.entry(&bytes[start..start + len]).or_default() += 1;
                }
            }
        }
        let mut want: Vec<(&[u8], u64)> = brute.into_iter().collect();
        want.sort_unstable_by(|a, b| {
            b.1.cmp(&a.1)
                .then(b.0.len().cmp(&a.0.len()))
                .then(a.0.cmp(b.0))
        });
        want.truncate(cap);
        assert_eq!(got, want);
    }

    #[test]
    fn escape_roundtrips_awkward_bytes() {
        let cases: Vec<Vec<u8>> = vec![
            b"hello".to_vec(),
            b" leading space".to_vec(),
            b"back\\slash".to_vec(),
            vec![0x00, 0xff, 0xfe],
            vec![b'a', 0x09, b'b'],
            "héllo".as_bytes().to_vec(),
            vec![0xc3], // dangling UTF-8 lead byte
        ];
        for tok in cases {
            let line = escape_token(&tok);
            assert_eq!(unescape_token(line.as_bytes()).unwrap(), tok, "line {line:?}");
        }
    }

    #[test]
    fn unescape_rejects_bad_escapes() {
        assert!(unescape_token(b"a\\").is_err());
        assert!(unescape_token(b"\\x4").is_err());
        assert!(unescape_token(b"\\xzz").is_err());
        assert!(unescape_token(b"\\n").is_err());
        assert!(unescape_token(b"").is_err());
    }

    #[test]
    fn import_collapses_duplicates_and_adds_byte_coverage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vocab.txt");
        std::fs::write(&path, "hello\nhe\nllo\nhe\n").unwrap();
        let (v, dups) = import_vocab(&path).unwrap();
        assert_eq!(dups, 1);
        assert_eq!(v.len(), 3 + 256);
        assert_eq!(v.token(0), b"hello");
        assert_eq!(v.token_id(b"he"), Some(1));
    }

    #[test]
    fn import_of_full_byte_escape_file_is_exactly_256_tokens() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bytes.txt");
        let mut body = String::new();
        for b in 0..=255u8 {
            body.push_str(&format!("\\x{b:02x}\n"));
        }
        std::fs::write(&path, body).unwrap();
        let (v, dups) = import_vocab(&path).unwrap();
        assert_eq!(v.len(), 256);
        assert_eq!(dups, 0);
        assert_eq!(v.token(0x41), b"A");
    }

    #[test]
    fn export_import_roundtrip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.txt");
        let (orig, _) = Vocabulary::with_byte_coverage(vec![
            b"the ".to_vec(),
            vec![0xf0, 0x9f, 0x99, 0x82], // 🙂
            vec![0x00, 0x01],
            b"a\\b".to_vec(),
        ])
        .unwrap();
        orig.export(&path).unwrap();
        let (back, dups) = import_vocab(&path).unwrap();
        assert_eq!(dups, 0);
        let a: Vec<&[u8]> = orig.tokens().collect();
        let b: Vec<&[u8]> = back.tokens().collect();
        assert_eq!(a, b);
    }
}
