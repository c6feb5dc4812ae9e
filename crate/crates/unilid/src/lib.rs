//! Language identification from per-language unigram token distributions.
//!
//! The model treats a string as a sequence of vocabulary tokens drawn i.i.d.
//! from a categorical distribution. One distribution is fitted per language
//! (by EM over all segmentations of the training text), all sharing a single
//! byte-level vocabulary. A string is classified by scoring its best
//! segmentation under every language and taking the argmax.
//!
//! The pieces, bottom up:
//!
//! * [`corpus`] — labeled text collections, file ingestion, splits.
//! * [`vocab`] — the shared token inventory and its prefix trie.
//! * [`lattice`] — the segmentation DAG of a string plus the dynamic
//!   programs over it (Viterbi, marginal, expected counts).
//! * [`em`] — unigram distribution fitting and vocabulary pruning.
//! * [`model`] — the per-language classifier and its on-disk format.
//! * [`eval`] — confusion-matrix metrics, length and sample-size studies.

pub mod corpus;
pub mod em;
pub mod error;
pub mod eval;
pub mod lattice;
pub mod model;
pub mod vocab;

mod num;

pub use corpus::{read_corpus, CorpusFormat, LabeledCorpus, ReadReport, Sample};
pub use em::{em_fit, learn_vocab, EmConfig, EmRound, EmTrace, PruneConfig};
pub use error::{Error, Result};
pub use eval::{
    accuracy_by_length, confusion_matrix, default_length_buckets, evaluate,
    report_from_confusion, sample_efficiency_sweep, throughput_bench, BenchReport, ClassMetrics,
    ConfusionMatrix, EvalReport, LenBucket, LengthReport, LengthRow, LengthUnit, SweepPoint,
    SweepResult, SweepRun,
};
pub use lattice::{Lattice, UnigramDist};
pub use model::{ModelMeta, Prediction, UniLidModel, MODEL_FORMAT_VERSION};
pub use vocab::{build_seed_vocab, import_vocab, SeedVocabConfig, Vocabulary};
