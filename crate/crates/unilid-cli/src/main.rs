//! `unilid` — train, query, and evaluate unigram language-identification
//! models from the command line.
//!
//! Flags beat `UNILID_*` environment variables beat defaults. Data goes to
//! stdout, diagnostics to stderr, and every subcommand is deterministic for
//! fixed inputs: `--threads` changes wall time, never results.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use unilid::{
    accuracy_by_length, build_seed_vocab, default_length_buckets, evaluate, import_vocab,
    learn_vocab, read_corpus, sample_efficiency_sweep, throughput_bench, BenchReport,
    CorpusFormat, EmConfig, EvalReport, LabeledCorpus, Lattice, LengthReport, LengthUnit,
    Prediction, PruneConfig, SeedVocabConfig, SweepResult, UniLidModel, Vocabulary,
    MODEL_FORMAT_VERSION,
};

fn version_string() -> String {
    format!(
        "{} (model format v{MODEL_FORMAT_VERSION})",
        env!("CARGO_PKG_VERSION")
    )
}

/// `println!` that surfaces stdout failures — most likely a consumer closing
/// the pipe — as errors instead of the panic the `print!` family produces.
macro_rules! say {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*)
    };
}

/// Write a preformatted, newline-terminated block to stdout; fails like
/// [`say!`] rather than panicking.
fn emit(block: &str) -> io::Result<()> {
    io::stdout().lock().write_all(block.as_bytes())
}

#[derive(Parser)]
#[command(name = "unilid", version = version_string(), about = "Language identification from unigram token statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true, env = "UNILID_THREADS")]
    threads: Option<usize>,

    /// Seed for the randomized steps (per-language subsampling).
    #[arg(long, global = true, env = "UNILID_SEED", default_value_t = 0)]
    seed: u64,

    /// Only warnings and errors on stderr.
    #[arg(long, global = true, env = "UNILID_QUIET", action = ArgAction::SetTrue)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build or import the shared token vocabulary.
    #[command(subcommand)]
    Vocab(VocabCmd),
    /// Fit one unigram distribution per language on a labeled corpus.
    Train(TrainArgs),
    /// Classify one text per input line, streaming stdin or a file.
    Predict(PredictArgs),
    /// Score a model against a labeled test set.
    Eval(EvalArgs),
    /// Sample-efficiency sweep: subsample k per language, train, evaluate.
    Sweep(SweepArgs),
    /// Measure single-stream prediction latency and throughput.
    Bench(BenchArgs),
    /// Add one language to a model; existing languages stay bit-identical.
    AddLang(AddLangArgs),
    /// Print a string's segmentation lattice as Graphviz DOT (debugging).
    DumpLattice(DumpLatticeArgs),
}

#[derive(Subcommand)]
enum VocabCmd {
    /// Learn a vocabulary: seed with frequent substrings, then alternate EM
    /// with pruning until the target size is reached.
    Build(VocabBuildArgs),
    /// Validate a token file and rewrite it in canonical form.
    Import(VocabImportArgs),
}

#[derive(Args)]
struct VocabBuildArgs {
    /// Labeled corpus to mine substrings from.
    #[arg(long)]
    input: PathBuf,
    /// Corpus file format.
    #[arg(long, default_value = "jsonl")]
    format: CorpusFormat,
    /// Skip malformed lines instead of aborting on the first one.
    #[arg(long)]
    skip_bad: bool,
    /// Final vocabulary size; at least 256 so every byte keeps a token.
    #[arg(long, default_value_t = 100_000)]
    size: usize,
    /// The seed vocabulary holds up to size × this many candidates.
    #[arg(long, default_value_t = 4)]
    seed_mult: usize,
    /// Longest candidate token, in bytes.
    #[arg(long, default_value_t = 16)]
    max_token_len: usize,
    /// Fraction of tokens kept at each prune step.
    #[arg(long, default_value_t = 0.75)]
    shrink: f64,
    /// EM rounds between prune steps.
    #[arg(long, default_value_t = 2)]
    em_rounds_per_prune: usize,
    /// Output file, one escaped token per line.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VocabImportArgs {
    /// Token file, one escaped token per line.
    #[arg(long)]
    input: PathBuf,
    /// Canonicalized output file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Vocabulary file (from `vocab build` or `vocab import`).
    #[arg(long)]
    vocab: PathBuf,
    /// Labeled training corpus.
    #[arg(long)]
    corpus: PathBuf,
    /// Corpus file format.
    #[arg(long, default_value = "jsonl")]
    format: CorpusFormat,
    /// Skip malformed lines instead of aborting on the first one.
    #[arg(long)]
    skip_bad: bool,
    /// Output model file.
    #[arg(long)]
    out: PathBuf,
    /// EM rounds per language.
    #[arg(long, default_value_t = 20)]
    em_rounds: usize,
    /// Stop a language's EM once successive distributions move less than
    /// this in total variation.
    #[arg(long, default_value_t = 1e-6)]
    tv_tol: f64,
    /// Cap training samples per language with a seeded random subset. The
    /// cap is applied before any --decontaminate filtering.
    #[arg(long)]
    subsample_per_lang: Option<usize>,
    /// Evaluation corpus whose exact texts must not be trained on; may be
    /// given multiple times. Applied after --subsample-per-lang.
    #[arg(long, action = ArgAction::Append)]
    decontaminate: Vec<PathBuf>,
    /// Write one EM-trace CSV per language into this directory.
    #[arg(long)]
    trace_dir: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    /// Trained model file.
    #[arg(long)]
    model: PathBuf,
    /// Input file, one text per line; stdin when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Report this many top languages per line.
    #[arg(long, default_value_t = 1)]
    top_k: usize,
    /// Include posterior probabilities even with --top-k 1.
    #[arg(long)]
    scores: bool,
    /// Output format: tsv columns or one JSON object per line.
    #[arg(long, default_value = "tsv")]
    format: PredictFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum PredictFormat {
    Tsv,
    Jsonl,
}

#[derive(Args)]
struct EvalArgs {
    /// Trained model file.
    #[arg(long)]
    model: PathBuf,
    /// Labeled test corpus; every label must be known to the model.
    #[arg(long)]
    test: PathBuf,
    /// Corpus file format.
    #[arg(long, default_value = "jsonl")]
    format: CorpusFormat,
    /// Skip malformed lines instead of aborting on the first one.
    #[arg(long)]
    skip_bad: bool,
    /// How to print the report.
    #[arg(long, default_value = "table")]
    report_format: ReportFormat,
    /// Also break accuracy down by sample length.
    #[arg(long)]
    by_length: bool,
    /// Length measure for --by-length: chars (Unicode scalars) or bytes.
    #[arg(long, default_value = "chars")]
    length_unit: LengthUnit,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Table,
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    /// Vocabulary file shared by every run.
    #[arg(long)]
    vocab: PathBuf,
    /// Labeled training corpus.
    #[arg(long)]
    train: PathBuf,
    /// Labeled test corpus.
    #[arg(long)]
    test: PathBuf,
    /// Corpus file format (both files).
    #[arg(long, default_value = "jsonl")]
    format: CorpusFormat,
    /// Skip malformed lines instead of aborting on the first one.
    #[arg(long)]
    skip_bad: bool,
    /// Training samples per language, comma-separated ascending, e.g. 5,10,25.
    #[arg(long, value_delimiter = ',', required = true)]
    ks: Vec<usize>,
    /// Subsampling seeds, comma-separated, e.g. 1,2,3.
    #[arg(long, value_delimiter = ',', required = true)]
    seeds: Vec<u64>,
    /// EM rounds per language per run.
    #[arg(long, default_value_t = 20)]
    em_rounds: usize,
    /// EM total-variation stopping tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tv_tol: f64,
    /// Directory for sweep_runs.csv (k,seed,accuracy) and sweep_points.csv
    /// (k,mean,std).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// How to print the aggregated points.
    #[arg(long, default_value = "table")]
    report_format: ReportFormat,
}

#[derive(Args)]
struct BenchArgs {
    /// Trained model file.
    #[arg(long)]
    model: PathBuf,
    /// Plain text file, one sample per line; empty lines are skipped.
    #[arg(long)]
    input: PathBuf,
    /// Timed passes over the file (an extra warmup pass is never counted).
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// How to print the result.
    #[arg(long, default_value = "table")]
    report_format: ReportFormat,
}

#[derive(Args)]
struct AddLangArgs {
    /// Existing model file.
    #[arg(long)]
    model: PathBuf,
    /// Label of the language to add.
    #[arg(long)]
    label: String,
    /// Labeled corpus holding the new language's samples (other labels in
    /// the file are ignored). EM settings are taken from the model.
    #[arg(long)]
    corpus: PathBuf,
    /// Corpus file format.
    #[arg(long, default_value = "jsonl")]
    format: CorpusFormat,
    /// Skip malformed lines instead of aborting on the first one.
    #[arg(long)]
    skip_bad: bool,
    /// Output model file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DumpLatticeArgs {
    /// Vocabulary file to segment with.
    #[arg(long, required_unless_present = "model", conflicts_with = "model")]
    vocab: Option<PathBuf>,
    /// Take the vocabulary from a trained model instead.
    #[arg(long)]
    model: Option<PathBuf>,
    /// The string to lay out.
    #[arg(long)]
    text: String,
}

fn main() {
    let cli = Cli::parse();
    init_logging(cli.quiet);
    if let Err(err) = run(cli) {
        // A consumer closing stdout early (`unilid predict ... | head`) is
        // normal pipeline behavior, not something to report; exit the way a
        // SIGPIPE-terminated process would.
        if is_broken_pipe(&err) {
            std::process::exit(141);
        }
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain()
        .filter_map(|cause| cause.downcast_ref::<io::Error>())
        .any(|io_err| io_err.kind() == io::ErrorKind::BrokenPipe)
}

fn init_logging(quiet: bool) {
    let default = if quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default))
        .format_timestamp(None)
        .init();
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        ensure!(n >= 1, "--threads must be at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("initializing the thread pool")?;
    }
    match cli.command {
        Command::Vocab(VocabCmd::Build(a)) => cmd_vocab_build(a, cli.seed),
        Command::Vocab(VocabCmd::Import(a)) => cmd_vocab_import(a),
        Command::Train(a) => cmd_train(a, cli.seed),
        Command::Predict(a) => cmd_predict(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Sweep(a) => cmd_sweep(a, cli.seed),
        Command::Bench(a) => cmd_bench(a),
        Command::AddLang(a) => cmd_add_lang(a),
        Command::DumpLattice(a) => cmd_dump_lattice(a),
    }
}

fn load_corpus(path: &PathBuf, format: CorpusFormat, skip_bad: bool) -> Result<LabeledCorpus> {
    let (corpus, report) = read_corpus(path, format, skip_bad)?;
    log::info!(
        "{}: {} lines, {} kept, {} skipped, {} languages",
        path.display(),
        report.lines,
        report.kept,
        report.skipped,
        corpus.label_set().len()
    );
    Ok(corpus)
}

fn load_vocab(path: &PathBuf) -> Result<Vocabulary> {
    let (vocab, duplicates) = import_vocab(path)?;
    if duplicates > 0 {
        log::warn!("{}: {duplicates} duplicate tokens collapsed", path.display());
    }
    Ok(vocab)
}

fn cmd_vocab_build(a: VocabBuildArgs, seed: u64) -> Result<()> {
    let seed_cfg = SeedVocabConfig {
        target_size: a.size,
        seed_multiplier: a.seed_mult,
        max_token_len: a.max_token_len,
    };
    let prune_cfg = PruneConfig {
        target_size: a.size,
        shrink_factor: a.shrink,
        em_rounds_per_prune: a.em_rounds_per_prune,
    };
    // Both validated before the corpus is touched.
    seed_cfg.validate()?;
    prune_cfg.validate()?;

    let corpus = load_corpus(&a.input, a.format, a.skip_bad)?;
    let seed_vocab = build_seed_vocab(&corpus, &seed_cfg)?;
    log::info!("seed vocabulary: {} tokens", seed_vocab.len());

    let vocab = if seed_vocab.len() <= a.size {
        log::info!("seed already within --size; nothing to prune");
        seed_vocab
    } else {
        let texts: Vec<&str> = corpus.samples().iter().map(|s| s.text.as_str()).collect();
        let em = EmConfig {
            seed,
            ..EmConfig::default()
        };
        learn_vocab(&texts, seed_vocab, &prune_cfg, &em)?.0
    };
    vocab.export(&a.out)?;
    say!("wrote {} ({} tokens)", a.out.display(), vocab.len())?;
    Ok(())
}

fn cmd_vocab_import(a: VocabImportArgs) -> Result<()> {
    let vocab = load_vocab(&a.input)?;
    vocab.export(&a.out)?;
    say!("wrote {} ({} tokens)", a.out.display(), vocab.len())?;
    Ok(())
}

fn cmd_train(a: TrainArgs, seed: u64) -> Result<()> {
    let vocab = load_vocab(&a.vocab)?;
    let mut corpus = load_corpus(&a.corpus, a.format, a.skip_bad)?;

    if let Some(k) = a.subsample_per_lang {
        corpus = corpus.subsample_per_language(k, seed)?;
        log::info!("subsampled to ≤ {k} per language: {} samples", corpus.len());
    }
    if !a.decontaminate.is_empty() {
        let eval_sets = a
            .decontaminate
            .iter()
            .map(|p| load_corpus(p, a.format, a.skip_bad))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&LabeledCorpus> = eval_sets.iter().collect();
        let (clean, removed) = corpus.decontaminate(&refs);
        for (path, n) in a.decontaminate.iter().zip(&removed) {
            log::info!("decontamination vs {}: {n} samples dropped", path.display());
        }
        corpus = clean;
        ensure!(
            !corpus.is_empty(),
            "decontamination removed every training sample"
        );
    }

    let em = EmConfig {
        max_rounds: a.em_rounds,
        tv_tolerance: a.tv_tol,
        seed,
        ..EmConfig::default()
    };
    let (model, traces) = UniLidModel::train_traced(vocab, &corpus, &em)?;

    if let Some(dir) = &a.trace_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (i, (label, trace)) in model.labels().iter().zip(&traces).enumerate() {
            let path = dir.join(format!("{i:03}-{}.csv", filename_safe(label)));
            fs::write(&path, trace.to_csv())
                .with_context(|| format!("writing {}", path.display()))?;
        }
        log::info!("wrote {} EM traces to {}", traces.len(), dir.display());
    }

    model.save(&a.out)?;
    say!(
        "wrote {} ({} languages, {} samples, vocab {})",
        a.out.display(),
        model.n_languages(),
        corpus.len(),
        model.vocab().len()
    )?;
    Ok(())
}

fn filename_safe(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Lines per batch in streaming prediction: enough to keep every worker
/// busy, small enough to bound memory on unbounded streams.
const PREDICT_CHUNK: usize = 4096;

fn cmd_predict(a: PredictArgs) -> Result<()> {
    ensure!(a.top_k >= 1, "--top-k must be at least 1");
    let model = UniLidModel::load(&a.model)?;
    let k = a.top_k.min(model.n_languages());
    let with_scores = a.scores || a.top_k > 1;

    let reader: Box<dyn BufRead> = match &a.input {
        Some(path) => Box::new(BufReader::new(
            File::open(path).with_context(|| format!("reading {}", path.display()))?,
        )),
        None => Box::new(io::stdin().lock()),
    };
    let mut out = BufWriter::new(io::stdout().lock());

    let mut lines = reader.split(b'\n');
    loop {
        let mut chunk: Vec<Vec<u8>> = Vec::with_capacity(PREDICT_CHUNK);
        for line in lines.by_ref().take(PREDICT_CHUNK) {
            let mut line = line.context("reading input")?;
            if line.last() == Some(&b'\r') {
                line.pop();
            }
            chunk.push(line);
        }
        if chunk.is_empty() {
            break;
        }
        for result in model.predict_batch(&chunk) {
            match result {
                Ok(p) => write_prediction(&mut out, &model, &p, k, with_scores, a.format)?,
                // Keep the stream aligned: empty lines get a marker label.
                Err(unilid::Error::EmptyInput(_)) => match a.format {
                    PredictFormat::Tsv => writeln!(out, "__error_empty__")?,
                    PredictFormat::Jsonl => {
                        writeln!(out, "{}", serde_json::json!({"label": "__error_empty__"}))?
                    }
                },
                Err(e) => return Err(e).context("classifying input line"),
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn write_prediction(
    out: &mut impl Write,
    model: &UniLidModel,
    p: &Prediction,
    k: usize,
    with_scores: bool,
    format: PredictFormat,
) -> Result<()> {
    match format {
        PredictFormat::Tsv => {
            if !with_scores {
                writeln!(out, "{}", p.label)?;
            } else {
                let mut cols = Vec::with_capacity(2 * k);
                for &i in p.ranked().iter().take(k) {
                    cols.push(model.labels()[i].clone());
                    cols.push(p.posterior[i].to_string());
                }
                writeln!(out, "{}", cols.join("\t"))?;
            }
        }
        PredictFormat::Jsonl => {
            let value = if with_scores {
                let ranked: Vec<serde_json::Value> = p
                    .ranked()
                    .iter()
                    .take(k)
                    .map(|&i| {
                        serde_json::json!({
                            "label": model.labels()[i],
                            "posterior": p.posterior[i],
                        })
                    })
                    .collect();
                serde_json::json!({"label": p.label, "ranked": ranked})
            } else {
                serde_json::json!({"label": p.label})
            };
            writeln!(out, "{value}")?;
        }
    }
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let model = UniLidModel::load(&a.model)?;
    let test = load_corpus(&a.test, a.format, a.skip_bad)?;
    let report = evaluate(&model, &test)?;
    let by_length = a
        .by_length
        .then(|| accuracy_by_length(&model, &test, &default_length_buckets(), a.length_unit))
        .transpose()?;

    match a.report_format {
        ReportFormat::Table => {
            emit(&eval_table(&report))?;
            if let Some(l) = &by_length {
                say!()?;
                emit(&length_table(l))?;
            }
        }
        ReportFormat::Csv => {
            emit(&report.to_csv())?;
            if let Some(l) = &by_length {
                say!()?;
                emit(&l.to_csv())?;
            }
        }
        ReportFormat::Json => {
            let value = match &by_length {
                Some(l) => serde_json::json!({"metrics": report, "by_length": l}),
                None => serde_json::json!(report),
            };
            say!("{}", serde_json::to_string_pretty(&value)?)?;
        }
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs, _seed: u64) -> Result<()> {
    let vocab = load_vocab(&a.vocab)?;
    let train = load_corpus(&a.train, a.format, a.skip_bad)?;
    let test = load_corpus(&a.test, a.format, a.skip_bad)?;
    let em = EmConfig {
        max_rounds: a.em_rounds,
        tv_tolerance: a.tv_tol,
        ..EmConfig::default()
    };
    let sweep = sample_efficiency_sweep(&vocab, &train, &test, &a.ks, &a.seeds, &em)?;

    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let runs = dir.join("sweep_runs.csv");
        let points = dir.join("sweep_points.csv");
        fs::write(&runs, sweep.runs_csv()).with_context(|| format!("writing {}", runs.display()))?;
        fs::write(&points, sweep.points_csv())
            .with_context(|| format!("writing {}", points.display()))?;
        log::info!("wrote {} and {}", runs.display(), points.display());
    }

    match a.report_format {
        ReportFormat::Table => emit(&sweep_table(&sweep))?,
        ReportFormat::Csv => emit(&sweep.points_csv())?,
        ReportFormat::Json => say!("{}", serde_json::to_string_pretty(&sweep)?)?,
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let model = UniLidModel::load(&a.model)?;
    let file = File::open(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let mut texts: Vec<Vec<u8>> = Vec::new();
    let mut empties = 0usize;
    for line in BufReader::new(file).split(b'\n') {
        let mut line = line.context("reading input")?;
        if line.last() == Some(&b'\r') {
            line.pop();
        }
        if line.is_empty() {
            empties += 1;
        } else {
            texts.push(line);
        }
    }
    if empties > 0 {
        log::warn!("skipped {empties} empty lines");
    }
    let report = throughput_bench(&model, &texts, a.reps)?;
    match a.report_format {
        ReportFormat::Table => emit(&bench_table(&report))?,
        ReportFormat::Csv => {
            say!("n_texts,repetitions,vocab_size,mean_latency_ms,samples_per_sec")?;
            say!(
                "{},{},{},{},{}",
                report.n_texts,
                report.repetitions,
                report.vocab_size,
                report.mean_latency_ms,
                report.samples_per_sec
            )?;
        }
        ReportFormat::Json => say!("{}", serde_json::to_string_pretty(&report)?)?,
    }
    Ok(())
}

fn cmd_add_lang(a: AddLangArgs) -> Result<()> {
    let model = UniLidModel::load(&a.model)?;
    let corpus = load_corpus(&a.corpus, a.format, a.skip_bad)?;
    let texts = corpus.texts_for(&a.label);
    if texts.is_empty() {
        bail!(
            "{} has no samples labeled {:?} (labels present: {})",
            a.corpus.display(),
            a.label,
            corpus.label_set().join(", ")
        );
    }
    let em = model.meta().em.clone();
    let bigger = model.add_language(&a.label, &texts, &em)?;
    bigger.save(&a.out)?;
    say!(
        "wrote {} ({} languages, +{:?} from {} samples)",
        a.out.display(),
        bigger.n_languages(),
        a.label,
        texts.len()
    )?;
    Ok(())
}

fn cmd_dump_lattice(a: DumpLatticeArgs) -> Result<()> {
    let vocab = match (&a.vocab, &a.model) {
        (Some(path), _) => load_vocab(path)?,
        (None, Some(path)) => UniLidModel::load(path)?.vocab().clone(),
        (None, None) => unreachable!("clap enforces one of --vocab/--model"),
    };
    let lattice = Lattice::build(&vocab, a.text.as_bytes())?;
    emit(&lattice.to_dot(&vocab))?;
    Ok(())
}

fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let push_row = |out: &mut String, cells: Vec<String>| {
        let line = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        out.push_str(line.trim_end());
        out.push('\n');
    };
    push_row(&mut out, headers.iter().map(|h| h.to_string()).collect());
    for row in rows {
        push_row(&mut out, row.clone());
    }
    out
}

fn eval_table(r: &EvalReport) -> String {
    let rows: Vec<Vec<String>> = r
        .per_class
        .iter()
        .map(|c| {
            vec![
                c.label.clone(),
                format!("{:.4}", c.precision),
                format!("{:.4}", c.recall),
                format!("{:.4}", c.f1),
                format!("{:.4}", c.fpr),
                c.support.to_string(),
            ]
        })
        .collect();
    let mut out = render_table(
        &["label", "precision", "recall", "f1", "fpr", "support"],
        &rows,
    );
    out.push('\n');
    out.push_str(&format!(
        "accuracy {:.4}  macro-F1 {:.4}  macro-FPR {:.4}  ({} samples, {} classes)\n",
        r.accuracy,
        r.macro_f1,
        r.macro_fpr,
        r.total,
        r.per_class.len()
    ));
    out
}

fn length_table(r: &LengthReport) -> String {
    let rows: Vec<Vec<String>> = r
        .rows
        .iter()
        .map(|row| {
            vec![
                row.label.clone(),
                row.count.to_string(),
                match row.accuracy {
                    Some(a) => format!("{a:.4}"),
                    None => "-".into(),
                },
            ]
        })
        .collect();
    let mut out = render_table(&[&format!("length ({})", r.unit), "count", "accuracy"], &rows);
    out.push_str(&format!(
        "overall {:.4} over {} samples\n",
        r.overall_accuracy, r.total
    ));
    out
}

fn sweep_table(s: &SweepResult) -> String {
    let rows: Vec<Vec<String>> = s
        .points
        .iter()
        .map(|p| {
            vec![
                p.k.to_string(),
                format!("{:.4}", p.mean),
                match p.std {
                    Some(sd) => format!("{sd:.4}"),
                    None => "-".into(),
                },
            ]
        })
        .collect();
    render_table(&["k", "mean accuracy", "std"], &rows)
}

fn bench_table(r: &BenchReport) -> String {
    format!(
        "texts            {}\nrepetitions      {}\nvocab size       {}\nmean latency     {:.4} ms\nthroughput       {:.1} samples/s\n",
        r.n_texts, r.repetitions, r.vocab_size, r.mean_latency_ms, r.samples_per_sec
    )
}
