use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context as _};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use comsieve::bleu::score_distribution;
use comsieve::categorize::RuleTable;
use comsieve::config::Config;
use comsieve::corpus::{self, JsonLines};
use comsieve::ingest::{walk_corpus, IngestReport};
use comsieve::ngram::{
    analyze_generations, holdout_split, GenerationResult, NGramModel, DEFAULT_HOLDOUT,
    DEFAULT_MAX_LEN, DEFAULT_THRESHOLD, DEFAULT_VOCAB_SIZE, ORDER,
};
use comsieve::pipeline::{split_sentences, FilterMode, Pipeline, PipelineConfig, RecordStatus};
use comsieve::stats::{self, CategoryTally};
use comsieve::{CommentUnit, VERSION};

const DEFAULT_SEED: u64 = 42;
/// Units per filter batch; batches only end at file boundaries.
const BATCH_UNITS: usize = 8192;
/// Files decoded per extraction batch.
const BATCH_FILES: usize = 512;

#[derive(Parser, Debug)]
#[command(name = "comsieve", about = "Mine, filter and model Python source comments", disable_version_flag = true)]
struct Cli {
    /// Print tool and rule-table versions
    #[arg(short = 'V', long, global = true)]
    version: bool,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Flat key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract comments from every .py file under a directory
    Extract(ExtractArgs),
    /// Run basic or advanced filtering over extracted comments
    Filter(FilterArgs),
    /// Category, histogram and per-file reports
    Stats(StatsArgs),
    /// Train a 4-gram model with a random holdout of prefixes
    Train(TrainArgs),
    /// Complete prefixes with a trained model
    Generate(GenerateArgs),
    /// Sentence-level BLEU-4 between candidates and references
    Bleu(BleuArgs),
    /// Overlap of the vocabularies of four models
    VocabOverlap(OverlapArgs),
    /// Length, code-artifact and non-English counts for generations
    Analyze(AnalyzeArgs),
}

#[derive(Args, Debug)]
struct ExtractArgs {
    /// Source tree to walk
    #[arg(long)]
    root: PathBuf,
    /// Comment units as JSON Lines
    #[arg(long)]
    out: PathBuf,
    /// Ingest report (default: OUT.ingest.json)
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-file line counts as `file,loc` CSV (default: OUT.loc.csv)
    #[arg(long)]
    loc: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FilterArgs {
    /// `basic` or `advanced`
    #[arg(long)]
    mode: String,
    /// Comment units written by `extract`
    #[arg(long = "in")]
    input: PathBuf,
    /// One record per unit as JSON Lines
    #[arg(long)]
    out: PathBuf,
    /// Drop counts and category table as JSON
    #[arg(long)]
    report: PathBuf,
    /// Rule table replacing the built-in one
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Let the Antlr `type:` alternative match in any file
    #[arg(long)]
    strict_table1: bool,
    /// Sentences of kept comments, one per line (default: OUT.sentences.txt)
    #[arg(long)]
    sentences: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// Extracted comments
    #[arg(long = "in")]
    input: PathBuf,
    /// Line counts written by `extract`
    #[arg(long)]
    loc: PathBuf,
    #[arg(long)]
    out_prefix: PathBuf,
    /// Filter records to take categories from instead of classifying again
    #[arg(long)]
    records: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Sentences, one per line
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Sentences held out as prefixes and references (default: 10000)
    #[arg(long)]
    holdout: Option<usize>,
    /// Seed for the holdout draw (default: 42)
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    vocab_size: Option<usize>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    prefixes: PathBuf,
    /// Generated sentences, one per line
    #[arg(long)]
    out: PathBuf,
    /// Minimum probability of the best next token (default: 0.9)
    #[arg(long)]
    threshold: Option<f64>,
    /// Length cap in tokens, prefix included (default: 40)
    #[arg(long)]
    max_len: Option<usize>,
    /// Per-prefix results with stop reasons, as JSON Lines
    #[arg(long)]
    details: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BleuArgs {
    #[arg(long)]
    candidates: PathBuf,
    #[arg(long)]
    references: PathBuf,
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Args, Debug)]
struct OverlapArgs {
    /// Four model files (or one-token-per-line vocabulary files), comma separated
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    models: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long)]
    candidates: PathBuf,
    #[arg(long)]
    references: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

/// Input problems exit with 2, everything else with 1.
#[derive(Debug)]
enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

type CliResult<T> = Result<T, Failure>;

fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Input(e.into())
}

fn internal<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Internal(e.into())
}

fn core_error(e: comsieve::Error) -> Failure {
    match e {
        comsieve::Error::Json(_) => internal(e),
        other => input(other),
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    tool_version: &'a str,
    rules_version: String,
    seed: Option<u64>,
    jobs: usize,
    config: &'a Config,
    settings: BTreeMap<&'a str, String>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    duration_secs: f64,
}

struct Run<'a> {
    command: &'a str,
    config: &'a Config,
    rules_version: String,
    started: Instant,
    seed: Option<u64>,
    settings: BTreeMap<&'a str, String>,
    inputs: Vec<String>,
    outputs: Vec<String>,
}

impl<'a> Run<'a> {
    fn new(command: &'a str, config: &'a Config) -> Self {
        Run {
            command,
            config,
            rules_version: RuleTable::default_table().version().to_owned(),
            started: Instant::now(),
            seed: None,
            settings: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn input(&mut self, p: &Path) {
        self.inputs.push(p.display().to_string());
    }

    fn output(&mut self, p: &Path) {
        self.outputs.push(p.display().to_string());
    }

    fn set(&mut self, key: &'a str, value: impl ToString) {
        self.settings.insert(key, value.to_string());
    }

    /// Writes `<primary>.manifest.json`.
    fn finish(self, primary: &Path) -> CliResult<()> {
        let manifest = Manifest {
            command: self.command,
            tool_version: VERSION,
            rules_version: self.rules_version,
            seed: self.seed,
            jobs: rayon::current_num_threads(),
            config: self.config,
            settings: self.settings,
            inputs: self.inputs,
            outputs: self.outputs,
            duration_secs: self.started.elapsed().as_secs_f64(),
        };
        let path = with_suffix(primary, ".manifest.json");
        let text = serde_json::to_string_pretty(&manifest).map_err(internal)?;
        write_file(&path, format!("{text}\n").as_bytes())
    }
}

fn with_suffix(p: &Path, suffix: &str) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))
            .map_err(input)?;
    }
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(input)
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let mut f = create(path)?;
    f.write_all(bytes).and_then(|_| f.flush()).map_err(internal)
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .with_context(|| format!("opening {}", path.display()))
        .map_err(input)
}

fn json_pretty<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value).map_err(internal)?;
    v.push(b'\n');
    Ok(v)
}

fn read_lines_tokens(path: &Path) -> CliResult<Vec<Vec<String>>> {
    corpus::read_sentences(open(path)?)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(input)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if cli.version {
        println!("comsieve {VERSION} (rules {})", RuleTable::default_table().version());
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(input(anyhow!("no subcommand given; see --help")));
    };
    let config = match &cli.config {
        Some(p) => Config::load(p).map_err(core_error)?,
        None => Config::default(),
    };
    if let Some(n) = cli.jobs.or(config.jobs) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(internal)?;
    }
    match command {
        Command::Extract(a) => extract(a, &config),
        Command::Filter(a) => filter(a, config),
        Command::Stats(a) => stats_cmd(a, &config),
        Command::Train(a) => train(a, &config),
        Command::Generate(a) => generate(a, &config),
        Command::Bleu(a) => bleu(a, &config),
        Command::VocabOverlap(a) => vocab_overlap(a, &config),
        Command::Analyze(a) => analyze(a, &config),
    }
}

fn extract(a: ExtractArgs, config: &Config) -> CliResult<()> {
    let mut run = Run::new("extract", config);
    run.input(&a.root);
    let report_path = a.report.unwrap_or_else(|| with_suffix(&a.out, ".ingest.json"));
    let loc_path = a.loc.unwrap_or_else(|| with_suffix(&a.out, ".loc.csv"));
    let walk = walk_corpus(&a.root, "py").map_err(core_error)?;
    let mut report = IngestReport::default();
    for w in &walk.warnings {
        log::warn!("{w}");
        report.warnings.push(w.clone());
    }
    let mut out = create(&a.out)?;
    let mut loc = create(&loc_path)?;
    loc.write_all(b"file,loc\n").map_err(internal)?;
    let mut next_id = 0;
    let mut units_written = 0u64;
    for chunk in walk.paths.chunks(BATCH_FILES) {
        for result in corpus::extract_files(&a.root, chunk) {
            match result {
                Ok(mut fc) => {
                    report.files_opened += 1;
                    report.total_loc += fc.loc as u64;
                    for w in fc.warnings.drain(..) {
                        log::warn!("{w}");
                        report.warnings.push(w);
                    }
                    writeln!(loc, "{},{}", fc.label, fc.loc).map_err(internal)?;
                    next_id = comsieve::extract::number_units(&mut fc.units, next_id);
                    units_written += fc.units.len() as u64;
                    corpus::write_units(&mut out, &fc.units).map_err(internal)?;
                }
                Err(failure) => {
                    log::warn!("skipping {}: {}", failure.path.display(), failure.reason);
                    report.record_failure(&failure);
                }
            }
        }
    }
    out.flush().map_err(internal)?;
    loc.flush().map_err(internal)?;
    #[derive(Serialize)]
    struct Report<'a> {
        #[serde(flatten)]
        ingest: &'a IngestReport,
        comments: u64,
        warnings: &'a [String],
    }
    let r = Report {
        ingest: &report,
        comments: units_written,
        warnings: &report.warnings,
    };
    write_file(&report_path, &json_pretty(&r)?)?;
    run.set("files_opened", report.files_opened);
    run.set("files_skipped", report.files_skipped);
    run.set("comments", units_written);
    run.output(&a.out);
    run.output(&report_path);
    run.output(&loc_path);
    run.finish(&a.out)
}

fn filter(a: FilterArgs, mut config: Config) -> CliResult<()> {
    let mode: FilterMode = a.mode.parse().map_err(|e: String| input(anyhow!(e)))?;
    if a.rules.is_some() {
        config.rules = a.rules.clone();
    }
    if a.strict_table1 {
        config.strict_table1 = Some(true);
    }
    let classifier = config.classifier().map_err(core_error)?;
    let mut run = Run::new("filter", &config);
    run.rules_version = classifier.rules().version().to_owned();
    run.set("mode", mode);
    run.input(&a.input);
    let sentences_path = a.sentences.clone().unwrap_or_else(|| with_suffix(&a.out, ".sentences.txt"));
    let pipeline_cfg = PipelineConfig::with_classifier(mode, std::sync::Arc::new(classifier));
    let min_words = pipeline_cfg.lengths.min_words;
    let mut pipeline = Pipeline::new(pipeline_cfg);
    let mut out = create(&a.out)?;
    let mut sent_out = create(&sentences_path)?;
    let mut tally = CategoryTally::new();
    let mut summary = FilterSummary::default();
    let mut batch: Vec<CommentUnit> = Vec::new();
    let mut flush = |batch: &mut Vec<CommentUnit>, pipeline: &mut Pipeline| -> CliResult<()> {
        if batch.is_empty() {
            return Ok(());
        }
        let records = pipeline.process(batch);
        let keys: Vec<u128> = batch.par_iter().map(|u| stats::duplicate_key(&u.raw_text)).collect();
        let sentences: Vec<Vec<Vec<String>>> = batch
            .par_iter()
            .zip(&records)
            .map(|(u, r)| {
                if r.status == RecordStatus::Kept {
                    split_sentences(&u.raw_text, min_words)
                } else {
                    Vec::new()
                }
            })
            .collect();
        for ((u, r), key) in batch.iter().zip(&records).zip(keys) {
            tally.add(u.kind, r.categories, key);
            summary.add(r);
        }
        corpus::write_records(&mut out, &records).map_err(internal)?;
        for s in &sentences {
            summary.sentences += s.len() as u64;
            corpus::write_sentences(&mut sent_out, s).map_err(internal)?;
        }
        batch.clear();
        Ok(())
    };
    for unit in JsonLines::units(open(&a.input)?) {
        let unit = unit
            .with_context(|| format!("reading {}", a.input.display()))
            .map_err(input)?;
        if batch.len() >= BATCH_UNITS && batch.last().is_some_and(|l| l.file != unit.file) {
            flush(&mut batch, &mut pipeline)?;
        }
        batch.push(unit);
    }
    flush(&mut batch, &mut pipeline)?;
    drop(flush);
    out.flush().map_err(internal)?;
    sent_out.flush().map_err(internal)?;
    summary.finish();
    #[derive(Serialize)]
    struct Report<'a> {
        mode: FilterMode,
        summary: &'a FilterSummary,
        categories: stats::CategoryCounts,
    }
    let report = Report {
        mode,
        summary: &summary,
        categories: tally.finish(),
    };
    write_file(&a.report, &json_pretty(&report)?)?;
    run.set("kept", summary.kept);
    run.set("dropped", summary.dropped);
    run.output(&a.out);
    run.output(&a.report);
    run.output(&sentences_path);
    run.finish(&a.out)
}

#[derive(Debug, Default, Serialize)]
struct FilterSummary {
    comments: u64,
    kept: u64,
    dropped: u64,
    reduction: f64,
    sentences: u64,
    drop_reasons: BTreeMap<String, u64>,
}

impl FilterSummary {
    fn add(&mut self, r: &comsieve::CorpusRecord) {
        self.comments += 1;
        match r.drop_reason {
            Some(reason) => {
                self.dropped += 1;
                *self.drop_reasons.entry(reason.name().to_owned()).or_default() += 1;
            }
            None => self.kept += 1,
        }
    }

    fn finish(&mut self) {
        self.reduction = if self.comments == 0 {
            0.0
        } else {
            self.dropped as f64 / self.comments as f64
        };
    }
}

fn read_loc(path: &Path) -> CliResult<Vec<(String, usize)>> {
    let mut files = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(input)?;
        if i == 0 && line == "file,loc" {
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let parsed = line
            .rsplit_once(',')
            .and_then(|(f, n)| n.parse().ok().map(|n| (f.to_owned(), n)));
        match parsed {
            Some(row) => files.push(row),
            None => {
                return Err(input(anyhow!(
                    "{}:{}: expected `file,loc`",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(files)
}

fn stats_cmd(a: StatsArgs, config: &Config) -> CliResult<()> {
    let mut run = Run::new("stats", config);
    run.input(&a.input);
    run.input(&a.loc);
    let units = corpus::read_units(open(&a.input)?)
        .with_context(|| format!("reading {}", a.input.display()))
        .map_err(input)?;
    let files = read_loc(&a.loc)?;
    let table = match &a.records {
        Some(p) => {
            run.input(p);
            let records = corpus::read_records(open(p)?)
                .with_context(|| format!("reading {}", p.display()))
                .map_err(input)?;
            stats::category_table(&records, &units)
        }
        None => {
            let classifier = config.classifier().map_err(core_error)?;
            let cats = stats::classify_units(&units, &classifier);
            let keys: Vec<u128> = units.par_iter().map(|u| stats::duplicate_key(&u.raw_text)).collect();
            let mut tally = CategoryTally::new();
            for ((u, c), k) in units.iter().zip(cats).zip(keys) {
                tally.add(u.kind, c, k);
            }
            tally.finish()
        }
    };
    let hist = stats::comments_per_file_histogram(&files, &units);
    let p = |s: &str| with_suffix(&a.out_prefix, s);
    write_file(&p(".categories.json"), &json_pretty(&table)?)?;
    write_file(&p(".categories.txt"), table.to_text().as_bytes())?;
    write_file(&p(".categories.csv"), table.to_csv().as_bytes())?;
    write_file(&p(".histogram.json"), &json_pretty(&hist)?)?;
    write_file(&p(".histogram.csv"), stats::histogram_csv(&hist).as_bytes())?;
    write_file(&p(".histogram.txt"), stats::histogram_text(&hist).as_bytes())?;
    for s in [
        ".categories.json",
        ".categories.txt",
        ".categories.csv",
        ".histogram.json",
        ".histogram.csv",
        ".histogram.txt",
    ] {
        run.output(&p(s));
    }
    run.finish(&a.out_prefix)
}

fn train(a: TrainArgs, config: &Config) -> CliResult<()> {
    let mut run = Run::new("train", config);
    let seed = a.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let holdout = a.holdout.or(config.holdout).unwrap_or(DEFAULT_HOLDOUT);
    let vocab_size = a.vocab_size.or(config.vocab_size).unwrap_or(DEFAULT_VOCAB_SIZE);
    run.seed = Some(seed);
    run.set("holdout", holdout);
    run.set("vocab_size", vocab_size);
    run.input(&a.input);
    let sentences = read_lines_tokens(&a.input)?;
    let split = holdout_split(&sentences, holdout, seed);
    if let Some(w) = &split.warning {
        log::warn!("{w}");
        run.set("warning", w);
    }
    let model = NGramModel::train_with_vocab(&split.train, vocab_size);
    let mut out = create(&a.model)?;
    model.write_json(&mut out).map_err(internal)?;
    out.flush().map_err(internal)?;
    let prefixes_path = with_suffix(&a.model, ".prefixes.txt");
    let refs_path = with_suffix(&a.model, ".references.txt");
    let mut buf = Vec::new();
    corpus::write_sentences(&mut buf, &split.prefixes()).map_err(internal)?;
    write_file(&prefixes_path, &buf)?;
    buf.clear();
    corpus::write_sentences(&mut buf, &split.held_out).map_err(internal)?;
    write_file(&refs_path, &buf)?;
    run.set("train_sentences", split.train.len());
    run.set("held_out", split.held_out.len());
    run.set("contexts", model.context_count());
    run.output(&a.model);
    run.output(&prefixes_path);
    run.output(&refs_path);
    run.finish(&a.model)
}

fn load_model(path: &Path) -> CliResult<NGramModel> {
    NGramModel::read_json(open(path)?)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(input)
}

fn generate(a: GenerateArgs, config: &Config) -> CliResult<()> {
    let mut run = Run::new("generate", config);
    let threshold = a.threshold.or(config.threshold).unwrap_or(DEFAULT_THRESHOLD);
    let max_len = a.max_len.or(config.max_len).unwrap_or(DEFAULT_MAX_LEN);
    if !(0.0..=1.0).contains(&threshold) {
        return Err(input(anyhow!("--threshold must be within [0, 1]")));
    }
    if max_len < ORDER {
        return Err(input(anyhow!("--max-len must be at least {ORDER}")));
    }
    run.set("threshold", threshold);
    run.set("max_len", max_len);
    run.input(&a.model);
    run.input(&a.prefixes);
    let model = load_model(&a.model)?;
    let prefixes = read_lines_tokens(&a.prefixes)?;
    if let Some(i) = prefixes.iter().position(|p| p.len() != ORDER) {
        return Err(input(anyhow!(
            "{}:{}: a prefix needs exactly {ORDER} tokens, found {}",
            a.prefixes.display(),
            i + 1,
            prefixes[i].len()
        )));
    }
    let results: Vec<GenerationResult> = prefixes
        .par_iter()
        .map(|p| model.complete(p, threshold, max_len))
        .collect();
    let outputs: Vec<&[String]> = results.iter().map(|r| r.output.as_slice()).collect();
    let mut buf = Vec::new();
    for o in outputs {
        buf.extend_from_slice(o.join(" ").as_bytes());
        buf.push(b'\n');
    }
    write_file(&a.out, &buf)?;
    run.output(&a.out);
    if let Some(d) = &a.details {
        let mut f = create(d)?;
        for r in &results {
            serde_json::to_writer(&mut f, r).map_err(internal)?;
            f.write_all(b"\n").map_err(internal)?;
        }
        f.flush().map_err(internal)?;
        run.output(d);
    }
    run.finish(&a.out)
}

fn read_pairs(candidates: &Path, references: &Path) -> CliResult<(Vec<Vec<String>>, Vec<Vec<String>>)> {
    let c = read_lines_tokens(candidates)?;
    let r = read_lines_tokens(references)?;
    if c.len() != r.len() {
        return Err(input(anyhow!(
            "{} has {} lines but {} has {}",
            candidates.display(),
            c.len(),
            references.display(),
            r.len()
        )));
    }
    Ok((c, r))
}

fn bleu(a: BleuArgs, config: &Config) -> CliResult<()> {
    let mut run = Run::new("bleu", config);
    run.input(&a.candidates);
    run.input(&a.references);
    let (c, r) = read_pairs(&a.candidates, &a.references)?;
    let pairs: Vec<(Vec<String>, Vec<String>)> = c.into_iter().zip(r).collect();
    let report = score_distribution(&pairs);
    let json = with_suffix(&a.out_prefix, ".bleu.json");
    let csv = with_suffix(&a.out_prefix, ".bleu.csv");
    write_file(&json, &json_pretty(&report)?)?;
    write_file(&csv, report.histogram_csv().as_bytes())?;
    run.set("pairs", pairs.len());
    run.output(&json);
    run.output(&csv);
    run.finish(&a.out_prefix)
}

fn read_vocab(path: &Path) -> CliResult<std::collections::BTreeSet<String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(input)?;
    if text.trim_start().starts_with('{') {
        let model = NGramModel::read_json(text.as_bytes())
            .with_context(|| format!("reading {}", path.display()))
            .map_err(input)?;
        Ok(model.vocabulary().token_set())
    } else {
        Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_owned).collect())
    }
}

fn vocab_overlap(a: OverlapArgs, config: &Config) -> CliResult<()> {
    let mut run = Run::new("vocab-overlap", config);
    if a.models.len() != 4 {
        return Err(input(anyhow!("--models needs exactly four files, got {}", a.models.len())));
    }
    let mut sets = Vec::new();
    for m in &a.models {
        run.input(m);
        sets.push(read_vocab(m)?);
    }
    let names: Vec<String> = a.models.iter().map(|m| m.display().to_string()).collect();
    let regions = stats::vocab_overlap(
        [&names[0], &names[1], &names[2], &names[3]],
        [&sets[0], &sets[1], &sets[2], &sets[3]],
    );
    #[derive(Serialize)]
    struct Report<'a> {
        models: &'a [String],
        sizes: Vec<usize>,
        union: u64,
        regions: Vec<stats::OverlapRegion>,
    }
    let report = Report {
        models: &names,
        sizes: sets.iter().map(|s| s.len()).collect(),
        union: regions.iter().map(|r| r.count).sum(),
        regions,
    };
    write_file(&a.out, &json_pretty(&report)?)?;
    run.output(&a.out);
    run.finish(&a.out)
}

fn analyze(a: AnalyzeArgs, config: &Config) -> CliResult<()> {
    let mut run = Run::new("analyze", config);
    run.input(&a.candidates);
    run.input(&a.references);
    let (c, r) = read_pairs(&a.candidates, &a.references)?;
    let results: Vec<GenerationResult> = c
        .into_iter()
        .map(|output| GenerationResult {
            prefix: output.iter().take(ORDER).cloned().collect(),
            output,
            stop_reason: comsieve::ngram::StopReason::BelowThreshold,
        })
        .collect();
    let classifier = config.classifier().map_err(core_error)?;
    let analysis = analyze_generations(&results, &r, classifier.langid());
    write_file(&a.out, &json_pretty(&analysis)?)?;
    run.output(&a.out);
    run.finish(&a.out)
}
