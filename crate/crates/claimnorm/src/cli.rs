//! Command-line entry point: `extract`, `record`, `evaluate`, `baseline`,
//! and `templates` subcommands.
//!
//! Exit codes follow a sysexits-style scheme: 0 success, 2 partial run (some
//! posts failed), 64 usage error, 65 data error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{self, ColumnMap, Corpus, CorpusFormat, GoldClaim, PostRecord, Split};
use crate::eval::{self, EvalReport, ReportFormat};
use crate::gateway::{
    BackendConfig, Gateway, GatewayMode, HttpTransport, DEFAULT_MAX_TOKENS, DEFAULT_TEMPERATURE,
};
use crate::meteor::{MeteorParams, Stage, SynonymTable, TOKENIZER_VERSION};
use crate::pipelines::{
    builtin_strategies, load_strategies, run_strategy, ExtractionTrace, FileTagger,
    PipelineContext, PosTagger, RuleTagger, StrategySpec, DEFAULT_TRUNCATE_LIMIT,
};
use crate::prompts::{builtin_templates, template_checksums, StopwordList, STOPWORD_LIST_ID};

pub const EXIT_OK: u8 = 0;
pub const EXIT_PARTIAL: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;

#[derive(Parser)]
#[command(
    name = "claimnorm",
    version,
    about = "Claim normalization pipelines, record/replay LLM gateway, and METEOR evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an extraction strategy over a corpus, writing traces and a manifest.
    Extract(ExtractArgs),
    /// Extract in record mode, capturing responses into a cassette.
    Record(ExtractArgs),
    /// Score a run directory against gold claims.
    Evaluate(EvaluateArgs),
    /// Run a regurgitation baseline with zero network use.
    Baseline(BaselineArgs),
    /// List prompt templates and their checksums.
    Templates,
}

#[derive(Args, Clone)]
struct CorpusArgs {
    /// Corpus file (csv, tsv or jsonl).
    #[arg(long)]
    corpus: PathBuf,
    /// Corpus format; guessed from the extension when omitted.
    #[arg(long)]
    format: Option<CorpusFormat>,
    /// Which split the corpus file holds.
    #[arg(long, default_value = "validation")]
    split: Split,
    /// Remap source columns: post_id,post_text,normalized_claim.
    #[arg(long)]
    columns: Option<String>,
}

#[derive(Args, Clone)]
struct MeteorArgs {
    #[arg(long = "meteor-alpha", default_value_t = 0.9)]
    alpha: f64,
    #[arg(long = "meteor-beta", default_value_t = 3.0)]
    beta: f64,
    #[arg(long = "meteor-gamma", default_value_t = 0.5)]
    gamma: f64,
    /// Comma-separated stages: exact,stem,synonym.
    #[arg(long = "meteor-stages", default_value = "exact,stem")]
    stages: String,
    /// Synonym table file (word<TAB>syn1,syn2,...); required by the synonym stage.
    #[arg(long)]
    synonyms: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Strategy id from the builtin registry or --strategies file.
    #[arg(long)]
    strategy: String,
    /// JSON array of extra strategy specs, overlaying the builtins.
    #[arg(long)]
    strategies: Option<PathBuf>,
    /// Training corpus supplying the few-shot example pool.
    #[arg(long = "train-corpus")]
    train_corpus: Option<PathBuf>,
    #[arg(long, default_value = "replay")]
    mode: GatewayMode,
    /// Cassette file (required for record and replay modes).
    #[arg(long)]
    cassette: Option<PathBuf>,
    /// Backend config JSON; defaults target the hosted API named within.
    #[arg(long)]
    backend: Option<PathBuf>,
    /// Override the backend's model id.
    #[arg(long)]
    model: Option<String>,
    /// Output directory for traces and the run manifest.
    #[arg(long)]
    out: PathBuf,
    /// Concurrent per-post pipelines.
    #[arg(long, default_value_t = 4)]
    jobs: usize,
    #[command(flatten)]
    meteor: MeteorArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Run directory; pass twice to compare two runs.
    #[arg(long, num_args = 1, action = clap::ArgAction::Append)]
    run: Vec<PathBuf>,
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    meteor: MeteorArgs,
    /// Bootstrap resamples for a confidence interval (opt-in).
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long, default_value_t = 17)]
    seed: u64,
    #[arg(long = "report-format", default_value = "markdown")]
    report_format: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// full | truncate:N | content-words
    #[arg(long)]
    kind: String,
    /// TSV tagger (word<TAB>noun|verb|other) for content-words.
    #[arg(long)]
    tagger: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

/// Everything reproducibility needs to rerun or audit a run; written before
/// the first LLM call.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub strategy_id: String,
    pub backend_mode: String,
    pub model_id: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub template_checksums: BTreeMap<String, String>,
    pub stopword_list_id: String,
    pub tokenizer_version: String,
    pub meteor: MeteorParams,
    pub corpus_digest: String,
    pub created_at: String,
    pub posts: Vec<String>,
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.into(),
        }
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Extract(args) => cmd_extract(args, None),
        Command::Record(args) => cmd_extract(args, Some(GatewayMode::Record)),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Baseline(args) => cmd_baseline(args),
        Command::Templates => cmd_templates(),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn parse_columns(spec: &Option<String>) -> Result<ColumnMap, CliError> {
    let Some(spec) = spec else {
        return Ok(ColumnMap::default());
    };
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 3 || parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::usage(format!(
            "--columns expects post_id,post_text,normalized_claim names, got {spec:?}"
        )));
    }
    Ok(ColumnMap {
        post_id: parts[0].to_string(),
        post_text: parts[1].to_string(),
        normalized_claim: parts[2].to_string(),
    })
}

fn load_corpus_args(args: &CorpusArgs) -> Result<Corpus, CliError> {
    let format = args
        .format
        .unwrap_or_else(|| CorpusFormat::from_path(&args.corpus));
    let columns = parse_columns(&args.columns)?;
    corpus::load_corpus_with_columns(&args.corpus, format, args.split, &columns)
        .map_err(|e| CliError::data(e.to_string()))
}

fn meteor_params(args: &MeteorArgs) -> Result<(MeteorParams, Option<SynonymTable>), CliError> {
    let mut stages = Vec::new();
    for name in args.stages.split(',') {
        let stage = match name.trim() {
            "exact" => Stage::Exact,
            "stem" => Stage::Stem,
            "synonym" => Stage::Synonym,
            other => return Err(CliError::usage(format!("unknown meteor stage {other:?}"))),
        };
        stages.push(stage);
    }
    if stages.is_empty() {
        return Err(CliError::usage(
            "--meteor-stages must name at least one stage",
        ));
    }
    let table = match &args.synonyms {
        Some(path) => Some(SynonymTable::load(path).map_err(|e| CliError::data(e.to_string()))?),
        None => None,
    };
    if stages.contains(&Stage::Synonym) && table.is_none() {
        return Err(CliError::usage(
            "the synonym stage requires --synonyms <file>",
        ));
    }
    let params = MeteorParams {
        alpha: args.alpha,
        beta: args.beta,
        gamma: args.gamma,
        stages,
    };
    Ok((params, table))
}

fn sanitize_filename(post_id: &str) -> String {
    let cleaned: String = post_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if cleaned == post_id && !cleaned.is_empty() {
        cleaned
    } else {
        let digest = hex::encode(Sha256::digest(post_id.as_bytes()));
        format!(
            "{}-{}",
            if cleaned.is_empty() { "post" } else { &cleaned },
            &digest[..8]
        )
    }
}

fn deterministic_run_id(
    strategy_id: &str,
    mode: &str,
    model_id: &str,
    corpus_digest: &str,
    checksums: &BTreeMap<String, String>,
) -> String {
    let mut hasher = Sha256::new();
    for part in [strategy_id, mode, model_id, corpus_digest] {
        hasher.update(part.as_bytes());
        hasher.update([0]);
    }
    for (id, checksum) in checksums {
        hasher.update(id.as_bytes());
        hasher.update([0]);
        hasher.update(checksum.as_bytes());
        hasher.update([0]);
    }
    format!("run-{}", &hex::encode(hasher.finalize())[..12])
}

fn file_digest(path: &Path) -> Result<String, CliError> {
    let bytes =
        std::fs::read(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::data(format!("serializing {}: {e}", path.display())))?;
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

fn cmd_extract(args: ExtractArgs, forced_mode: Option<GatewayMode>) -> Result<u8, CliError> {
    let mode = forced_mode.unwrap_or(args.mode);
    let registry = match &args.strategies {
        Some(path) => load_strategies(path).map_err(|e| CliError::data(e.to_string()))?,
        None => builtin_strategies(),
    };
    let Some(spec) = registry.get(&args.strategy) else {
        return Err(CliError::usage(format!(
            "unknown strategy id {:?}; known: {}",
            args.strategy,
            registry.keys().cloned().collect::<Vec<_>>().join(", ")
        )));
    };
    spec.validate()
        .map_err(|e| CliError::usage(e.to_string()))?;

    let corpus = load_corpus_args(&args.corpus)?;
    let pool = match &args.train_corpus {
        Some(path) => {
            let format = CorpusFormat::from_path(path);
            let train = corpus::load_corpus_with_columns(
                path,
                format,
                Split::Train,
                &parse_columns(&args.corpus.columns)?,
            )
            .map_err(|e| CliError::data(e.to_string()))?;
            Some(corpus::few_shot_pool(&train).map_err(|e| CliError::data(e.to_string()))?)
        }
        None => None,
    };
    if spec.kind.needs_pool() && pool.is_none() {
        return Err(CliError::usage(format!(
            "strategy {} needs --train-corpus for its example pool",
            spec.strategy_id
        )));
    }

    let mut backend = match &args.backend {
        Some(path) => BackendConfig::load(path).map_err(|e| CliError::data(e.to_string()))?,
        None => BackendConfig::default(),
    };
    if let Some(model) = &args.model {
        backend.model_id = model.clone();
    }
    let model_id = backend.model_id.clone();

    let gateway = match mode {
        GatewayMode::Live => Gateway::live(backend, Arc::new(HttpTransport)),
        GatewayMode::Record => {
            let cassette = args
                .cassette
                .as_ref()
                .ok_or_else(|| CliError::usage("record mode requires --cassette"))?;
            Gateway::recorder(backend, Arc::new(HttpTransport), cassette)
                .map_err(|e| CliError::data(e.to_string()))?
        }
        GatewayMode::Replay => {
            let cassette = args
                .cassette
                .as_ref()
                .ok_or_else(|| CliError::usage("replay mode requires --cassette"))?;
            Gateway::replayer(backend, cassette).map_err(|e| CliError::data(e.to_string()))?
        }
    };

    let (params, _synonyms) = meteor_params(&args.meteor)?;
    let templates = builtin_templates();
    let stopwords = StopwordList::builtin();
    let tagger = RuleTagger::default();
    let ctx = PipelineContext {
        gateway: &gateway,
        templates: &templates,
        stopwords: &stopwords,
        tagger: &tagger,
    };

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::data(format!("{}: {e}", args.out.display())))?;
    let checksums = template_checksums();
    let corpus_digest = file_digest(&args.corpus.corpus)?;
    let mode_name = match mode {
        GatewayMode::Live => "live",
        GatewayMode::Record => "record",
        GatewayMode::Replay => "replay",
    };
    let run_id = deterministic_run_id(
        &spec.strategy_id,
        mode_name,
        &model_id,
        &corpus_digest,
        &checksums,
    );
    let manifest = RunManifest {
        run_id: run_id.clone(),
        strategy_id: spec.strategy_id.clone(),
        backend_mode: mode_name.to_string(),
        model_id,
        temperature: DEFAULT_TEMPERATURE,
        max_tokens: DEFAULT_MAX_TOKENS,
        template_checksums: checksums,
        stopword_list_id: STOPWORD_LIST_ID.to_string(),
        tokenizer_version: TOKENIZER_VERSION.to_string(),
        meteor: params.clone(),
        corpus_digest,
        created_at: chrono::Utc::now().to_rfc3339(),
        posts: corpus.records.iter().map(|r| r.post_id.clone()).collect(),
    };
    write_json(&args.out.join("manifest.json"), &manifest)?;

    let traces = run_posts(
        &ctx,
        spec,
        &registry,
        &corpus,
        pool.as_deref(),
        &params,
        args.jobs,
    );

    let mut failures: Vec<(String, String)> = Vec::new();
    for (record, outcome) in corpus.records.iter().zip(traces) {
        match outcome {
            Some(Ok(mut trace)) => {
                trace.run_id = run_id.clone();
                let name = sanitize_filename(&record.post_id);
                write_json(&args.out.join(format!("{name}.json")), &trace)?;
            }
            Some(Err(e)) => failures.push((record.post_id.clone(), e)),
            None => failures.push((record.post_id.clone(), "not attempted".to_string())),
        }
    }

    if failures.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "{} of {} posts failed:",
            failures.len(),
            corpus.records.len()
        );
        for (post_id, error) in &failures {
            eprintln!("  {post_id}: {error}");
        }
        write_json(&args.out.join("failures.json"), &failures)?;
        Ok(EXIT_PARTIAL)
    }
}

type PostOutcome = Option<Result<ExtractionTrace, String>>;

fn run_posts(
    ctx: &PipelineContext,
    spec: &StrategySpec,
    registry: &BTreeMap<String, StrategySpec>,
    corpus: &Corpus,
    pool: Option<&[(PostRecord, GoldClaim)]>,
    params: &MeteorParams,
    jobs: usize,
) -> Vec<PostOutcome> {
    let results: Vec<Mutex<PostOutcome>> =
        corpus.records.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let jobs = jobs.max(1).min(corpus.records.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::SeqCst);
                if index >= corpus.records.len() {
                    break;
                }
                let post = &corpus.records[index];
                let gold = corpus.gold_for(&post.post_id);
                let outcome = run_strategy(ctx, spec, registry, post, pool, gold, params)
                    .map_err(|e| e.to_string());
                *results[index].lock().expect("result lock") = Some(outcome);
            });
        }
    });
    results
        .into_iter()
        .map(|m| m.into_inner().expect("result lock"))
        .collect()
}

fn read_run_dir(dir: &Path) -> Result<Vec<ExtractionTrace>, CliError> {
    let mut traces = Vec::new();
    let entries =
        std::fs::read_dir(dir).map_err(|e| CliError::data(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|ext| ext == "json")
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n != "manifest.json" && n != "failures.json")
        })
        .collect();
    paths.sort();
    for path in paths {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        let trace: ExtractionTrace = serde_json::from_str(&text)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        traces.push(trace);
    }
    if traces.is_empty() {
        return Err(CliError::data(format!(
            "{}: no trace files found",
            dir.display()
        )));
    }
    Ok(traces)
}

fn evaluate_one(
    dir: &Path,
    corpus: &Corpus,
    params: &MeteorParams,
    bootstrap: Option<usize>,
    seed: u64,
) -> Result<EvalReport, CliError> {
    let traces = read_run_dir(dir)?;
    let missing: Vec<&str> = traces
        .iter()
        .filter(|t| corpus.gold_for(&t.post_id).is_none())
        .map(|t| t.post_id.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(CliError::data(format!(
            "posts without gold claims: {}",
            missing.join(", ")
        )));
    }
    let mut report =
        eval::evaluate_run(&traces, corpus, params).map_err(|e| CliError::data(e.to_string()))?;
    if let Some(resamples) = bootstrap {
        let scores: Vec<f64> = report.records.iter().map(|r| r.breakdown.score).collect();
        let (low, high) = eval::bootstrap_ci(&scores, resamples, seed, 0.95)
            .map_err(|e| CliError::data(e.to_string()))?;
        report.bootstrap_ci = Some(eval::BootstrapCi {
            low,
            high,
            resamples,
            seed,
        });
    }
    Ok(report)
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<u8, CliError> {
    if args.run.is_empty() || args.run.len() > 2 {
        return Err(CliError::usage("pass --run once, or twice to compare"));
    }
    let corpus = load_corpus_args(&args.corpus)?;
    let (params, _synonyms) = meteor_params(&args.meteor)?;

    let mut reports = Vec::new();
    for dir in &args.run {
        reports.push(evaluate_one(
            dir,
            &corpus,
            &params,
            args.bootstrap,
            args.seed,
        )?);
    }

    let mut output = eval::render_report(&reports, args.report_format);
    for report in &reports {
        if let Some(ci) = &report.bootstrap_ci {
            output.push_str(&format!(
                "bootstrap 95% CI for {}: [{:.4}, {:.4}] (resamples={}, seed={})\n",
                report.strategy_id, ci.low, ci.high, ci.resamples, ci.seed
            ));
        }
    }
    if reports.len() == 2 {
        let cmp = eval::compare_runs(&reports[0], &reports[1])
            .map_err(|e| CliError::data(e.to_string()))?;
        output.push_str(&format!(
            "compare {} vs {}: mean delta {:+.4}, {} wins / {} losses / {} ties\n",
            cmp.strategy_a, cmp.strategy_b, cmp.mean_delta, cmp.a_wins, cmp.b_wins, cmp.ties
        ));
    }

    match &args.out {
        Some(path) => std::fs::write(path, &output)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?,
        None => print!("{output}"),
    }
    Ok(EXIT_OK)
}

fn cmd_baseline(args: BaselineArgs) -> Result<u8, CliError> {
    let corpus = load_corpus_args(&args.corpus)?;

    enum Kind {
        Full,
        Truncate(usize),
        ContentWords,
    }
    let kind = if args.kind == "full" {
        Kind::Full
    } else if args.kind == "content-words" {
        Kind::ContentWords
    } else if let Some(rest) = args.kind.strip_prefix("truncate") {
        let limit = match rest.strip_prefix(':') {
            Some(n) => n
                .parse::<usize>()
                .ok()
                .filter(|n| *n >= 1)
                .ok_or_else(|| CliError::usage(format!("bad truncate limit {rest:?}")))?,
            None if rest.is_empty() => DEFAULT_TRUNCATE_LIMIT,
            None => {
                return Err(CliError::usage(format!(
                    "unknown baseline kind {:?}",
                    args.kind
                )))
            }
        };
        Kind::Truncate(limit)
    } else {
        return Err(CliError::usage(format!(
            "unknown baseline kind {:?} (full | truncate:N | content-words)",
            args.kind
        )));
    };

    let tagger: Box<dyn PosTagger> = match &args.tagger {
        Some(path) => Box::new(FileTagger::load(path).map_err(|e| CliError::data(e.to_string()))?),
        None => Box::new(RuleTagger::default()),
    };

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::data(format!("{}: {e}", args.out.display())))?;

    let (strategy_id, spec) = match kind {
        Kind::Full => ("baseline_full", None),
        Kind::Truncate(limit) => ("baseline_truncate", Some(limit)),
        Kind::ContentWords => ("baseline_content_words", None),
    };
    let corpus_digest = file_digest(&args.corpus.corpus)?;
    let checksums = template_checksums();
    let run_id = deterministic_run_id(strategy_id, "none", "-", &corpus_digest, &checksums);
    let manifest = RunManifest {
        run_id: run_id.clone(),
        strategy_id: strategy_id.to_string(),
        backend_mode: "none".to_string(),
        model_id: String::new(),
        temperature: DEFAULT_TEMPERATURE,
        max_tokens: DEFAULT_MAX_TOKENS,
        template_checksums: checksums,
        stopword_list_id: STOPWORD_LIST_ID.to_string(),
        tokenizer_version: TOKENIZER_VERSION.to_string(),
        meteor: MeteorParams::default(),
        corpus_digest,
        created_at: chrono::Utc::now().to_rfc3339(),
        posts: corpus.records.iter().map(|r| r.post_id.clone()).collect(),
    };
    write_json(&args.out.join("manifest.json"), &manifest)?;

    for record in &corpus.records {
        let mut trace = match kind {
            Kind::Full => crate::pipelines::baseline_full(record),
            Kind::Truncate(limit) => crate::pipelines::baseline_truncate(record, limit),
            Kind::ContentWords => crate::pipelines::baseline_content_words(record, tagger.as_ref()),
        };
        let _ = spec;
        trace.strategy_id = strategy_id.to_string();
        trace.run_id = run_id.clone();
        let name = sanitize_filename(&record.post_id);
        write_json(&args.out.join(format!("{name}.json")), &trace)?;
    }
    Ok(EXIT_OK)
}

fn cmd_templates() -> Result<u8, CliError> {
    let templates = builtin_templates();
    println!(
        "{:<26} {:<8} {:<14} checksum",
        "template_id", "system", "origin"
    );
    for (id, template) in &templates {
        println!(
            "{:<26} {:<8} {:<14} {}",
            id,
            if template.system_text.is_some() {
                "yes"
            } else {
                "no"
            },
            if template.reconstruction {
                "reconstructed"
            } else {
                "verbatim"
            },
            template.checksum()
        );
    }
    Ok(EXIT_OK)
}

impl clap::builder::ValueParserFactory for CorpusFormat {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<CorpusFormat>())
    }
}

impl clap::builder::ValueParserFactory for Split {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<Split>())
    }
}

impl clap::builder::ValueParserFactory for GatewayMode {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<GatewayMode>())
    }
}

impl clap::builder::ValueParserFactory for ReportFormat {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<ReportFormat>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filenames_sanitized_deterministically() {
        assert_eq!(sanitize_filename("post_123"), "post_123");
        assert_eq!(sanitize_filename("a/b"), sanitize_filename("a/b"));
        assert_ne!(sanitize_filename("a/b"), sanitize_filename("a_b"));
        assert!(sanitize_filename("a/b").starts_with("a_b-"));
        assert!(!sanitize_filename("").is_empty());
    }

    #[test]
    fn run_ids_depend_on_inputs() {
        let checksums = template_checksums();
        let a = deterministic_run_id("kbfp", "replay", "m", "digest", &checksums);
        let b = deterministic_run_id("kbfp", "replay", "m", "digest", &checksums);
        let c = deterministic_run_id("kbfp", "replay", "m", "other", &checksums);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.starts_with("run-"));
    }

    #[test]
    fn column_spec_parses() {
        let map = parse_columns(&Some("id,text,claim".to_string())).unwrap();
        assert_eq!(map.post_id, "id");
        assert!(parse_columns(&Some("only,two".to_string())).is_err());
        assert!(parse_columns(&None).is_ok());
    }
}
