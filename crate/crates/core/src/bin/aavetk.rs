//! Command-line front end. Each analysis stage is its own subcommand so
//! expensive steps (generation especially) cache to disk and are never
//! re-run just to tweak statistics downstream.

use std::collections::BTreeMap;
use std::error::Error;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use aave_toolkit::analysis::{
    compare_corpora, compute_densities, contextual_compare, stability_analysis,
    subject_sentence_counts, top_human_contexts, Denominator, SUBJECT_LOCAL_FEATURES,
};
use aave_toolkit::config::Config;
use aave_toolkit::corpus::{
    load_corpus, load_corpus_cache, save_corpus, Corpus, IngestFormat, IngestOptions,
    Origin,
};
use aave_toolkit::detectors::{
    detect_all, evaluate_against_gold, parse_gold_tsv, FeatureHit, FeatureKind,
};
use aave_toolkit::generator::{
    run_job, DemographicWeights, GenerationJob, ItemStatus, PromptTemplate, TemplateKind,
};
use aave_toolkit::pipeline::{run_pipeline, CorpusSpec};
use aave_toolkit::report::{
    emit_plot_data, render_context_table, render_feature_table, render_sentiment,
    render_stability, CorpusSentiment, ModelContextTable, ModelReport, ReportBundle,
    ReportFormat,
};
use aave_toolkit::sentiment::{summarize, SentimentLexicon};
use aave_toolkit::tagger::Lexicon;

#[derive(Parser)]
#[command(
    name = "aavetk",
    version,
    about = "Corpus analysis of AAVE grammatical features in human and model text"
)]
struct Cli {
    /// Config file (key=value lines); defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Interview,
    Tweets,
    Jsonl,
}

impl From<FormatArg> for IngestFormat {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Interview => IngestFormat::Interview,
            FormatArg::Tweets => IngestFormat::Tweets,
            FormatArg::Jsonl => IngestFormat::Jsonl,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OriginArg {
    Human,
    Model,
}

#[derive(Clone, Copy, ValueEnum)]
enum TemplateArg {
    Coraal,
    Twitter,
}

impl From<TemplateArg> for TemplateKind {
    fn from(arg: TemplateArg) -> Self {
        match arg {
            TemplateArg::Coraal => TemplateKind::CoraalStyle,
            TemplateArg::Twitter => TemplateKind::TwitterStyle,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Read raw text files into a cached corpus.
    Ingest(IngestArgs),
    /// Part-of-speech tag a cached corpus.
    Tag(TagArgs),
    /// Run all feature detectors over a tagged corpus.
    Detect(DetectArgs),
    /// Score detector output against hand-labeled sentences.
    EvalDetectors(EvalArgs),
    /// Compare feature densities between a human and a model corpus.
    Compare(CompareArgs),
    /// Per-subject feature rates in both corpora.
    Context(ContextArgs),
    /// Sentence sentiment summary for one corpus.
    Sentiment(SentimentArgs),
    /// Feature-density spread across random subsamples.
    Stability(StabilityArgs),
    /// Request completions from a chat endpoint, archiving every response.
    Generate(GenerateArgs),
    /// Render a result bundle to markdown, CSV, or JSON.
    Report(ReportArgs),
    /// The whole pipeline: ingest through report in one deterministic run.
    RunAll(RunAllArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Input files, read in the order given.
    #[arg(long, required = true, num_args = 1.., value_name = "PATH")]
    input: Vec<PathBuf>,
    #[arg(long, value_enum)]
    format: FormatArg,
    #[arg(long, value_enum)]
    origin: OriginArg,
    /// Corpus name used in every table and provenance line.
    #[arg(long)]
    name: String,
    /// Model that produced the text (model corpora only).
    #[arg(long)]
    model_name: Option<String>,
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args)]
struct TagArgs {
    #[arg(long, value_name = "PATH")]
    corpus: PathBuf,
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    /// Tagged corpus cache.
    #[arg(long, value_name = "PATH")]
    corpus: PathBuf,
    /// Where the hit list (JSON) goes.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Sentences to score, one JSON object per line.
    #[arg(long, value_name = "PATH")]
    corpus: PathBuf,
    /// Gold labels: sentence-id TAB feature TAB 0/1.
    #[arg(long, value_name = "PATH")]
    gold: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Tagged human corpus cache.
    #[arg(long, value_name = "PATH")]
    human: PathBuf,
    /// Tagged model corpus cache.
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Overrides the config denominator.
    #[arg(long)]
    denominator: Option<Denominator>,
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args)]
struct ContextArgs {
    #[arg(long, value_name = "PATH")]
    human: PathBuf,
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Feature slug, e.g. habitual_be.
    #[arg(long)]
    feature: FeatureKind,
    /// How many of the most frequent human subjects to keep.
    #[arg(long)]
    top: Option<usize>,
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args)]
struct SentimentArgs {
    #[arg(long, value_name = "PATH")]
    corpus: PathBuf,
    /// Valence lexicon (token TAB valence); builtin when omitted.
    #[arg(long, value_name = "PATH")]
    lexicon: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long, value_name = "PATH")]
    corpus: PathBuf,
    #[arg(long)]
    subsamples: Option<usize>,
    /// Sentences per subsample (clamped to the corpus size).
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    template: TemplateArg,
    /// Custom template text; builtin prompt when omitted.
    #[arg(long, value_name = "PATH")]
    template_file: Option<PathBuf>,
    /// Completions to request.
    #[arg(long)]
    n: usize,
    /// Model name sent in each request.
    #[arg(long)]
    model: String,
    /// Overrides the config endpoint.
    #[arg(long)]
    endpoint: Option<String>,
    /// Slot-sampling weights (TOML); required for the coraal template.
    #[arg(long, value_name = "PATH")]
    weights: Option<PathBuf>,
    /// Archive directory; also the resume state.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the parsed documents as JSON lines for `ingest`.
    #[arg(long, value_name = "PATH")]
    docs_out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Bundle JSON produced by run-all.
    #[arg(long, value_name = "PATH")]
    bundle: PathBuf,
    #[arg(long)]
    format: ReportFormat,
    /// Directory the rendered files go into.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct RunAllArgs {
    /// Human corpus input files.
    #[arg(long, required = true, num_args = 1.., value_name = "PATH")]
    human: Vec<PathBuf>,
    #[arg(long, value_enum)]
    human_format: FormatArg,
    #[arg(long, default_value = "human")]
    human_name: String,
    /// Model corpus file; repeat for several models. Each file becomes one
    /// corpus named after its stem.
    #[arg(long, required = true, value_name = "PATH")]
    model: Vec<PathBuf>,
    #[arg(long, value_enum)]
    model_format: FormatArg,
    /// Directory for the bundle and every rendered surface.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn Error>> {
    let config = match &cli.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Ingest(args) => cmd_ingest(&config, args),
        Command::Tag(args) => cmd_tag(&config, args),
        Command::Detect(args) => cmd_detect(&config, args),
        Command::EvalDetectors(args) => cmd_eval(&config, args),
        Command::Compare(args) => cmd_compare(&config, args),
        Command::Context(args) => cmd_context(&config, args),
        Command::Sentiment(args) => cmd_sentiment(&config, args),
        Command::Stability(args) => cmd_stability(&config, args),
        Command::Generate(args) => cmd_generate(&config, args),
        Command::Report(args) => cmd_report(args),
        Command::RunAll(args) => cmd_run_all(&config, args),
    }
}

fn ingest_options(config: &Config, model_name: Option<String>) -> IngestOptions {
    IngestOptions {
        annotation_patterns: config.cleaner_patterns.clone(),
        exclude_speakers: config.exclude_speakers.clone(),
        model_name,
    }
}

fn tagger_lexicon(config: &Config) -> Result<Lexicon, Box<dyn Error>> {
    Ok(match &config.tagger_lexicon {
        Some(path) => Lexicon::from_file(path)?,
        None => Lexicon::builtin(),
    })
}

fn load_tagged(path: &Path) -> Result<Corpus, Box<dyn Error>> {
    let (corpus, tagged) = load_corpus_cache(path)?;
    if !tagged {
        return Err(format!(
            "{} is untagged; run `aavetk tag` on it first",
            path.display()
        )
        .into());
    }
    Ok(corpus)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Box<dyn Error>> {
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    std::fs::write(path, body)?;
    Ok(())
}

fn cmd_ingest(config: &Config, args: IngestArgs) -> Result<(), Box<dyn Error>> {
    let origin = match args.origin {
        OriginArg::Human => Origin::Human,
        OriginArg::Model => Origin::Model,
    };
    let options = ingest_options(config, args.model_name);
    let corpus = load_corpus(&args.input, args.format.into(), origin, &args.name, &options)?;
    save_corpus(&corpus, false, &args.out)?;
    println!(
        "ingested {} documents / {} sentences into {}",
        corpus.stats.document_count,
        corpus.stats.sentence_count,
        args.out.display()
    );
    Ok(())
}

fn cmd_tag(config: &Config, args: TagArgs) -> Result<(), Box<dyn Error>> {
    let (mut corpus, _) = load_corpus_cache(&args.corpus)?;
    let lexicon = tagger_lexicon(config)?;
    lexicon.tag_corpus(&mut corpus);
    save_corpus(&corpus, true, &args.out)?;
    println!("tagged {} sentences into {}", corpus.sentences.len(), args.out.display());
    Ok(())
}

fn detect_hits(config: &Config, path: &Path) -> Result<(Corpus, Vec<FeatureHit>), Box<dyn Error>> {
    let corpus = load_tagged(path)?;
    if corpus.sentences.is_empty() {
        return Err(format!("detect: empty corpus: {}", corpus.name).into());
    }
    let lexicon = tagger_lexicon(config)?;
    let hits = detect_all(&corpus, &lexicon);
    Ok((corpus, hits))
}

fn cmd_detect(config: &Config, args: DetectArgs) -> Result<(), Box<dyn Error>> {
    let (corpus, hits) = detect_hits(config, &args.corpus)?;
    write_json(&args.out, &hits)?;
    let mut counts: BTreeMap<FeatureKind, usize> = BTreeMap::new();
    for hit in &hits {
        *counts.entry(hit.feature).or_default() += 1;
    }
    println!("{}: {} hits in {} sentences", corpus.name, hits.len(), corpus.sentences.len());
    for feature in FeatureKind::ALL {
        println!("  {:<20} {}", feature.slug(), counts.get(&feature).copied().unwrap_or(0));
    }
    Ok(())
}

fn cmd_eval(config: &Config, args: EvalArgs) -> Result<(), Box<dyn Error>> {
    let options = ingest_options(config, None);
    let mut corpus = load_corpus(
        &[args.corpus.clone()],
        IngestFormat::Jsonl,
        Origin::Human,
        "eval",
        &options,
    )?;
    let lexicon = tagger_lexicon(config)?;
    lexicon.tag_corpus(&mut corpus);
    let hits = detect_all(&corpus, &lexicon);
    let gold_text = std::fs::read_to_string(&args.gold)?;
    let gold = parse_gold_tsv(&gold_text)?;
    let table = evaluate_against_gold(&hits, &gold);
    let mut agree = 0;
    let mut total = 0;
    println!("{:<20} {:>7} {:>7} {:>9}", "feature", "agree", "total", "accuracy");
    for (feature, score) in &table {
        agree += score.agree;
        total += score.total;
        println!(
            "{:<20} {:>7} {:>7} {:>9.4}",
            feature.slug(),
            score.agree,
            score.total,
            score.accuracy()
        );
    }
    if total > 0 {
        println!("{:<20} {:>7} {:>7} {:>9.4}", "overall", agree, total, agree as f64 / total as f64);
    }
    Ok(())
}

fn cmd_compare(config: &Config, args: CompareArgs) -> Result<(), Box<dyn Error>> {
    let denominator = args.denominator.unwrap_or(config.denominator);
    let (human_corpus, human_hits) = detect_hits(config, &args.human)?;
    let (model_corpus, model_hits) = detect_hits(config, &args.model)?;
    let human = compute_densities(&human_hits, &human_corpus, denominator);
    let densities = compute_densities(&model_hits, &model_corpus, denominator);
    let mut comparisons = compare_corpora(&human, &densities)?;
    for result in &mut comparisons {
        result.significant = result.p_value < config.alpha;
    }
    let model = ModelReport {
        corpus: model_corpus.name.clone(),
        densities,
        comparisons,
    };
    #[derive(serde::Serialize)]
    struct CompareOutput {
        human: aave_toolkit::analysis::DensityTable,
        model: ModelReport,
    }
    write_json(&args.out, &CompareOutput { human, model })?;
    println!(
        "compared {} against {} ({})",
        model_corpus.name,
        human_corpus.name,
        denominator.slug()
    );
    Ok(())
}

fn cmd_context(config: &Config, args: ContextArgs) -> Result<(), Box<dyn Error>> {
    if !SUBJECT_LOCAL_FEATURES.contains(&args.feature) {
        return Err(format!(
            "`{}` spans a construction, not a single subject",
            args.feature.slug()
        )
        .into());
    }
    let top = args.top.unwrap_or(config.top_contexts);
    let (human_corpus, human_hits) = detect_hits(config, &args.human)?;
    let (model_corpus, model_hits) = detect_hits(config, &args.model)?;
    let human_subjects = subject_sentence_counts(&human_corpus);
    let picked: Vec<String> = top_human_contexts(&human_hits, args.feature, top)
        .into_iter()
        .filter(|s| human_subjects.get(s).copied().unwrap_or(0) > 0)
        .collect();
    if picked.is_empty() {
        return Err(format!(
            "no {} contexts found in {}",
            args.feature.slug(),
            human_corpus.name
        )
        .into());
    }
    let mut table = contextual_compare(
        args.feature,
        &picked,
        &human_corpus,
        &human_hits,
        &model_corpus,
        &model_hits,
    )?;
    for row in &mut table.contexts {
        if let Some(cell) = &mut row.model {
            cell.comparison.significant = cell.comparison.p_value < config.alpha;
        }
    }
    let out = ModelContextTable {
        model: model_corpus.name.clone(),
        table,
    };
    write_json(&args.out, &out)?;
    println!(
        "{} contexts for {} written to {}",
        out.table.contexts.len(),
        args.feature.slug(),
        args.out.display()
    );
    Ok(())
}

fn cmd_sentiment(config: &Config, args: SentimentArgs) -> Result<(), Box<dyn Error>> {
    let (corpus, _) = load_corpus_cache(&args.corpus)?;
    let lexicon = match args.lexicon.as_deref().or(config.sentiment_lexicon.as_deref()) {
        Some(path) => SentimentLexicon::from_file(path)?,
        None => SentimentLexicon::builtin(),
    };
    let summary = summarize(&corpus, &lexicon)?;
    let out = CorpusSentiment {
        corpus: corpus.name.clone(),
        summary,
    };
    write_json(&args.out, &out)?;
    println!(
        "{}: mean compound {:.4} over {} sentences",
        out.corpus, out.summary.mean_compound, out.summary.n_sentences
    );
    Ok(())
}

fn cmd_stability(config: &Config, args: StabilityArgs) -> Result<(), Box<dyn Error>> {
    let (corpus, hits) = detect_hits(config, &args.corpus)?;
    let subsamples = args.subsamples.unwrap_or(config.stability_subsamples);
    let size = args
        .size
        .unwrap_or(config.stability_size)
        .min(corpus.sentences.len());
    let report = stability_analysis(
        &corpus,
        &hits,
        config.denominator,
        subsamples,
        size,
        config.seed,
    )?;
    write_json(&args.out, &report)?;
    println!(
        "{}: {} subsamples of {} sentences written to {}",
        corpus.name, subsamples, size, args.out.display()
    );
    Ok(())
}

fn cmd_generate(config: &Config, args: GenerateArgs) -> Result<(), Box<dyn Error>> {
    let kind: TemplateKind = args.template.into();
    if kind == TemplateKind::CoraalStyle && args.weights.is_none() {
        return Err("the coraal template needs --weights for its slots".into());
    }
    let template = match &args.template_file {
        Some(path) => PromptTemplate::from_file(kind, path)?,
        None => PromptTemplate::builtin(kind),
    };
    let weights = match &args.weights {
        Some(path) => DemographicWeights::from_file(path)?,
        None => DemographicWeights {
            gender: BTreeMap::new(),
            city: BTreeMap::new(),
        },
    };
    let mut job = GenerationJob::new(
        template,
        args.n,
        &args.model,
        args.endpoint.as_deref().unwrap_or(&config.endpoint),
        &args.out,
    );
    job.temperature = config.temperature;
    job.max_tokens = config.max_tokens;
    job.seed = args.seed.unwrap_or(config.seed);
    job.concurrency = config.concurrency;
    job.max_attempts = config.max_attempts;
    job.retry_backoff_ms = config.retry_backoff_ms;
    job.api_key_var = config.api_key_var.clone();
    let report = run_job(&job, &weights)?;
    let mut archived = 0;
    let mut skipped = 0;
    let mut failed = 0;
    for item in &report.items {
        match &item.status {
            ItemStatus::Archived => archived += 1,
            ItemStatus::Skipped => skipped += 1,
            ItemStatus::Failed(reason) => {
                failed += 1;
                eprintln!("item {:05} failed: {reason}", item.index);
            }
        }
    }
    println!(
        "{} archived, {} skipped, {} failed; {} documents in {}",
        archived,
        skipped,
        failed,
        report.documents.len(),
        args.out.display()
    );
    if let Some(path) = &args.docs_out {
        let mut body = String::new();
        for doc in &report.documents {
            body.push_str(&serde_json::to_string(doc)?);
            body.push('\n');
        }
        std::fs::write(path, body)?;
        println!("documents written to {}", path.display());
    }
    if failed > 0 {
        return Err(format!("{failed} of {} items failed", report.items.len()).into());
    }
    Ok(())
}

/// File-safe corpus names: anything outside [A-Za-z0-9._-] becomes '_'.
fn slugify(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn render_bundle(
    bundle: &ReportBundle,
    format: ReportFormat,
    dir: &Path,
) -> Result<Vec<PathBuf>, Box<dyn Error>> {
    let ext = match format {
        ReportFormat::Markdown => "md",
        ReportFormat::Csv => "csv",
        ReportFormat::Json => "json",
    };
    let mut written = Vec::new();
    let mut emit = |name: String, body: String| -> Result<(), Box<dyn Error>> {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    emit(
        format!("feature_table.{ext}"),
        render_feature_table(&bundle.human, &bundle.models, &bundle.provenance, format),
    )?;
    for ctx in &bundle.contexts {
        emit(
            format!(
                "context_{}_{}.{ext}",
                slugify(&ctx.model),
                ctx.table.feature.slug()
            ),
            render_context_table(ctx, &bundle.provenance, format),
        )?;
    }
    if !bundle.sentiment.is_empty() {
        emit(
            format!("sentiment.{ext}"),
            render_sentiment(&bundle.sentiment, &bundle.provenance, format),
        )?;
    }
    if !bundle.stability.is_empty() {
        emit(
            format!("stability.{ext}"),
            render_stability(&bundle.stability, &bundle.provenance, format),
        )?;
    }
    Ok(written)
}

fn cmd_report(args: ReportArgs) -> Result<(), Box<dyn Error>> {
    let body = std::fs::read_to_string(&args.bundle)?;
    let bundle: ReportBundle = serde_json::from_str(&body)?;
    std::fs::create_dir_all(&args.out)?;
    let written = render_bundle(&bundle, args.format, &args.out)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_run_all(config: &Config, args: RunAllArgs) -> Result<(), Box<dyn Error>> {
    let human = CorpusSpec {
        name: args.human_name.clone(),
        format: args.human_format.into(),
        paths: args.human.clone(),
    };
    let models: Vec<CorpusSpec> = args
        .model
        .iter()
        .map(|path| CorpusSpec {
            name: path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "model".to_string()),
            format: args.model_format.into(),
            paths: vec![path.clone()],
        })
        .collect();
    let bundle = run_pipeline(config, &human, &models)?;
    std::fs::create_dir_all(&args.out)?;
    write_json(&args.out.join("bundle.json"), &bundle)?;
    let mut written = vec![args.out.join("bundle.json")];
    for format in [ReportFormat::Markdown, ReportFormat::Csv, ReportFormat::Json] {
        written.extend(render_bundle(&bundle, format, &args.out)?);
    }
    let plot_path = args.out.join("plot_data.csv");
    std::fs::write(&plot_path, emit_plot_data(&bundle))?;
    written.push(plot_path);
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
