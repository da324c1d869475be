// Copyright 2026 The tbldt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


//! `tbldt`: train rule lists, convert them to probabilistic trees, decode
//! and evaluate.

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use tbldt::active_learning::{self, ALConfig, Budget, SelectionMode};
use tbldt::corpus::{Corpus, TagId};
use tbldt::decoder::{DecodeMode, DecodeOptions, LeftContext, Model, Pipeline, PredictionFile};
use tbldt::metrics::{self, Outcome};
use tbldt::prob_tree::{self, GrowConfig, GrowthTrace, ProbTree};
use tbldt::rules::{default_templates, parse_templates};
use tbldt::synth::SyntheticCorpus;
use tbldt::trainer::{self, RuleList, TrainConfig};

/// Usage errors exit with status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// Validation failures exit with status 1 after the report is written.
#[derive(Debug)]
struct Failed(String);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

#[derive(Parser)]
#[command(name = "tbldt", version, about = "Transformation rule lists as probabilistic decision trees", args_override_self = true)]
pub struct Cli {
    /// key=value file of flag defaults; flags on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; 0 picks one per core. Never changes outputs.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Where to write the run manifest (default: next to --out).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Learn a rule list from a chunked corpus.
    Train(TrainArgs),
    /// Convert a rule list into a probabilistic decision tree.
    Convert(ConvertArgs),
    /// Grow an existing tree further by information gain.
    Grow(GrowArgs),
    /// Tag a corpus with a rule list or tree.
    Decode(DecodeArgs),
    /// Chunk precision/recall/F and, with distributions, cross entropy.
    Eval(EvalArgs),
    /// Rejection curves from a prediction file.
    Curves(CurvesArgs),
    /// Entropy-driven or sequential active-learning simulation.
    Al(AlArgs),
    /// Generate a synthetic chunked corpus.
    Synth(SynthArgs),
    /// Check that a tree reproduces its rule list on a corpus.
    CheckEquivalence(EquivalenceArgs),
    /// Re-execute the command recorded in a manifest.
    #[serde(skip)]
    Rerun {
        manifest_file: PathBuf,
    },
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct RuleParams {
    /// Minimum net score a rule must reach (T).
    #[arg(long, default_value_t = 2)]
    threshold: u64,
    /// Template file: one template per line or comma-separated, atoms joined by `&`.
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Restrict word atoms to the N most ambiguous training words.
    #[arg(long)]
    lexicon_limit: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct TreeParams {
    /// Minimum samples on each side of a split (K).
    #[arg(long, default_value_t = prob_tree::DEFAULT_K)]
    k: usize,
    /// Leaf smoothing constant.
    #[arg(long, default_value_t = prob_tree::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Continue splitting by information gain after conversion.
    #[arg(long, overrides_with = "no_grow")]
    grow: bool,
    #[arg(long, overrides_with = "grow")]
    no_grow: bool,
    /// Minimum information gain of a growth split, in bits.
    #[arg(long, default_value_t = 0.0)]
    min_gain: f64,
}

impl TreeParams {
    fn growing(&self) -> bool {
        !self.no_grow
    }
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct TrainArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Training log (default: `<out>.log.json`).
    #[arg(long)]
    log: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    rules: RuleParams,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct ConvertArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    lexicon_limit: Option<usize>,
    /// Growth trace: mean training log-loss after each split.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    tree: TreeParams,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct GrowArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = prob_tree::DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = 0.0)]
    min_gain: f64,
    #[arg(long)]
    lexicon_limit: Option<usize>,
    /// Stop after this many accepted splits.
    #[arg(long)]
    max_splits: Option<usize>,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    Tree,
    Rules,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum LeftArg {
    Predicted,
    Replay,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PredFormat {
    Columns,
    Jsonl,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct DecodeArgs {
    #[arg(long)]
    model: PathBuf,
    /// Required in tree mode.
    #[arg(long)]
    tree: Option<PathBuf>,
    /// Corpus to tag; its gold column is carried into the output.
    #[arg(long)]
    input: PathBuf,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Tree)]
    mode: ModeArg,
    /// Where left-neighbour chunk labels come from in tree mode.
    #[arg(long, value_enum, default_value_t = LeftArg::Predicted)]
    left: LeftArg,
    #[arg(long, value_enum, default_value_t = PredFormat::Columns)]
    format: PredFormat,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ReportFormat {
    Table,
    Json,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct EvalArgs {
    /// Prediction file in column format.
    #[arg(long)]
    pred: PathBuf,
    /// Gold corpus; must match the prediction file's words. Defaults to the
    /// prediction file's own gold column.
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Fail unless every token carries a distribution.
    #[arg(long)]
    cross_entropy: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum CurveKind {
    Batch,
    Online,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct CurvesArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, value_enum)]
    kind: CurveKind,
    /// Comma-separated rejection percentages (batch) or thresholds (online).
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AlMode {
    Entropy,
    Sequential,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct AlArgs {
    /// Pool of sentences to label.
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = AlMode::Entropy)]
    mode: AlMode,
    /// Initially labeled sentences.
    #[arg(long, default_value_t = 50)]
    t1: usize,
    /// Sentences added per round.
    #[arg(long, default_value_t = 25)]
    t2: usize,
    #[arg(long, conflicts_with = "budget_words")]
    budget_sentences: Option<usize>,
    #[arg(long)]
    budget_words: Option<usize>,
    /// Shuffle the pool once before labeling.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    rules: RuleParams,
    #[command(flatten)]
    #[serde(flatten)]
    tree: TreeParams,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 1000)]
    sentences: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// POS confusion rate.
    #[arg(long)]
    noise: Option<f64>,
    /// Chunk boundary noise rate.
    #[arg(long)]
    label_noise: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct EquivalenceArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    /// JSON report (default: stdout summary only).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Command {
    fn out(&self) -> Option<&Path> {
        match self {
            Command::Train(a) => Some(&a.out),
            Command::Convert(a) => Some(&a.out),
            Command::Grow(a) => Some(&a.out),
            Command::Decode(a) => a.out.as_deref(),
            Command::Eval(a) => a.out.as_deref(),
            Command::Curves(a) => a.out.as_deref(),
            Command::Al(a) => Some(&a.out),
            Command::Synth(a) => Some(&a.out),
            Command::CheckEquivalence(a) => a.out.as_deref(),
            Command::Rerun { .. } => None,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes to `path`, or stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write(p, text),
        None => {
            std::io::stdout().write_all(text.as_bytes()).context("writing stdout")?;
            Ok(())
        }
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    Corpus::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_rules(path: &Path) -> Result<RuleList> {
    RuleList::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_tree(path: &Path) -> Result<ProbTree> {
    ProbTree::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// A corpus re-indexed to the model's tag inventory.
fn load_for_model(path: &Path, rules: &RuleList) -> Result<Corpus> {
    Corpus::parse_with_inventory(&read(path)?, &rules.tags).with_context(|| format!("parsing {}", path.display()))
}

fn train_config(p: &RuleParams) -> Result<TrainConfig> {
    let templates = match &p.templates {
        Some(path) => parse_templates(&read(path)?).with_context(|| format!("parsing {}", path.display()))?,
        None => default_templates(),
    };
    Ok(TrainConfig { threshold: p.threshold, templates, lexicon_limit: p.lexicon_limit })
}

fn trace_json(trace: &GrowthTrace) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&serde_json::json!({ "mean_log_loss": trace.mean_log_loss }))?;
    s.push('\n');
    Ok(s)
}

fn cmd_train(a: &TrainArgs) -> Result<()> {
    let corpus = load_corpus(&a.train)?;
    let (rules, log) = trainer::train(&corpus, &train_config(&a.rules)?)?;
    write(&a.out, &rules.to_text())?;
    let mut log_text = serde_json::to_string_pretty(&log)?;
    log_text.push('\n');
    write(&a.log.clone().unwrap_or_else(|| with_suffix(&a.out, ".log.json")), &log_text)?;
    eprintln!(
        "learned {} rules; training accuracy {:.4} -> {:.4}",
        rules.rules.len(),
        log.initial_accuracy,
        log.iterations.last().map_or(log.initial_accuracy, |e| e.cumulative_accuracy)
    );
    Ok(())
}

fn cmd_convert(a: &ConvertArgs) -> Result<()> {
    let rules = load_rules(&a.model)?;
    let corpus = load_for_model(&a.train, &rules)?;
    let mut tree = prob_tree::convert(&rules, &corpus, a.tree.k, a.tree.epsilon)?;
    let mut trace = None;
    if a.tree.growing() {
        let config = GrowConfig { k: a.tree.k, min_gain: a.tree.min_gain, lexicon_limit: a.lexicon_limit, max_splits: None };
        let (grown, t) = prob_tree::grow(&tree, &rules, &corpus, &config)?;
        tree = grown;
        trace = Some(t);
    }
    write(&a.out, &tree.to_json()?)?;
    if let (Some(path), Some(t)) = (&a.trace, &trace) {
        write(path, &trace_json(t)?)?;
    }
    eprintln!("tree with {} leaves over {} roots", tree.leaf_count(), tree.roots().len());
    Ok(())
}

fn cmd_grow(a: &GrowArgs) -> Result<()> {
    let rules = load_rules(&a.model)?;
    let tree = load_tree(&a.tree)?;
    let corpus = load_for_model(&a.train, &rules)?;
    let config = GrowConfig { k: a.k, min_gain: a.min_gain, lexicon_limit: a.lexicon_limit, max_splits: a.max_splits };
    let (grown, trace) = prob_tree::grow(&tree, &rules, &corpus, &config)?;
    write(&a.out, &grown.to_json()?)?;
    if let Some(path) = &a.trace {
        write(path, &trace_json(&trace)?)?;
    }
    eprintln!("{} splits; {} leaves", trace.mean_log_loss.len() - 1, grown.leaf_count());
    Ok(())
}

fn cmd_decode(a: &DecodeArgs) -> Result<()> {
    let rules = load_rules(&a.model)?;
    let tree = a.tree.as_deref().map(load_tree).transpose()?;
    let corpus = load_for_model(&a.input, &rules)?;
    let mode = match a.mode {
        ModeArg::Tree if tree.is_none() => bail!(Usage("tree mode needs --tree".into())),
        ModeArg::Tree => DecodeMode::Tree,
        ModeArg::Rules => DecodeMode::RuleList,
    };
    let left = match a.left {
        LeftArg::Predicted => LeftContext::Predicted,
        LeftArg::Replay => LeftContext::Replay,
    };
    let model = Model::new(rules, tree)?;
    let decoded = model.decode_corpus(&corpus, DecodeOptions { mode, left })?;
    let file = PredictionFile::new(&corpus, &decoded)?;
    let text = match a.format {
        PredFormat::Columns => file.to_columns(),
        PredFormat::Jsonl => file.to_json_lines()?,
    };
    emit(a.out.as_deref(), &text)
}

fn load_predictions(path: &Path) -> Result<PredictionFile> {
    PredictionFile::parse_columns(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let file = load_predictions(&a.pred)?;
    let gold = match &a.gold {
        Some(path) => {
            let corpus = load_corpus(path)?;
            let words: Vec<Vec<&str>> =
                corpus.sentences().iter().map(|s| s.tokens.iter().map(|t| t.word.as_str()).collect()).collect();
            let pred_words: Vec<Vec<&str>> =
                file.sentences.iter().map(|s| s.iter().map(|t| t.word.as_str()).collect()).collect();
            if words != pred_words {
                bail!(Failed(format!("{} and {} hold different tokens", path.display(), a.pred.display())));
            }
            (0..corpus.len()).map(|s| corpus.gold_tags(s)).collect()
        }
        None => file.gold_tags(),
    };
    let report = metrics::chunk_prf(&file.predicted_tags(), &gold, a.beta)?;
    let scored = file.scored_tokens()?;
    let has_probs = scored.iter().any(|(d, _)| d.is_some());
    let ce = if has_probs || a.cross_entropy {
        Some(metrics::cross_entropy(scored.iter().map(|(d, g)| (d.as_ref(), *g)))?)
    } else {
        None
    };
    let text = match a.format {
        ReportFormat::Table => {
            let mut t = report.to_table();
            if let Some(h) = ce {
                t.push_str(&format!("cross entropy {h:.4} bits, perplexity {:.4}\n", metrics::perplexity(h)));
            }
            t
        }
        ReportFormat::Json => {
            let mut v = serde_json::to_value(&report)?;
            if let Some(h) = ce {
                v["cross_entropy"] = serde_json::json!(h);
                v["perplexity"] = serde_json::json!(metrics::perplexity(h));
            }
            let mut s = serde_json::to_string_pretty(&v)?;
            s.push('\n');
            s
        }
    };
    emit(a.out.as_deref(), &text)
}

fn outcomes(file: &PredictionFile) -> Result<Vec<Outcome>> {
    let scored = file.scored_tokens()?;
    let preds = file.sentences.iter().flatten();
    scored
        .iter()
        .zip(preds)
        .enumerate()
        .map(|(i, ((d, gold), t))| {
            let d = d.as_ref().ok_or(tbldt::Error::MissingDistribution(i))?;
            let pred: TagId = file.tags.require(&t.pred)?;
            Ok(Outcome::new(d, pred, *gold))
        })
        .collect()
}

fn cmd_curves(a: &CurvesArgs) -> Result<()> {
    let file = load_predictions(&a.pred)?;
    let outcomes = outcomes(&file)?;
    let curve = match a.kind {
        CurveKind::Batch => {
            metrics::rejection_batch(&outcomes, a.grid.as_deref().unwrap_or(&metrics::default_rejection_grid()))?
        }
        CurveKind::Online => {
            metrics::rejection_online(&outcomes, a.grid.as_deref().unwrap_or(&metrics::default_thresholds()))
        }
    };
    emit(a.out.as_deref(), &curve.to_csv())
}

fn cmd_al(a: &AlArgs) -> Result<()> {
    let train = load_corpus(&a.train)?;
    let test = Corpus::parse_with_inventory(&read(&a.test)?, train.tags())
        .with_context(|| format!("parsing {}", a.test.display()))?;
    let pipeline = Pipeline {
        train: train_config(&a.rules)?,
        k: a.tree.k,
        epsilon: a.tree.epsilon,
        grow: a.tree.growing().then_some(a.tree.min_gain),
    };
    let mode = match a.mode {
        AlMode::Entropy => SelectionMode::Entropy,
        AlMode::Sequential => SelectionMode::Sequential,
    };
    let budget = match (a.budget_sentences, a.budget_words) {
        (_, Some(w)) => Budget::Words(w),
        (Some(n), None) => Budget::Sentences(n),
        (None, None) => Budget::Sentences(usize::MAX),
    };
    let config = ALConfig { initial: a.t1, batch: a.t2, budget, mode, seed: a.seed };
    let points = active_learning::run(&train, &test, &pipeline, &config)?;
    write(&a.out, &active_learning::curve_csv(&points, mode))
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let mut g = SyntheticCorpus::new(a.seed);
    if let Some(n) = a.noise {
        g = g.with_noise(n);
    }
    if let Some(n) = a.label_noise {
        g = g.with_label_noise(n);
    }
    write(&a.out, &g.generate_text(a.sentences))
}

fn cmd_check(a: &EquivalenceArgs) -> Result<()> {
    let rules = load_rules(&a.model)?;
    let tree = load_tree(&a.tree)?;
    let corpus = load_for_model(&a.corpus, &rules)?;
    let report = prob_tree::check_equivalence(&tree, &rules, &corpus)?;
    if let Some(path) = &a.out {
        let mut s = serde_json::to_string_pretty(&report)?;
        s.push('\n');
        write(path, &s)?;
    }
    println!("{report}");
    if !report.holds() {
        bail!(Failed(format!("tree disagrees with the rule list on {} tokens", report.tokens - report.agree)));
    }
    Ok(())
}

fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Train(a) => cmd_train(a),
        Command::Convert(a) => cmd_convert(a),
        Command::Grow(a) => cmd_grow(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Curves(a) => cmd_curves(a),
        Command::Al(a) => cmd_al(a),
        Command::Synth(a) => cmd_synth(a),
        Command::CheckEquivalence(a) => cmd_check(a),
        Command::Rerun { .. } => unreachable!("resolved before execution"),
    }
}

fn run() -> Result<()> {
    let args = config::expand_args(std::env::args().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => {
            let msg = e.to_string();
            bail!(Usage(msg.trim_start_matches("error: ").trim_end().to_string()))
        }
    };
    if cli.workers > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global().context("starting worker pool")?;
    }
    let command = match cli.command {
        Command::Rerun { manifest_file } => config::Manifest::read(&manifest_file)?.command,
        c => c,
    };
    let manifest_path = cli.manifest.clone().or_else(|| command.out().map(config::default_manifest_path));
    execute(&command)?;
    if let Some(path) = &manifest_path {
        config::Manifest::new(command).write(path)?;
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<Usage>() || cause.is::<std::io::Error>() {
            return 2;
        }
        if let Some(err) = cause.downcast_ref::<tbldt::Error>() {
            return match err {
                tbldt::Error::Io(_) | tbldt::Error::InvalidArgument(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
