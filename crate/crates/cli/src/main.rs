//! `scale-bench`: RILE scaling experiments from the command line.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "scale-bench", version, about = "RILE scaling workbench: corpora, splits, baselines, evaluation and noise simulation")]
pub struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "SCALE_BENCH_JOBS")]
    pub jobs: Option<usize>,

    /// JSON file with default option values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate and normalize a corpus into the canonical format.
    Ingest(IngestArgs),
    /// Print the category registry and the RILE scale definition.
    Registry(RegistryArgs),
    /// Compute manifesto RILE scores from gold or predicted labels.
    Score(ScoreArgs),
    /// Pack manifestos into token-bounded chunks.
    Chunk(ChunkArgs),
    /// Generate cross-country or cross-time splits.
    Split(SplitArgs),
    /// Train a baseline statement classifier.
    Train(TrainArgs),
    /// Label statements with a trained baseline.
    Predict(PredictArgs),
    /// Score prediction files against the gold corpus.
    Evaluate(EvaluateArgs),
    /// Run a label-noise sweep.
    Simulate(SimulateArgs),
    /// Compose evaluation outputs into summary tables.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Jsonl,
    Csv,
}

#[derive(Debug, Args, Serialize)]
pub struct IngestArgs {
    /// Corpus file in JSONL or CSV, or `synthetic:key=value,...`.
    #[arg(long, visible_alias = "in")]
    pub input: String,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Normalized corpus destination; `.csv` writes CSV, anything else JSONL.
    #[arg(long)]
    pub out: PathBuf,
    /// Report malformed rows instead of failing, and renumber positions.
    #[arg(long, conflicts_with = "strict")]
    pub lenient: bool,
    /// Fail on the first malformed row. This is the default.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct RegistryArgs {
    /// Dump the full category table. This is the default action.
    #[arg(long)]
    pub dump: bool,
    #[arg(long, value_enum, default_value_t = FormatArg::Jsonl)]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Statement-level prediction file; gold codes are used when omitted.
    /// Only manifestos with predictions are scored.
    #[arg(long)]
    pub pred: Option<PathBuf>,
    /// Custom scale definition (JSON with `name`, `right`, `left`).
    #[arg(long)]
    pub scale: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ChunkArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 4095)]
    pub max_tokens: usize,
    #[arg(long, default_value_t = 1000)]
    pub min_tokens: usize,
    /// `whitespace`, or `external:PATH` for a JSONL of `{statement_id, tokens}`.
    #[arg(long, default_value = "whitespace")]
    pub counter: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    Xcountry,
    Xtime,
}

#[derive(Debug, Args, Serialize)]
pub struct SplitArgs {
    #[arg(long, value_enum)]
    pub mode: SplitMode,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Share of training manifestos moved to dev; 0 disables.
    #[arg(long, default_value_t = 0.1)]
    pub dev_fraction: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 2019)]
    pub cutoff_year: u16,
    #[arg(long, default_value_t = 2021)]
    pub end_year: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Linear,
    Majority,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceArg {
    Rile3,
    CmpFull,
}

impl From<SpaceArg> for scale_bench::baseline::LabelSpace {
    fn from(s: SpaceArg) -> Self {
        match s {
            SpaceArg::Rile3 => scale_bench::baseline::LabelSpace::Rile3,
            SpaceArg::CmpFull => scale_bench::baseline::LabelSpace::CmpFull,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Split file produced by `split`.
    #[arg(long)]
    pub split: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelKind::Linear)]
    pub model: ModelKind,
    #[arg(long, value_enum, default_value_t = SpaceArg::Rile3)]
    pub space: SpaceArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 18)]
    pub hash_bits: u32,
    #[arg(long, default_value_t = 1)]
    pub batch_size: usize,
    /// Keep the last epoch instead of the best one on dev.
    #[arg(long)]
    pub no_dev_checkpoint: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    Train,
    Dev,
    Test,
    All,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Split file; without it every manifesto is labelled.
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Subset::Test)]
    pub subset: Subset,
    /// Model name recorded in the exchange file.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Statement,
    Manifesto,
    Stance,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Statement => "statement",
            Level::Manifesto => "manifesto",
            Level::Stance => "stance",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TieBreakArg {
    Centreward,
    Leftward,
    Rightward,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    /// Gold corpus.
    #[arg(long, alias = "gold")]
    pub corpus: PathBuf,
    /// Prediction exchange file; repeat once per fold.
    #[arg(long, required = true)]
    pub pred: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Level::Statement)]
    pub level: Level,
    /// Label space for statement-level metrics; inferred when omitted.
    #[arg(long, value_enum)]
    pub space: Option<SpaceArg>,
    #[arg(long)]
    pub scale: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also report each prediction file separately.
    #[arg(long)]
    pub per_fold: bool,
    /// Dead zone around zero for sign-flip counting.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[arg(long, value_enum, default_value_t = TieBreakArg::Centreward)]
    pub tie_break: TieBreakArg,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Corpus file, or `synthetic:key=value,...`.
    #[arg(long)]
    pub corpus: String,
    /// Confusion JSON file, or one of `identity`, `uniform`, `observed`.
    #[arg(long, required = true)]
    pub confusion: Vec<String>,
    /// Also run each confusion with its off-diagonal mass scaled by these factors.
    #[arg(long)]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub replicates: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// Evaluation directory, optionally as `ROW/COLUMN=DIR`.
    #[arg(long, required = true)]
    pub input: Vec<String>,
    /// CSV destination; the markdown table goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failure caused by how the tool was invoked.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    exit_code: u8,
    message: String,
}

fn classify(err: &anyhow::Error) -> (&'static str, u8) {
    use scale_bench::ErrorKind;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<scale_bench::Error>() {
            return match e.kind() {
                ErrorKind::Usage => ("usage", 2),
                ErrorKind::Data => ("data", 3),
                ErrorKind::Numeric => ("numeric", 4),
                ErrorKind::Io => ("io", 5),
            };
        }
        if cause.is::<UsageError>() {
            return ("usage", 2);
        }
        if cause.is::<std::io::Error>() {
            return ("io", 5);
        }
    }
    ("data", 3)
}

fn fail(kind: &str, code: u8, message: String) -> ExitCode {
    let record = ErrorRecord {
        error: ErrorBody {
            kind,
            exit_code: code,
            message,
        },
    };
    eprintln!("{}", serde_json::to_string(&record).expect("error record serializes"));
    ExitCode::from(code)
}

fn parse(argv: Vec<OsString>) -> Result<Cli, ExitCode> {
    let cmd = Cli::command().args_override_self(true);
    let usage = |e: clap::Error| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            let _ = output::stdout(e.to_string().as_bytes());
            ExitCode::SUCCESS
        }
        _ => fail("usage", 2, e.to_string().trim().to_owned()),
    };
    let first = cmd.clone().ignore_errors(true).try_get_matches_from(&argv).map_err(usage)?;
    let argv = config::apply(&cmd, &first, argv).map_err(|e| {
        let (kind, code) = classify(&e);
        let (kind, code) = if code == 3 { ("usage", 2) } else { (kind, code) };
        fail(kind, code, format!("{e:#}"))
    })?;
    let matches = cmd.try_get_matches_from(argv).map_err(usage)?;
    Cli::from_arg_matches(&matches).map_err(usage)
}

fn main() -> ExitCode {
    let cli = match parse(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return fail("usage", 2, "--jobs must be positive".to_owned());
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            return fail("usage", 2, format!("configuring {jobs} worker threads: {e}"));
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, code) = classify(&e);
            fail(kind, code, format!("{e:#}"))
        }
    }
}
