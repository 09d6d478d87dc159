mod data;
mod evaluate;
mod model;
mod report;
mod simulate;

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{Context, Result};
use scale_bench::corpus::{parse_corpus, CorpusFormat};
use scale_bench::noisesim::SyntheticConfig;
use scale_bench::scales::RileScale;
use scale_bench::{Corpus, SplitSpec};

use crate::{Command, UsageError};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Ingest(a) => data::ingest(&a),
        Command::Registry(a) => data::registry(&a),
        Command::Score(a) => data::score(&a),
        Command::Chunk(a) => data::chunk(&a),
        Command::Split(a) => data::split(&a),
        Command::Train(a) => model::train(&a),
        Command::Predict(a) => model::predict(&a),
        Command::Evaluate(a) => evaluate::evaluate(&a),
        Command::Simulate(a) => simulate::simulate(&a),
        Command::Report(a) => report::report(&a),
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

pub(crate) fn format_of(path: &Path) -> CorpusFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => CorpusFormat::Csv,
        _ => CorpusFormat::Jsonl,
    }
}

pub(crate) fn load_corpus(path: &Path) -> Result<Corpus> {
    parse_corpus(open(path)?, format_of(path)).with_context(|| format!("corpus {}", path.display()))
}

pub(crate) fn load_split(path: &Path, corpus: &Corpus) -> Result<SplitSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading split {}", path.display()))?;
    let spec = SplitSpec::from_json(&text).with_context(|| format!("split {}", path.display()))?;
    spec.validate(corpus).with_context(|| format!("split {}", path.display()))?;
    Ok(spec)
}

pub(crate) fn load_scale(path: Option<&Path>) -> Result<RileScale> {
    match path {
        None => Ok(RileScale::standard()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading scale {}", p.display()))?;
            RileScale::from_json(&text).with_context(|| format!("scale {}", p.display()))
        }
    }
}

/// Formats an optional float for CSV: empty when absent.
pub(crate) fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub(crate) fn is_synthetic(spec: &str) -> bool {
    spec == "synthetic" || spec.starts_with("synthetic:")
}

/// Generator settings when `spec` names a synthetic corpus.
pub(crate) fn synthetic_spec(spec: &str) -> Result<Option<SyntheticConfig>> {
    if !is_synthetic(spec) {
        return Ok(None);
    }
    let params = spec.strip_prefix("synthetic").unwrap_or_default().trim_start_matches(':');
    let cfg: SyntheticConfig = params.parse().map_err(|e| usage(format!("synthetic corpus: {e}")))?;
    Ok(Some(cfg))
}
