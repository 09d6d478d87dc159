use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{Context, Result};
use scale_bench::baseline::read_predictions;
use scale_bench::chunking::{chunk_corpus, write_chunks, ChunkConfig, ExternalCounts, TokenCounter, WhitespaceCounter};
use scale_bench::corpus::{corpus_stats, parse_corpus_with, write_corpus, CorpusFormat, ParseOptions};
use scale_bench::scales::{manifesto_tally, registry, LabelSource};
use scale_bench::noisesim::synthetic_corpus;
use scale_bench::splits::{carve_dev, leave_one_country_out, temporal_split};
use scale_bench::{Chunk, Manifesto};

use super::{format_of, is_synthetic, load_corpus, load_scale, open, synthetic_spec, usage};
use crate::output::{outln, write_atomic, write_json, Manifest};
use crate::{ChunkArgs, FormatArg, IngestArgs, RegistryArgs, ScoreArgs, SplitArgs, SplitMode};

pub fn ingest(a: &IngestArgs) -> Result<()> {
    let (corpus, issues) = match synthetic_spec(&a.input)? {
        Some(cfg) => (synthetic_corpus(&cfg)?, Vec::new()),
        None => {
            let path = Path::new(&a.input);
            let format = match a.format {
                Some(FormatArg::Csv) => CorpusFormat::Csv,
                Some(FormatArg::Jsonl) => CorpusFormat::Jsonl,
                None => format_of(path),
            };
            let opts = ParseOptions { strict: !a.lenient };
            parse_corpus_with(open(path)?, format, &a.input, opts).with_context(|| format!("corpus {}", a.input))?
        }
    };
    for issue in &issues {
        eprintln!("{}", serde_json::to_string(issue)?);
    }
    write_atomic(&a.out, |w| Ok(write_corpus(&corpus, w, format_of(&a.out))?))?;
    let stats = corpus_stats(&corpus);
    let mut m = Manifest::new("ingest", a);
    if !is_synthetic(&a.input) {
        m.input(Path::new(&a.input))?;
    }
    m.output(&a.out);
    m.write_beside(&a.out)?;
    outln!("{}", serde_json::to_string_pretty(&stats)?);
    Ok(())
}

pub fn registry(a: &RegistryArgs) -> Result<()> {
    let dump = registry::dump();
    let mut buf = Vec::new();
    match a.format {
        FormatArg::Jsonl => {
            serde_json::to_writer_pretty(&mut buf, &dump)?;
            buf.push(b'\n');
        }
        FormatArg::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(["code", "catalogue_id", "name", "kind", "rile_class"])?;
            for c in dump.categories {
                let class = dump.scale.class_of(&c.code.parse()?);
                let kind = serde_json::to_value(c.kind)?;
                w.write_record([c.code, c.catalogue_id, c.name, kind.as_str().unwrap_or(""), class.as_str()])?;
            }
            w.flush()?;
        }
    }
    match &a.out {
        Some(path) => {
            write_atomic(path, |w| Ok(w.write_all(&buf)?))?;
            let mut m = Manifest::new("registry", a);
            m.output(path);
            m.write_beside(path)?;
        }
        None => crate::output::stdout(&buf)?,
    }
    Ok(())
}

pub fn score(a: &ScoreArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let scale = load_scale(a.scale.as_deref())?;
    let preds = match &a.pred {
        Some(p) => Some(read_predictions(open(p)?).with_context(|| format!("predictions {}", p.display()))?),
        None => None,
    };
    let source = preds.as_ref().map_or(LabelSource::Gold, LabelSource::Predicted);
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(["manifesto_id", "party", "country", "year", "right", "left", "other", "rile", "stance"])?;
        let predicted = |m: &&Manifesto| preds.as_ref().is_none_or(|p| m.statements.iter().any(|s| p.get(&s.id).is_some()));
        for m in corpus.manifestos().filter(predicted) {
            let tally = manifesto_tally(m, source, &scale).with_context(|| format!("manifesto {}", m.id))?;
            let rile = tally.score::<f64>()?;
            w.write_record([
                m.id.clone(),
                m.party.clone(),
                m.country.clone(),
                m.year().to_string(),
                tally.right.to_string(),
                tally.left.to_string(),
                tally.other.to_string(),
                rile.value().to_string(),
                rile.stance().as_str().to_owned(),
            ])?;
        }
        w.flush()?;
    }
    match &a.out {
        Some(path) => {
            write_atomic(path, |w| Ok(w.write_all(&buf)?))?;
            let mut m = Manifest::new("score", a);
            m.input(&a.corpus)?;
            for p in a.pred.iter().chain(&a.scale) {
                m.input(p)?;
            }
            m.output(path);
            m.write_beside(path)?;
        }
        None => crate::output::stdout(&buf)?,
    }
    Ok(())
}

pub fn chunk(a: &ChunkArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let config = ChunkConfig {
        max_tokens: a.max_tokens,
        min_tokens: a.min_tokens,
    };
    let external;
    let counts_file = match a.counter.as_str() {
        "whitespace" => None,
        other => match other.strip_prefix("external:") {
            Some(p) if !p.is_empty() => Some(Path::new(p)),
            _ => return Err(usage(format!("--counter must be whitespace or external:PATH, got {other:?}"))),
        },
    };
    let counter: &dyn TokenCounter = match counts_file {
        Some(p) => {
            external = ExternalCounts::from_jsonl(p.display().to_string(), open(p)?)
                .with_context(|| format!("token counts {}", p.display()))?;
            &external
        }
        None => &WhitespaceCounter,
    };
    let chunks: Vec<Chunk> = chunk_corpus(&corpus, counter, config)?;
    write_atomic(&a.out, |w| Ok(write_chunks(&chunks, w)?))?;
    let covered: BTreeSet<&str> = chunks.iter().map(|c| c.manifesto_id.as_str()).collect();
    let without: Vec<&str> = corpus.ids().filter(|id| !covered.contains(id)).collect();
    let mut m = Manifest::new("chunk", a);
    m.input(&a.corpus)?;
    if let Some(p) = counts_file {
        m.input(p)?;
    }
    m.output(&a.out);
    m.write_beside(&a.out)?;
    let summary = serde_json::json!({
        "tokenizer": counter.name(),
        "chunks": chunks.len(),
        "oversized": chunks.iter().filter(|c| c.oversized).count(),
        "manifestos": corpus.len(),
        "manifestos_without_chunks": without,
    });
    outln!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

pub fn split(a: &SplitArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let base = match a.mode {
        SplitMode::Xcountry => leave_one_country_out(&corpus)?,
        SplitMode::Xtime => vec![temporal_split(&corpus, a.cutoff_year, a.end_year)?],
    };
    if !(0.0..1.0).contains(&a.dev_fraction) {
        return Err(usage(format!("--dev-fraction must be in [0, 1), got {}", a.dev_fraction)));
    }
    let folds = if a.dev_fraction > 0.0 {
        base.iter()
            .map(|s| carve_dev(s, &corpus, a.dev_fraction, a.seed).with_context(|| format!("fold {}", s.name)))
            .collect::<Result<Vec<_>>>()?
    } else {
        base
    };
    let mut m = Manifest::new("split", a);
    m.input(&a.corpus)?;
    let mut index = Vec::new();
    for fold in &folds {
        let path = a.out.join(format!("{}.json", fold.name));
        write_json(&path, fold)?;
        m.output(&path);
        let statements = |ids: &BTreeSet<String>| -> usize {
            ids.iter().filter_map(|id| corpus.get(id)).map(|m| m.statements.len()).sum()
        };
        index.push(serde_json::json!({
            "name": fold.name,
            "file": format!("{}.json", fold.name),
            "manifestos": {"train": fold.train.len(), "dev": fold.dev.len(), "test": fold.test.len()},
            "statements": {"train": statements(&fold.train), "dev": statements(&fold.dev), "test": statements(&fold.test)},
        }));
    }
    let index_path = a.out.join("folds.json");
    write_json(&index_path, &index)?;
    m.output(&index_path);
    m.write_in(&a.out)?;
    outln!("{}", serde_json::json!({ "folds": folds.len() }));
    Ok(())
}
