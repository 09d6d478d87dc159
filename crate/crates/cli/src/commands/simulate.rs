use anyhow::{Context, Result};
use scale_bench::corpus::{parse_corpus, CorpusFormat};
use scale_bench::noisesim::{noise_sweep, synthetic_corpus, NoiseSpec, SweepReport};
use scale_bench::{Corpus, RileClass};
use std::path::{Path, PathBuf};

use super::{format_of, is_synthetic, open, opt, synthetic_spec, usage};
use crate::output::{outln, write_atomic, write_json, Manifest};
use crate::SimulateArgs;

fn corpus_of(spec: &str) -> Result<Corpus> {
    match synthetic_spec(spec)? {
        Some(cfg) => Ok(synthetic_corpus(&cfg)?),
        None => {
            let path = Path::new(spec);
            let format: CorpusFormat = format_of(path);
            Ok(parse_corpus(open(path)?, format).with_context(|| format!("corpus {spec}"))?)
        }
    }
}

fn confusion_of(spec: &str, seed: u64) -> Result<NoiseSpec<RileClass>> {
    let labels = RileClass::ALL.to_vec();
    Ok(match spec {
        "identity" => NoiseSpec::identity(labels, seed)?,
        "uniform" => NoiseSpec::uniform(labels, seed)?,
        "observed" => NoiseSpec::observed_xcountry(seed),
        path => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let mut s = NoiseSpec::from_json(&text, seed).with_context(|| format!("confusion {path}"))?;
            if s.name.is_empty() {
                s.name = Path::new(path)
                    .file_stem()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.to_owned());
            }
            s
        }
    })
}

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    if a.replicates == 0 {
        return Err(usage("--replicates must be at least 1"));
    }
    let corpus = corpus_of(&a.corpus)?;
    let mut specs = Vec::new();
    for c in &a.confusion {
        let base = confusion_of(c, a.seed)?;
        for &alpha in &a.alpha {
            specs.push(base.scaled(alpha).map_err(|e| usage(e.to_string()))?);
        }
        specs.push(base);
    }
    specs.sort_by(|x, y| x.name.cmp(&y.name));
    if let Some(w) = specs.windows(2).find(|w| w[0].name == w[1].name) {
        return Err(usage(format!("confusion {:?} is given more than once", w[0].name)));
    }
    let report = noise_sweep(&corpus, &specs, a.replicates)?;

    let mut m = Manifest::new("simulate", a);
    if !is_synthetic(&a.corpus) {
        m.input(Path::new(&a.corpus))?;
    }
    for c in &a.confusion {
        if Path::new(c).is_file() {
            m.input(Path::new(c))?;
        }
    }
    for path in write_report(&a.out, &report)? {
        m.output(&path);
    }
    m.write_in(&a.out)?;
    for s in &report.summaries {
        outln!(
            "{}",
            serde_json::json!({ "spec": s.spec, "spearman_r": s.spearman_r.mean, "mae": s.mae.mean, "mean_error": s.mean_error.mean })
        );
    }
    Ok(())
}

fn write_report(dir: &Path, report: &SweepReport) -> Result<Vec<PathBuf>> {
    let sweep = dir.join("sweep.csv");
    write_atomic(&sweep, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record([
            "spec", "replicate", "spearman_r", "mae", "mean_error", "flips_ul", "flips_lr", "dispersion_ratio", "error_skew",
        ])?;
        for r in &report.rows {
            csv.write_record([
                r.spec.clone(),
                r.replicate.to_string(),
                opt(r.spearman_r),
                r.mae.to_string(),
                r.mean_error.to_string(),
                r.flips_ul.to_string(),
                r.flips_lr.to_string(),
                opt(r.dispersion_ratio),
                opt(r.error_skew),
            ])?;
        }
        csv.flush()?;
        Ok(())
    })?;

    let summary = dir.join("summary.csv");
    write_atomic(&summary, |w| {
        let mut csv = csv::Writer::from_writer(w);
        let mut header = vec!["spec".to_owned(), "replicates".to_owned()];
        for stat in ["spearman_r", "mae", "mean_error", "dispersion_ratio", "error_skew"] {
            header.push(format!("{stat}_mean"));
            header.push(format!("{stat}_std"));
        }
        csv.write_record(&header)?;
        for s in &report.summaries {
            let mut rec = vec![s.spec.clone(), s.replicates.to_string()];
            for agg in [s.spearman_r, s.mae, s.mean_error, s.dispersion_ratio, s.error_skew] {
                rec.push(opt(agg.mean));
                rec.push(opt(agg.std));
            }
            csv.write_record(&rec)?;
        }
        csv.flush()?;
        Ok(())
    })?;

    let json = dir.join("summary.json");
    write_json(&json, &report.summaries)?;
    Ok(vec![sweep, summary, json])
}
