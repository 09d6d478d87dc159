use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use scale_bench::baseline::{read_exchange, ExchangeFile, LabelSpace, PredictionSet};
use scale_bench::chunking::{aggregate_chunk_scores, aggregate_chunk_stances, TieBreak};
use scale_bench::eval::{
    classification_metrics, classification_metrics_with_labels, confusion, histogram, manifesto_score_pairs,
    observed_labels, scale_error_report, ConfusionMatrix, MetricsReport, ScorePair,
};
use scale_bench::scales::{manifesto_rile_with, stance_bin, LabelSource, RileScale};
use scale_bench::{CategoryCode, Corpus, ErrorReport, StanceBin, Statement};
use serde::Serialize;

use super::{load_corpus, load_scale, open, opt, usage};
use crate::output::{outln, write_bytes, write_json, Manifest};
use crate::{EvaluateArgs, Level, TieBreakArg};

struct Fold {
    name: String,
    model: String,
    data: ExchangeFile,
}

fn load_folds(paths: &[PathBuf]) -> Result<Vec<Fold>> {
    let mut folds = Vec::new();
    let mut names = HashSet::new();
    for path in paths {
        let data = read_exchange(open(path)?).with_context(|| format!("predictions {}", path.display()))?;
        let (model, split) = match &data {
            ExchangeFile::Statements(s) => (s.model.clone(), s.split.clone()),
            ExchangeFile::Chunks(c) => (c.model.clone(), c.split.clone()),
        };
        let mut name = if split.is_empty() { stem(path) } else { split };
        if !names.insert(name.clone()) {
            name = path.display().to_string();
            names.insert(name.clone());
        }
        folds.push(Fold { name, model, data });
    }
    let chunked = folds.iter().filter(|f| matches!(f.data, ExchangeFile::Chunks(_))).count();
    if chunked != 0 && chunked != folds.len() {
        return Err(usage("cannot mix statement-level and chunk-level prediction files"));
    }
    Ok(folds)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn evaluate(a: &EvaluateArgs) -> Result<()> {
    if a.epsilon.is_nan() || a.epsilon < 0.0 {
        return Err(usage(format!("--epsilon must be non-negative, got {}", a.epsilon)));
    }
    let corpus = load_corpus(&a.corpus)?;
    let scale = load_scale(a.scale.as_deref())?;
    let folds = load_folds(&a.pred)?;
    let mut m = Manifest::new("evaluate", a);
    m.input(&a.corpus)?;
    for p in a.pred.iter().chain(&a.scale) {
        m.input(p)?;
    }
    let outputs = match a.level {
        Level::Statement => statement_level(a, &corpus, &scale, &folds)?,
        Level::Manifesto => manifesto_level(a, &corpus, &scale, &folds)?,
        Level::Stance => stance_level(a, &corpus, &scale, &folds)?,
    };
    for o in outputs {
        m.output(&o);
    }
    m.write_in(&a.out)
}

#[derive(Serialize)]
struct FoldReport<'a, R> {
    fold: &'a str,
    model: &'a str,
    report: R,
}

#[derive(Serialize)]
struct Metrics<'a, R> {
    level: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    space: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    models: Vec<&'a str>,
    pooled: R,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    folds: Vec<FoldReport<'a, R>>,
}

fn models(folds: &[Fold]) -> Vec<&str> {
    let mut v: Vec<&str> = folds.iter().map(|f| f.model.as_str()).collect();
    v.sort();
    v.dedup();
    v
}

fn statement_sets(folds: &[Fold]) -> Result<Vec<&PredictionSet>> {
    folds
        .iter()
        .map(|f| match &f.data {
            ExchangeFile::Statements(s) => Ok(s),
            ExchangeFile::Chunks(_) => Err(usage(format!(
                "fold {}: statement-level evaluation needs statement predictions",
                f.name
            ))),
        })
        .collect()
}

type Labelled = Vec<(String, String, String)>;

/// `(statement_id, gold, pred)` triples sorted by statement id.
fn statement_labels(
    index: &HashMap<&str, &Statement>,
    preds: &PredictionSet,
    space: LabelSpace,
    scale: &RileScale,
) -> Result<Labelled> {
    let mut rows = preds
        .iter()
        .map(|p| {
            let s = index
                .get(p.statement_id.as_str())
                .with_context(|| format!("prediction for unknown statement {:?}", p.statement_id))?;
            let (gold, pred) = match space {
                LabelSpace::Rile3 => (
                    scale.class_of(&s.code).as_str().to_owned(),
                    scale.class_of_label(&p.label)?.as_str().to_owned(),
                ),
                LabelSpace::CmpFull => (s.code.as_str().to_owned(), CategoryCode::normalize(&p.label)?.as_str().to_owned()),
            };
            Ok((p.statement_id.clone(), gold, pred))
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort();
    Ok(rows)
}

fn pool<T: Clone, K: Eq + std::hash::Hash>(parts: &[Vec<T>], key: impl Fn(&T) -> K, what: &str) -> Result<Vec<T>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for part in parts {
        for item in part {
            if !seen.insert(key(item)) {
                bail!("the same {what} is predicted in more than one prediction file");
            }
            out.push(item.clone());
        }
    }
    Ok(out)
}

/// Labelled rows and metrics of a classification-style evaluation.
struct Classified<'a> {
    level: &'a str,
    space: Option<&'a str>,
    labels: Vec<String>,
    per_fold: Vec<(Labelled, MetricsReport)>,
    pooled_rows: Labelled,
    pooled: MetricsReport,
}

fn write_classification(a: &EvaluateArgs, folds: &[Fold], c: Classified<'_>) -> Result<Vec<PathBuf>> {
    let Classified {
        level,
        space,
        labels,
        per_fold,
        pooled_rows,
        pooled,
    } = c;
    let (dir, include_folds) = (a.out.as_path(), a.per_fold);
    let gold: Vec<&str> = pooled_rows.iter().map(|r| r.1.as_str()).collect();
    let pred: Vec<&str> = pooled_rows.iter().map(|r| r.2.as_str()).collect();
    let cm: ConfusionMatrix = confusion(&gold, &pred, &labels)?;
    let mut out = Vec::new();

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["fold", "model", "n", "accuracy", "weighted_f1"])?;
    csv.write_record(["pooled".to_owned(), models(folds).join("+"), pooled.n.to_string(), pooled.accuracy.to_string(), pooled.weighted_f1.to_string()])?;
    if include_folds {
        for (f, (_, r)) in folds.iter().zip(&per_fold) {
            csv.write_record([f.name.clone(), f.model.clone(), r.n.to_string(), r.accuracy.to_string(), r.weighted_f1.to_string()])?;
        }
    }
    out.push(save(dir, "metrics.csv", csv.into_inner()?)?);

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["label", "support", "f1"])?;
    for (label, f1) in &pooled.per_label_f1 {
        csv.write_record([label.clone(), pooled.support[label].to_string(), f1.to_string()])?;
    }
    out.push(save(dir, "per_label.csv", csv.into_inner()?)?);

    let mut buf = Vec::new();
    cm.write_csv(&mut buf)?;
    out.push(save(dir, "confusion.csv", buf)?);

    let mut csv = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["true\\pred".to_owned()];
    header.extend(cm.labels.iter().cloned());
    csv.write_record(&header)?;
    for (label, row) in cm.labels.iter().zip(cm.row_normalized()) {
        let mut rec = vec![label.clone()];
        rec.extend(row.iter().map(|v| format!("{v:.2}")));
        csv.write_record(&rec)?;
    }
    out.push(save(dir, "confusion_pct.csv", csv.into_inner()?)?);

    let report = Metrics {
        level: level.to_owned(),
        space,
        epsilon: None,
        models: models(folds),
        pooled,
        folds: if include_folds {
            folds
                .iter()
                .zip(&per_fold)
                .map(|(f, (_, r))| FoldReport {
                    fold: &f.name,
                    model: &f.model,
                    report: r.clone(),
                })
                .collect()
        } else {
            Vec::new()
        },
    };
    let path = dir.join("metrics.json");
    write_json(&path, &report)?;
    out.push(path);
    Ok(out)
}

fn save(dir: &Path, name: &str, bytes: Vec<u8>) -> Result<PathBuf> {
    let path = dir.join(name);
    write_bytes(&path, &bytes)?;
    Ok(path)
}

fn statement_level(a: &EvaluateArgs, corpus: &Corpus, scale: &RileScale, folds: &[Fold]) -> Result<Vec<PathBuf>> {
    let sets = statement_sets(folds)?;
    let space: LabelSpace = match a.space {
        Some(s) => s.into(),
        None if sets.iter().all(|s| s.iter().all(|p| LabelSpace::Rile3.contains(&p.label))) => LabelSpace::Rile3,
        None => LabelSpace::CmpFull,
    };
    let index: HashMap<&str, &Statement> = corpus.statements().map(|s| (s.id.as_str(), s)).collect();
    let per_fold: Vec<(Labelled, MetricsReport)> = sets
        .par_iter()
        .zip(folds)
        .map(|(set, f)| {
            let rows = statement_labels(&index, set, space, scale).with_context(|| format!("fold {}", f.name))?;
            let gold: Vec<&str> = rows.iter().map(|r| r.1.as_str()).collect();
            let pred: Vec<&str> = rows.iter().map(|r| r.2.as_str()).collect();
            let report = classification_metrics(&gold, &pred, space).with_context(|| format!("fold {}", f.name))?;
            Ok((rows, report))
        })
        .collect::<Result<_>>()?;
    let parts: Vec<Labelled> = per_fold.iter().map(|p| p.0.clone()).collect();
    let mut pooled_rows = pool(&parts, |r| r.0.clone(), "statement")?;
    pooled_rows.sort();
    let gold: Vec<&str> = pooled_rows.iter().map(|r| r.1.as_str()).collect();
    let pred: Vec<&str> = pooled_rows.iter().map(|r| r.2.as_str()).collect();
    let pooled = classification_metrics(&gold, &pred, space)?;
    let labels = match space {
        LabelSpace::Rile3 => space.labels(),
        LabelSpace::CmpFull => observed_labels(&gold, &pred),
    };
    let out = write_classification(
        a,
        folds,
        Classified {
            level: "statement",
            space: Some(space.as_str()),
            labels,
            per_fold,
            pooled_rows,
            pooled: pooled.clone(),
        },
    )?;
    outln!(
        "{}",
        serde_json::json!({ "level": "statement", "n": pooled.n, "accuracy": pooled.accuracy, "weighted_f1": pooled.weighted_f1 })
    );
    Ok(out)
}

fn gold_rile(corpus: &Corpus, id: &str, scale: &RileScale) -> Result<f64> {
    let m = corpus
        .get(id)
        .with_context(|| format!("prediction for unknown manifesto {id:?}"))?;
    Ok(manifesto_rile_with::<f64>(m, LabelSource::Gold, scale)?.value())
}

/// Manifesto-level score pairs for one fold, sorted by manifesto id.
fn fold_pairs(corpus: &Corpus, scale: &RileScale, fold: &Fold) -> Result<Vec<ScorePair<f64>>> {
    match &fold.data {
        ExchangeFile::Statements(set) => {
            let index: HashMap<&str, &Statement> = corpus.statements().map(|s| (s.id.as_str(), s)).collect();
            let mut ids: Vec<String> = set
                .iter()
                .map(|p| {
                    index
                        .get(p.statement_id.as_str())
                        .map(|s| s.manifesto_id.clone())
                        .with_context(|| format!("prediction for unknown statement {:?}", p.statement_id))
                })
                .collect::<Result<_>>()?;
            ids.sort();
            ids.dedup();
            Ok(manifesto_score_pairs(corpus, &ids, set, scale)?)
        }
        ExchangeFile::Chunks(set) => {
            let scores = aggregate_chunk_scores(set)?;
            if scores.is_empty() {
                bail!("chunk predictions carry no scores; use --level stance");
            }
            scores
                .into_iter()
                .map(|(id, pred)| {
                    let m = corpus
                        .get(&id)
                        .with_context(|| format!("prediction for unknown manifesto {id:?}"))?;
                    Ok(ScorePair {
                        gold: gold_rile(corpus, &id, scale)?,
                        pred: pred.value(),
                        manifesto_id: id,
                        country: m.country.clone(),
                        year: m.year(),
                    })
                })
                .collect()
        }
    }
}

fn manifesto_level(a: &EvaluateArgs, corpus: &Corpus, scale: &RileScale, folds: &[Fold]) -> Result<Vec<PathBuf>> {
    let per_fold: Vec<Vec<ScorePair<f64>>> = folds
        .par_iter()
        .map(|f| fold_pairs(corpus, scale, f).with_context(|| format!("fold {}", f.name)))
        .collect::<Result<_>>()?;
    let fold_of: BTreeMap<&str, &str> = folds
        .iter()
        .zip(&per_fold)
        .flat_map(|(f, ps)| ps.iter().map(move |p| (p.manifesto_id.as_str(), f.name.as_str())))
        .collect();
    let mut pooled = pool(&per_fold, |p| p.manifesto_id.clone(), "manifesto")?;
    pooled.sort_by(|x, y| x.manifesto_id.cmp(&y.manifesto_id));
    let report_of = |pairs: &[ScorePair<f64>]| -> Result<ErrorReport> {
        let g: Vec<f64> = pairs.iter().map(|p| p.gold).collect();
        let p: Vec<f64> = pairs.iter().map(|p| p.pred).collect();
        Ok(scale_error_report(&g, &p, a.epsilon)?)
    };
    let pooled_report = report_of(&pooled)?;
    let fold_reports: Vec<ErrorReport> = if a.per_fold {
        folds
            .iter()
            .zip(&per_fold)
            .map(|(f, ps)| report_of(ps).with_context(|| format!("fold {}", f.name)))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let mut out = Vec::new();
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record([
        "fold", "model", "n", "spearman_r", "mae", "mean_error", "flips_ul", "flips_lr", "dispersion_ratio", "error_skew",
    ])?;
    let row = |name: &str, model: &str, r: &ErrorReport| -> Vec<String> {
        vec![
            name.to_owned(),
            model.to_owned(),
            r.n.to_string(),
            opt(r.spearman_r),
            r.mae.to_string(),
            r.mean_error.to_string(),
            r.sign_flips.ul.to_string(),
            r.sign_flips.lr.to_string(),
            opt(r.dispersion_ratio),
            opt(r.error_skew),
        ]
    };
    csv.write_record(row("pooled", &models(folds).join("+"), &pooled_report))?;
    for (f, r) in folds.iter().zip(&fold_reports) {
        csv.write_record(row(&f.name, &f.model, r))?;
    }
    out.push(save(&a.out, "metrics.csv", csv.into_inner()?)?);

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["fold", "manifesto_id", "country", "year", "gold", "pred", "gold_stance", "pred_stance"])?;
    for p in &pooled {
        csv.write_record([
            fold_of[p.manifesto_id.as_str()].to_owned(),
            p.manifesto_id.clone(),
            p.country.clone(),
            p.year.to_string(),
            p.gold.to_string(),
            p.pred.to_string(),
            stance_bin(p.gold)?.as_str().to_owned(),
            stance_bin(p.pred)?.as_str().to_owned(),
        ])?;
    }
    out.push(save(&a.out, "scores.csv", csv.into_inner()?)?);

    let gold: Vec<f64> = pooled.iter().map(|p| p.gold).collect();
    let pred: Vec<f64> = pooled.iter().map(|p| p.pred).collect();
    let hg = histogram(&gold, a.bins, -1.0, 1.0)?;
    let hp = histogram(&pred, a.bins, -1.0, 1.0)?;
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["bin_lo", "bin_hi", "gold", "pred"])?;
    for (g, p) in hg.iter().zip(&hp) {
        csv.write_record([g.lo.to_string(), g.hi.to_string(), g.count.to_string(), p.count.to_string()])?;
    }
    out.push(save(&a.out, "histogram.csv", csv.into_inner()?)?);

    let report = Metrics {
        level: "manifesto".to_owned(),
        space: None,
        epsilon: Some(a.epsilon),
        models: models(folds),
        pooled: pooled_report,
        folds: folds
            .iter()
            .zip(fold_reports)
            .map(|(f, report)| FoldReport {
                fold: &f.name,
                model: &f.model,
                report,
            })
            .collect(),
    };
    let path = a.out.join("metrics.json");
    write_json(&path, &report)?;
    out.push(path);
    outln!(
        "{}",
        serde_json::json!({ "level": "manifesto", "n": pooled_report.n, "spearman_r": pooled_report.spearman_r, "mae": pooled_report.mae })
    );
    Ok(out)
}

fn tie_break(t: TieBreakArg) -> TieBreak {
    match t {
        TieBreakArg::Centreward => TieBreak::Centreward,
        TieBreakArg::Leftward => TieBreak::Leftward,
        TieBreakArg::Rightward => TieBreak::Rightward,
    }
}

fn stance_level(a: &EvaluateArgs, corpus: &Corpus, scale: &RileScale, folds: &[Fold]) -> Result<Vec<PathBuf>> {
    let per_fold: Vec<(Labelled, MetricsReport)> = folds
        .par_iter()
        .map(|f| {
            let rows: Labelled = match &f.data {
                ExchangeFile::Chunks(set) => aggregate_chunk_stances(set, tie_break(a.tie_break))?
                    .into_iter()
                    .map(|(id, pred)| {
                        let gold = stance_bin(gold_rile(corpus, &id, scale)?)?;
                        Ok((id, gold.as_str().to_owned(), pred.as_str().to_owned()))
                    })
                    .collect::<Result<_>>()?,
                ExchangeFile::Statements(_) => fold_pairs(corpus, scale, f)?
                    .into_iter()
                    .map(|p| {
                        Ok((
                            p.manifesto_id,
                            stance_bin(p.gold)?.as_str().to_owned(),
                            stance_bin(p.pred)?.as_str().to_owned(),
                        ))
                    })
                    .collect::<Result<_>>()?,
            };
            let gold: Vec<&str> = rows.iter().map(|r| r.1.as_str()).collect();
            let pred: Vec<&str> = rows.iter().map(|r| r.2.as_str()).collect();
            let report = classification_metrics_with_labels(&gold, &pred, &stance_names())?;
            Ok((rows, report))
        })
        .collect::<Result<Vec<_>>>()
        .context("stance evaluation")?;
    let parts: Vec<Labelled> = per_fold.iter().map(|p| p.0.clone()).collect();
    let mut pooled_rows = pool(&parts, |r| r.0.clone(), "manifesto")?;
    pooled_rows.sort();
    let gold: Vec<&str> = pooled_rows.iter().map(|r| r.1.as_str()).collect();
    let pred: Vec<&str> = pooled_rows.iter().map(|r| r.2.as_str()).collect();
    let labels = stance_names();
    let pooled = classification_metrics_with_labels(&gold, &pred, &labels)?;
    let out = write_classification(
        a,
        folds,
        Classified {
            level: "stance",
            space: None,
            labels,
            per_fold,
            pooled_rows,
            pooled: pooled.clone(),
        },
    )?;
    outln!(
        "{}",
        serde_json::json!({ "level": "stance", "n": pooled.n, "accuracy": pooled.accuracy, "weighted_f1": pooled.weighted_f1 })
    );
    Ok(out)
}

fn stance_names() -> Vec<String> {
    StanceBin::ALL.iter().map(|b| b.as_str().to_owned()).collect()
}
