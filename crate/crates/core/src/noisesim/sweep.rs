use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::eval::{scale_error_report, DEFAULT_EPSILON};
use crate::scales::{rile_class, rile_score, RileClass, RileTally};

use super::spec::NoiseSpec;

/// Diagnostics for one spec and replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub spec: String,
    pub replicate: usize,
    pub spearman_r: Option<f64>,
    pub mae: f64,
    pub mean_error: f64,
    pub flips_ul: u64,
    pub flips_lr: u64,
    pub dispersion_ratio: Option<f64>,
    pub error_skew: Option<f64>,
}

/// Mean and sample standard deviation over the replicates where the
/// statistic is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

impl Aggregate {
    pub fn of<I: IntoIterator<Item = Option<f64>>>(values: I) -> Self {
        let xs: Vec<f64> = values.into_iter().flatten().collect();
        let n = xs.len();
        if n == 0 {
            return Aggregate { n, mean: None, std: None };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std = (n > 1).then(|| (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt());
        Aggregate {
            n,
            mean: Some(mean),
            std,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub spec: String,
    pub replicates: usize,
    pub spearman_r: Aggregate,
    pub mae: Aggregate,
    pub mean_error: Aggregate,
    pub dispersion_ratio: Aggregate,
    pub error_skew: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub summaries: Vec<SweepSummary>,
}

/// For every spec and replicate, perturbs all gold 3-way labels, recomputes
/// manifesto RILEs and compares them with the gold RILEs.
///
/// Replicate `r` of a spec draws from the ChaCha8 stream `r` of the spec's
/// seed, so results do not depend on scheduling.
pub fn noise_sweep(corpus: &Corpus, specs: &[NoiseSpec<RileClass>], replicates: usize) -> Result<SweepReport> {
    if replicates == 0 {
        return Err(Error::invalid("replicates must be at least 1"));
    }
    if corpus.len() < 2 {
        return Err(Error::data("noise sweep needs at least two manifestos"));
    }
    let gold_labels: Vec<Vec<RileClass>> = corpus
        .manifestos()
        .map(|m| m.statements.iter().map(|s| rile_class(&s.code)).collect())
        .collect();
    let gold: Vec<f64> = gold_labels
        .iter()
        .map(|ls| rile_score::<f64>(&RileTally::from_classes(ls.iter().copied())).map(|s| s.value()))
        .collect::<Result<_>>()?;

    let jobs: Vec<(&NoiseSpec<RileClass>, usize)> =
        specs.iter().flat_map(|s| (0..replicates).map(move |r| (s, r))).collect();
    let rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|&(spec, replicate)| {
            let sampler = spec.sampler()?;
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(replicate as u64);
            let mut pred = Vec::with_capacity(gold.len());
            for labels in &gold_labels {
                let mut tally = RileTally::default();
                for l in labels {
                    tally.add(sampler.emit(l, &mut rng)?);
                }
                pred.push(rile_score::<f64>(&tally)?.value());
            }
            let r = scale_error_report(&gold, &pred, DEFAULT_EPSILON)?;
            Ok(SweepRow {
                spec: spec.name.clone(),
                replicate,
                spearman_r: r.spearman_r,
                mae: r.mae,
                mean_error: r.mean_error,
                flips_ul: r.sign_flips.ul,
                flips_lr: r.sign_flips.lr,
                dispersion_ratio: r.dispersion_ratio,
                error_skew: r.error_skew,
            })
        })
        .collect::<Result<_>>()?;

    let summaries = rows
        .chunks(replicates)
        .map(|rs| SweepSummary {
            spec: rs[0].spec.clone(),
            replicates,
            spearman_r: Aggregate::of(rs.iter().map(|r| r.spearman_r)),
            mae: Aggregate::of(rs.iter().map(|r| Some(r.mae))),
            mean_error: Aggregate::of(rs.iter().map(|r| Some(r.mean_error))),
            dispersion_ratio: Aggregate::of(rs.iter().map(|r| r.dispersion_ratio)),
            error_skew: Aggregate::of(rs.iter().map(|r| r.error_skew)),
        })
        .collect();
    Ok(SweepReport { rows, summaries })
}
