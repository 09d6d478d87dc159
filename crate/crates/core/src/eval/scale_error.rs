use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::PredictionSet;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::num::{from_f64, from_usize};
use crate::scales::{manifesto_rile_with, LabelSource, RileScale};
use crate::Scalar;

use super::rank::spearman;

/// Default dead zone around zero for sign-flip counting.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Manifestos whose predicted sign contradicts a clearly signed gold score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignFlips {
    /// Gold left of `-eps`, prediction right of zero.
    pub ul: u64,
    /// Gold right of `eps`, prediction left of zero.
    pub lr: u64,
}

/// Scale-level error diagnostics for paired gold and predicted scores.
///
/// `spearman_r`, `dispersion_ratio` and `error_skew` are `None` where the
/// statistic is undefined: a constant side, a constant gold side, and fewer
/// than three observations or constant errors respectively. `error_skew` is
/// the adjusted Fisher-Pearson sample skewness of `pred - gold`;
/// `dispersion_ratio` is the ratio of sample standard deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport<T> {
    pub n: u64,
    pub spearman_r: Option<T>,
    pub mae: T,
    pub mean_error: T,
    pub sign_flips: SignFlips,
    pub dispersion_ratio: Option<T>,
    pub error_skew: Option<T>,
}

fn mean<T: Scalar>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / from_usize(xs.len())
}

fn sample_std<T: Scalar>(xs: &[T]) -> T {
    let m = mean(xs);
    let ss: T = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    (ss / from_usize(xs.len() - 1)).sqrt()
}

fn adjusted_skew<T: Scalar>(xs: &[T]) -> Option<T> {
    let n = xs.len();
    if n < 3 {
        return None;
    }
    let nf: T = from_usize(n);
    let m = mean(xs);
    let m2 = xs.iter().map(|&x| (x - m).powi(2)).sum::<T>() / nf;
    let m3 = xs.iter().map(|&x| (x - m).powi(3)).sum::<T>() / nf;
    if m2 == T::zero() {
        return None;
    }
    let g1 = m3 / m2.powf(from_f64(1.5));
    Some(g1 * (nf * (nf - T::one())).sqrt() / (nf - from_f64(2.0)))
}

/// Compares predicted scale positions against gold ones.
pub fn scale_error_report<T: Scalar>(gold: &[T], pred: &[T], epsilon: T) -> Result<ErrorReport<T>> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch(gold.len(), pred.len()));
    }
    if gold.len() < 2 {
        return Err(Error::invalid(format!("need at least two scores, got {}", gold.len())));
    }
    if epsilon.is_nan() || epsilon < T::zero() {
        return Err(Error::invalid("epsilon must be non-negative"));
    }
    if gold.iter().chain(pred).any(|v| !v.is_finite()) {
        return Err(Error::data("non-finite score"));
    }
    let errors: Vec<T> = pred.iter().zip(gold).map(|(&p, &g)| p - g).collect();
    let spearman_r = match spearman(gold, pred) {
        Ok(r) => Some(r),
        Err(Error::UndefinedCorrelation(_)) => None,
        Err(e) => return Err(e),
    };
    let mut flips = SignFlips::default();
    for (&g, &p) in gold.iter().zip(pred) {
        if g < -epsilon && p > T::zero() {
            flips.ul += 1;
        } else if g > epsilon && p < T::zero() {
            flips.lr += 1;
        }
    }
    let sd_gold = sample_std(gold);
    Ok(ErrorReport {
        n: gold.len() as u64,
        spearman_r,
        mae: mean(&errors.iter().map(|e| e.abs()).collect::<Vec<_>>()),
        mean_error: mean(&errors),
        sign_flips: flips,
        dispersion_ratio: (sd_gold > T::zero()).then(|| sample_std(pred) / sd_gold),
        error_skew: adjusted_skew(&errors),
    })
}

/// A manifesto's gold and predicted scale positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorePair<T> {
    pub manifesto_id: String,
    pub country: String,
    pub year: u16,
    pub gold: T,
    pub pred: T,
}

/// Gold and predicted RILE for each listed manifesto, in the given order.
pub fn manifesto_score_pairs<T: Scalar>(
    corpus: &Corpus,
    manifesto_ids: &[String],
    preds: &PredictionSet,
    scale: &RileScale,
) -> Result<Vec<ScorePair<T>>> {
    manifesto_ids
        .par_iter()
        .map(|id| {
            let m = corpus
                .get(id)
                .ok_or_else(|| Error::data(format!("manifesto {id:?} is not in the corpus")))?;
            Ok(ScorePair {
                manifesto_id: m.id.clone(),
                country: m.country.clone(),
                year: m.year(),
                gold: manifesto_rile_with::<T>(m, LabelSource::Gold, scale)?.value(),
                pred: manifesto_rile_with::<T>(m, LabelSource::Predicted(preds), scale)?.value(),
            })
        })
        .collect()
}

/// Stance-bin names for a sequence of scores.
pub fn stance_labels<T: Scalar>(scores: &[T]) -> Result<Vec<String>> {
    scores
        .iter()
        .map(|&s| crate::scales::stance_bin(s).map(|b| b.as_str().to_owned()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
}

/// Equal-width bins over `[lo, hi]`; the last bin is closed on the right and
/// values outside the range are ignored.
pub fn histogram<T: Scalar>(values: &[T], bins: usize, lo: f64, hi: f64) -> Result<Vec<HistogramBin>> {
    if bins == 0 || lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::invalid(format!("bad histogram range [{lo}, {hi}] with {bins} bins")));
    }
    let width = (hi - lo) / bins as f64;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|i| HistogramBin {
            lo: lo + i as f64 * width,
            hi: if i + 1 == bins { hi } else { lo + (i + 1) as f64 * width },
            count: 0,
        })
        .collect();
    for v in values.iter().filter_map(|v| v.to_f64()) {
        if !(lo..=hi).contains(&v) {
            continue;
        }
        let i = (((v - lo) / width) as usize).min(bins - 1);
        // guard against rounding putting a value one bin off
        let i = if v < out[i].lo { i - 1 } else if v >= out[i].hi && i + 1 < bins { i + 1 } else { i };
        out[i].count += 1;
    }
    Ok(out)
}
