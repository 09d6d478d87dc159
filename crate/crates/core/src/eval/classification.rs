use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::baseline::LabelSpace;
use crate::error::{Error, Result};

/// Accuracy and support-weighted F1 over a labelled sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: u64,
    pub accuracy: f64,
    pub weighted_f1: f64,
    pub per_label_f1: BTreeMap<String, f64>,
    pub support: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct LabelCounts {
    tp: u64,
    fp: u64,
    fn_: u64,
}

impl LabelCounts {
    fn support(self) -> u64 {
        self.tp + self.fn_
    }

    fn f1(self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            0.0
        } else {
            (2 * self.tp) as f64 / denom as f64
        }
    }
}

/// Shared by the direct and the confusion-matrix paths so both give
/// bit-identical results.
fn summarize(n: u64, correct: u64, counts: &BTreeMap<String, LabelCounts>) -> MetricsReport {
    let mut weighted = 0.0;
    for c in counts.values() {
        weighted += c.support() as f64 * c.f1();
    }
    MetricsReport {
        n,
        accuracy: correct as f64 / n as f64,
        weighted_f1: weighted / n as f64,
        per_label_f1: counts.iter().map(|(l, c)| (l.clone(), c.f1())).collect(),
        support: counts.iter().map(|(l, c)| (l.clone(), c.support())).collect(),
    }
}

fn check_lengths<S: AsRef<str>>(gold: &[S], pred: &[S]) -> Result<()> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch(gold.len(), pred.len()));
    }
    if gold.is_empty() {
        return Err(Error::NoRecords);
    }
    Ok(())
}

/// Accuracy and weighted F1 where every label must belong to `space`.
///
/// Per-label entries cover the labels that occur in either sequence; labels
/// absent from gold have zero support and so zero weight.
pub fn classification_metrics<S: AsRef<str>>(gold: &[S], pred: &[S], space: LabelSpace) -> Result<MetricsReport> {
    for l in gold.iter().chain(pred) {
        space.check(l.as_ref())?;
    }
    metrics_unchecked(gold, pred)
}

/// Like [`classification_metrics`] with an explicit label list in place of a
/// label space.
pub fn classification_metrics_with_labels<S: AsRef<str>>(
    gold: &[S],
    pred: &[S],
    labels: &[String],
) -> Result<MetricsReport> {
    let known: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
    if let Some(l) = gold.iter().chain(pred).find(|l| !known.contains(l.as_ref())) {
        return Err(Error::UnknownLabel(l.as_ref().to_owned()));
    }
    metrics_unchecked(gold, pred)
}

fn metrics_unchecked<S: AsRef<str>>(gold: &[S], pred: &[S]) -> Result<MetricsReport> {
    check_lengths(gold, pred)?;
    let mut counts: BTreeMap<String, LabelCounts> = BTreeMap::new();
    let mut correct = 0;
    for (g, p) in gold.iter().zip(pred) {
        let (g, p) = (g.as_ref(), p.as_ref());
        if g == p {
            correct += 1;
            counts.entry(g.to_owned()).or_default().tp += 1;
        } else {
            counts.entry(g.to_owned()).or_default().fn_ += 1;
            counts.entry(p.to_owned()).or_default().fp += 1;
        }
    }
    Ok(summarize(gold.len() as u64, correct, &counts))
}

/// Sorted union of the labels occurring in `gold` and `pred`.
pub fn observed_labels<S: AsRef<str>>(gold: &[S], pred: &[S]) -> Vec<String> {
    gold.iter()
        .chain(pred)
        .map(|l| l.as_ref())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(str::to_owned)
        .collect()
}

/// Square count matrix; rows are true labels, columns predicted labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

/// Tallies `gold` against `pred` over `labels`.
pub fn confusion<S: AsRef<str>>(gold: &[S], pred: &[S], labels: &[String]) -> Result<ConfusionMatrix> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch(gold.len(), pred.len()));
    }
    let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    if index.len() != labels.len() {
        return Err(Error::invalid("confusion labels must be distinct"));
    }
    let find = |l: &str| index.get(l).copied().ok_or_else(|| Error::UnknownLabel(l.to_owned()));
    let mut counts = vec![vec![0u64; labels.len()]; labels.len()];
    for (g, p) in gold.iter().zip(pred) {
        counts[find(g.as_ref())?][find(p.as_ref())?] += 1;
    }
    Ok(ConfusionMatrix {
        labels: labels.to_vec(),
        counts,
    })
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn accuracy(&self) -> f64 {
        self.trace() as f64 / self.total() as f64
    }

    /// Metrics recomputed from the counts alone. Labels that never occur in
    /// either margin are left out.
    pub fn metrics(&self) -> Result<MetricsReport> {
        let n = self.total();
        if n == 0 {
            return Err(Error::NoRecords);
        }
        let k = self.labels.len();
        let mut counts = BTreeMap::new();
        for i in 0..k {
            let row: u64 = self.counts[i].iter().sum();
            let col: u64 = (0..k).map(|r| self.counts[r][i]).sum();
            if row == 0 && col == 0 {
                continue;
            }
            let tp = self.counts[i][i];
            counts.insert(
                self.labels[i].clone(),
                LabelCounts {
                    tp,
                    fp: col - tp,
                    fn_: row - tp,
                },
            );
        }
        Ok(summarize(n, self.trace(), &counts))
    }

    pub fn weighted_f1(&self) -> Result<f64> {
        Ok(self.metrics()?.weighted_f1)
    }

    /// Each row as percentages of its total; empty rows stay zero.
    pub fn row_normalized(&self) -> Vec<Vec<f64>> {
        self.counts
            .iter()
            .map(|row| {
                let s: u64 = row.iter().sum();
                row.iter()
                    .map(|&c| if s == 0 { 0.0 } else { 100.0 * c as f64 / s as f64 })
                    .collect()
            })
            .collect()
    }

    /// CSV with a `true\pred` corner cell, one row per true label.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["true\\pred".to_owned()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for (label, row) in self.labels.iter().zip(&self.counts) {
            let mut rec = vec![label.clone()];
            rec.extend(row.iter().map(u64::to_string));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn perfect_predictions() {
        let g = ["Left", "Right", "Other", "Other"];
        let m = classification_metrics(&g, &g, LabelSpace::Rile3).unwrap();
        assert_eq!(m.accuracy, 1.0);
        assert_eq!(m.weighted_f1, 1.0);
    }

    #[test]
    fn hand_computed_weighted_f1() {
        let m = classification_metrics_with_labels(&["A", "A", "B", "B"], &["A", "B", "B", "B"], &labels(&["A", "B"]))
            .unwrap();
        assert_eq!(m.accuracy, 0.75);
        approx::assert_abs_diff_eq!(m.weighted_f1, 0.5 * (2.0 / 3.0) + 0.5 * 0.8, epsilon = 1e-15);
        assert_eq!(m.support["A"], 2);
        approx::assert_abs_diff_eq!(m.per_label_f1["A"], 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn predicted_only_labels_carry_no_weight() {
        let m = classification_metrics(&["Other", "Other"], &["Other", "Left"], LabelSpace::Rile3).unwrap();
        assert_eq!(m.support["Left"], 0);
        assert_eq!(m.per_label_f1["Left"], 0.0);
        approx::assert_abs_diff_eq!(m.weighted_f1, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            classification_metrics(&["Left"], &["Centre"], LabelSpace::Rile3),
            Err(Error::UnknownLabel(_))
        ));
        assert!(classification_metrics(&["Left"], &[], LabelSpace::Rile3).is_err());
        assert!(classification_metrics::<&str>(&[], &[], LabelSpace::Rile3).is_err());
        assert!(classification_metrics(&["104"], &["999"], LabelSpace::CmpFull).is_err());
    }

    #[test]
    fn hand_counted_confusion() {
        let m = confusion(&["A", "A", "B", "B", "B"], &["A", "B", "B", "A", "B"], &labels(&["A", "B"])).unwrap();
        assert_eq!(m.counts, vec![vec![1, 1], vec![1, 2]]);
        assert_eq!(m.row_sums(), vec![2, 3]);
        assert_eq!(m.row_normalized()[0], vec![50.0, 50.0]);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "true\\pred,A,B\nA,1,1\nB,1,2\n");
    }

    #[test]
    fn identity_confusion_is_diagonal() {
        let g = ["x", "y", "y", "z"];
        let m = confusion(&g, &g, &labels(&["x", "y", "z"])).unwrap();
        assert_eq!(m.counts, vec![vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 1]]);
    }

    proptest! {
        #[test]
        fn confusion_recomputation_is_exact(pairs in prop::collection::vec((0usize..4, 0usize..4), 1..200)) {
            let names = labels(&["a", "b", "c", "d"]);
            let gold: Vec<&str> = pairs.iter().map(|p| names[p.0].as_str()).collect();
            let pred: Vec<&str> = pairs.iter().map(|p| names[p.1].as_str()).collect();
            let direct = classification_metrics_with_labels(&gold, &pred, &names).unwrap();
            let cm = confusion(&gold, &pred, &names).unwrap();
            prop_assert_eq!(&cm.metrics().unwrap(), &direct);
            prop_assert_eq!(cm.accuracy(), direct.accuracy);
            prop_assert!((0.0..=1.0).contains(&direct.weighted_f1));
            let support: Vec<u64> = names.iter().map(|l| direct.support.get(l).copied().unwrap_or(0)).collect();
            prop_assert_eq!(cm.row_sums(), support);
        }
    }
}
