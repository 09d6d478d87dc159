use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::exchange::{Prediction, PredictionSet};
use super::labels::LabelSpace;
use crate::error::{Error, Result};

/// Predicts one fixed label for every input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityClassifier {
    pub label: String,
    pub space: LabelSpace,
}

/// Fits the majority-class baseline. Ties go to the lexicographically
/// smallest label.
pub fn majority_label<I, S>(train_labels: I, space: LabelSpace) -> Result<MajorityClassifier>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for label in train_labels {
        let label = label.as_ref();
        space.check(label)?;
        *counts.entry(label.to_owned()).or_default() += 1;
    }
    let mut best: Option<(&String, usize)> = None;
    for (label, &n) in &counts {
        if best.is_none_or(|(_, b)| n > b) {
            best = Some((label, n));
        }
    }
    let (label, _) = best.ok_or_else(|| Error::invalid("training set is empty"))?;
    Ok(MajorityClassifier {
        label: label.clone(),
        space,
    })
}

impl MajorityClassifier {
    pub fn predict<'a, I>(&self, statement_ids: I, model_name: &str, split_name: &str) -> Result<PredictionSet>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let preds = statement_ids
            .into_iter()
            .map(|id| Prediction {
                statement_id: id.to_owned(),
                label: self.label.clone(),
                probs: None,
            })
            .collect();
        PredictionSet::from_predictions(model_name, split_name, preds)
    }
}
