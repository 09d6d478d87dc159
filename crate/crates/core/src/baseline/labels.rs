use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::scales::{registry, rile_class, CategoryCode, RileClass};

/// Label granularity a classifier predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelSpace {
    /// Every registry code, including the residual `0`.
    CmpFull,
    /// `Left`, `Right` and `Other`.
    Rile3,
}

impl LabelSpace {
    pub fn label_of(self, code: &CategoryCode) -> String {
        match self {
            LabelSpace::CmpFull => code.as_str().to_owned(),
            LabelSpace::Rile3 => rile_class(code).as_str().to_owned(),
        }
    }

    /// All labels of the space in ascending order.
    pub fn labels(self) -> Vec<String> {
        let mut labels: Vec<String> = match self {
            LabelSpace::CmpFull => registry::canonical_codes().into_iter().map(str::to_owned).collect(),
            LabelSpace::Rile3 => RileClass::ALL.iter().map(|c| c.as_str().to_owned()).collect(),
        };
        labels.sort();
        labels
    }

    pub fn contains(self, label: &str) -> bool {
        match self {
            LabelSpace::CmpFull => registry::is_registered(label),
            LabelSpace::Rile3 => RileClass::ALL.iter().any(|c| c.as_str() == label),
        }
    }

    pub fn check(self, label: &str) -> Result<()> {
        if self.contains(label) {
            Ok(())
        } else {
            Err(Error::UnknownLabel(label.to_owned()))
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LabelSpace::CmpFull => "cmp-full",
            LabelSpace::Rile3 => "rile3",
        }
    }
}

impl fmt::Display for LabelSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LabelSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cmp" | "cmp-full" | "full" => Ok(LabelSpace::CmpFull),
            "rile3" | "rile-3way" | "3way" | "3-way" => Ok(LabelSpace::Rile3),
            other => Err(Error::invalid(format!("unknown label space {other:?}"))),
        }
    }
}

/// A statement text with its gold label in some label space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example<'a> {
    pub id: &'a str,
    pub text: &'a str,
    pub label: String,
}

/// Labeled statements of the listed manifestos, in manifesto then position
/// order. Unknown manifesto ids are skipped.
pub fn examples<'a, I, S>(corpus: &'a Corpus, manifesto_ids: I, space: LabelSpace) -> Vec<Example<'a>>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    manifesto_ids
        .into_iter()
        .filter_map(|id| corpus.get(id.as_ref()))
        .flat_map(|m| m.statements.iter())
        .map(|s| Example {
            id: &s.id,
            text: &s.text,
            label: space.label_of(&s.code),
        })
        .collect()
}
