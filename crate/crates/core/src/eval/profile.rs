use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::scales::{major_code, RileClass, RileScale};

/// Label shares for one country.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryShares {
    pub country: String,
    pub statements: u64,
    /// Share of statements per major code, residual `0` included.
    pub major_shares: BTreeMap<String, f64>,
    /// Cumulative share of the statements in the requested class.
    pub class_share: f64,
}

/// Per-country label shares under the standard scale, sorted by country.
pub fn category_share_profile(corpus: &Corpus, class: RileClass) -> Vec<CountryShares> {
    category_share_profile_with(corpus, class, &RileScale::standard())
}

pub fn category_share_profile_with(corpus: &Corpus, class: RileClass, scale: &RileScale) -> Vec<CountryShares> {
    let mut acc: BTreeMap<&str, (u64, u64, BTreeMap<String, u64>)> = BTreeMap::new();
    for m in corpus.manifestos() {
        let entry = acc.entry(m.country.as_str()).or_default();
        for s in &m.statements {
            entry.0 += 1;
            if scale.class_of(&s.code) == class {
                entry.1 += 1;
            }
            *entry.2.entry(major_code(&s.code).as_str().to_owned()).or_default() += 1;
        }
    }
    acc.into_iter()
        .map(|(country, (n, in_class, majors))| CountryShares {
            country: country.to_owned(),
            statements: n,
            major_shares: majors.into_iter().map(|(k, c)| (k, c as f64 / n as f64)).collect(),
            class_share: in_class as f64 / n as f64,
        })
        .collect()
}
