//! Cross-country and cross-time partitions at manifesto granularity.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SplitMeta {
    /// Leave-one-country-out fold.
    XCountry { held_out_country: String },
    /// Train before `cutoff_year`, test on `[cutoff_year, end_year]`.
    XTime { cutoff_year: u16, end_year: u16 },
}

/// A named train/dev/test partition of manifesto ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub name: String,
    pub train: BTreeSet<String>,
    pub dev: BTreeSet<String>,
    pub test: BTreeSet<String>,
    pub metadata: SplitMeta,
}

impl SplitSpec {
    /// Checks disjointness, non-empty test and that every id is in `corpus`.
    pub fn validate(&self, corpus: &Corpus) -> Result<()> {
        if self.test.is_empty() {
            return Err(Error::data(format!("split {:?}: empty test set", self.name)));
        }
        let parts = [("train", &self.train), ("dev", &self.dev), ("test", &self.test)];
        for (i, (a, sa)) in parts.iter().enumerate() {
            for (b, sb) in &parts[i + 1..] {
                if let Some(id) = sa.intersection(sb).next() {
                    return Err(Error::data(format!(
                        "split {:?}: manifesto {id:?} is in both {a} and {b}",
                        self.name
                    )));
                }
            }
            if let Some(id) = sa.iter().find(|id| !corpus.contains(id)) {
                return Err(Error::data(format!(
                    "split {:?}: {a} manifesto {id:?} is not in the corpus",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn all_ids(&self) -> impl Iterator<Item = &String> {
        self.train.iter().chain(&self.dev).chain(&self.test)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

/// One fold per country: that country's manifestos are the test set, every
/// other manifesto goes to train. Folds come in alphabetical country order.
pub fn leave_one_country_out(corpus: &Corpus) -> Result<Vec<SplitSpec>> {
    let countries = corpus.countries();
    if countries.len() < 2 {
        return Err(Error::data(format!(
            "leave-one-country-out needs at least 2 countries, corpus has {}",
            countries.len()
        )));
    }
    Ok(countries
        .iter()
        .map(|&country| {
            let (test, train) = corpus
                .manifestos()
                .map(|m| (m.id.clone(), m.country == country))
                .partition::<Vec<_>, _>(|(_, held)| *held);
            SplitSpec {
                name: format!("xcountry-{}", slug(country)),
                train: train.into_iter().map(|(id, _)| id).collect(),
                dev: BTreeSet::new(),
                test: test.into_iter().map(|(id, _)| id).collect(),
                metadata: SplitMeta::XCountry {
                    held_out_country: country.to_owned(),
                },
            }
        })
        .collect())
}

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

/// Train on manifestos dated before `cutoff_year`, test on those dated in
/// `[cutoff_year, end_year]`. Later manifestos are left out.
pub fn temporal_split(corpus: &Corpus, cutoff_year: u16, end_year: u16) -> Result<SplitSpec> {
    if end_year < cutoff_year {
        return Err(Error::invalid(format!("end year {end_year} precedes cutoff {cutoff_year}")));
    }
    let mut train = BTreeSet::new();
    let mut test = BTreeSet::new();
    for m in corpus.manifestos() {
        let y = m.year();
        if y < cutoff_year {
            train.insert(m.id.clone());
        } else if y <= end_year {
            test.insert(m.id.clone());
        }
    }
    if train.is_empty() || test.is_empty() {
        return Err(Error::data(format!(
            "temporal split at {cutoff_year}: {} train and {} test manifestos; both sides must be non-empty",
            train.len(),
            test.len()
        )));
    }
    Ok(SplitSpec {
        name: format!("xtime-{cutoff_year}"),
        train,
        dev: BTreeSet::new(),
        test,
        metadata: SplitMeta::XTime { cutoff_year, end_year },
    })
}

/// Moves a seeded, country-stratified `fraction` of the training manifestos
/// (plus any existing dev manifestos folded back first) into dev.
///
/// The dev size is `round(fraction * n)`. Per-country quotas follow the
/// largest-remainder method, with remainder ties going to the alphabetically
/// first country.
pub fn carve_dev(spec: &SplitSpec, corpus: &Corpus, fraction: f64, seed: u64) -> Result<SplitSpec> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!("dev fraction must be in (0, 1), got {fraction}")));
    }
    let pool: BTreeSet<&String> = spec.train.iter().chain(&spec.dev).collect();
    let n_dev = (fraction * pool.len() as f64).round() as usize;
    if n_dev == 0 || n_dev >= pool.len() {
        return Err(Error::invalid(format!(
            "dev fraction {fraction} of {} training manifestos leaves an empty dev or train set",
            pool.len()
        )));
    }

    let mut by_country: BTreeMap<&str, Vec<&String>> = BTreeMap::new();
    for id in &pool {
        let m = corpus
            .get(id)
            .ok_or_else(|| Error::data(format!("split {:?}: unknown manifesto {id:?}", spec.name)))?;
        by_country.entry(m.country.as_str()).or_default().push(id);
    }

    let total = pool.len() as f64;
    let mut quotas: Vec<(&str, usize, f64)> = by_country
        .iter()
        .map(|(c, ids)| {
            let exact = n_dev as f64 * ids.len() as f64 / total;
            (*c, exact.floor() as usize, exact - exact.floor())
        })
        .collect();
    let assigned: usize = quotas.iter().map(|q| q.1).sum();
    let mut order: Vec<usize> = (0..quotas.len()).collect();
    order.sort_by(|&a, &b| quotas[b].2.total_cmp(&quotas[a].2).then(a.cmp(&b)));
    for &i in order.iter().take(n_dev - assigned) {
        quotas[i].1 += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev = BTreeSet::new();
    for (country, quota, _) in quotas {
        let mut ids = by_country[country].clone();
        ids.shuffle(&mut rng);
        dev.extend(ids.into_iter().take(quota).cloned());
    }
    let train = pool.into_iter().filter(|id| !dev.contains(*id)).cloned().collect();
    Ok(SplitSpec {
        name: spec.name.clone(),
        train,
        dev,
        test: spec.test.clone(),
        metadata: spec.metadata.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Manifesto, Statement, YearMonth};
    use crate::scales::CategoryCode;

    fn corpus(spec: &[(&str, u16, usize)]) -> Corpus {
        let mut ms = Vec::new();
        for &(country, year, n) in spec {
            for k in 0..n {
                let id = format!("{country}-{year}-{k}");
                ms.push(Manifesto {
                    id: id.clone(),
                    party: format!("p{k}"),
                    country: country.into(),
                    language: "xx".into(),
                    date: YearMonth::new(year, 6).unwrap(),
                    statements: vec![Statement {
                        id: format!("{id}/0"),
                        text: "text".into(),
                        code: CategoryCode::normalize("0").unwrap(),
                        manifesto_id: id,
                        position: 0,
                    }],
                });
            }
        }
        Corpus::from_manifestos(ms, "test").unwrap()
    }

    #[test]
    fn three_countries_three_folds() {
        let c = corpus(&[("A", 2010, 2), ("B", 2012, 3), ("C", 2015, 1)]);
        let folds = leave_one_country_out(&c).unwrap();
        assert_eq!(folds.len(), 3);
        let a = &folds[0];
        assert_eq!(a.metadata, SplitMeta::XCountry { held_out_country: "A".into() });
        assert_eq!(a.test.len(), 2);
        assert!(a.test.iter().all(|id| c.get(id).unwrap().country == "A"));
        for f in &folds {
            f.validate(&c).unwrap();
            assert_eq!(f.all_ids().count(), c.len());
        }
    }

    #[test]
    fn single_country_is_an_error() {
        let c = corpus(&[("A", 2010, 3)]);
        assert!(leave_one_country_out(&c).is_err());
    }

    #[test]
    fn temporal_boundaries() {
        let c = corpus(&[("A", 2018, 2), ("A", 2019, 1), ("B", 2021, 1), ("B", 2022, 1)]);
        let s = temporal_split(&c, 2019, 2021).unwrap();
        assert!(s.train.iter().all(|id| id.contains("2018")));
        assert_eq!(s.train.len(), 2);
        assert_eq!(s.test.len(), 2);
        assert!(!s.all_ids().any(|id| id.contains("2022")));
        assert!(temporal_split(&corpus(&[("A", 2020, 2)]), 2019, 2021).is_err());
    }

    #[test]
    fn carve_dev_sizes_and_determinism() {
        let c = corpus(&[("A", 2010, 50), ("B", 2010, 30), ("C", 2010, 20), ("D", 2020, 5)]);
        let base = temporal_split(&c, 2019, 2021).unwrap();
        assert_eq!(base.train.len(), 100);
        let s1 = carve_dev(&base, &c, 0.1, 7).unwrap();
        assert_eq!(s1.dev.len(), 10);
        assert_eq!(s1.train.len(), 90);
        s1.validate(&c).unwrap();
        let per = |s: &SplitSpec, k: &str| s.dev.iter().filter(|id| id.starts_with(k)).count();
        assert_eq!((per(&s1, "A"), per(&s1, "B"), per(&s1, "C")), (5, 3, 2));
        assert_eq!(carve_dev(&base, &c, 0.1, 7).unwrap(), s1);
        let s2 = carve_dev(&base, &c, 0.1, 8).unwrap();
        assert_ne!(s1.dev, s2.dev);
    }

    #[test]
    fn carve_dev_rejects_bad_fraction() {
        let c = corpus(&[("A", 2010, 10), ("B", 2020, 1)]);
        let base = temporal_split(&c, 2019, 2021).unwrap();
        for f in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(carve_dev(&base, &c, f, 1).is_err(), "{f}");
        }
        assert!(carve_dev(&base, &c, 0.01, 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = corpus(&[("A", 2010, 2), ("B", 2020, 1)]);
        let s = temporal_split(&c, 2019, 2021).unwrap();
        assert_eq!(SplitSpec::from_json(&s.to_json().unwrap()).unwrap(), s);
    }
}
