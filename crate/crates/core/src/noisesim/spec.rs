use std::collections::BTreeMap;
use std::fmt::Debug;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scales::RileClass;

const ROW_TOLERANCE: f64 = 1e-9;

/// A row-stochastic confusion matrix: row `i` gives the emission
/// distribution for true label `labels[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec<L = RileClass> {
    pub name: String,
    labels: Vec<L>,
    matrix: Vec<Vec<f64>>,
    pub seed: u64,
}

impl<L: Clone + Ord + Debug> NoiseSpec<L> {
    pub fn new(name: impl Into<String>, labels: Vec<L>, matrix: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        let spec = NoiseSpec {
            name: name.into(),
            labels,
            matrix,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Row-normalizes a non-negative count matrix.
    pub fn from_counts(name: impl Into<String>, labels: Vec<L>, counts: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        let mut matrix = Vec::with_capacity(counts.len());
        for (i, row) in counts.into_iter().enumerate() {
            if row.iter().any(|&c| !(c.is_finite() && c >= 0.0)) {
                return Err(Error::data(format!("confusion counts row {i}: entries must be finite and non-negative")));
            }
            let sum: f64 = row.iter().sum();
            if sum <= 0.0 {
                return Err(Error::data(format!("confusion counts row {i} sums to zero")));
            }
            matrix.push(row.into_iter().map(|c| c / sum).collect());
        }
        Self::new(name, labels, matrix, seed)
    }

    pub fn identity(labels: Vec<L>, seed: u64) -> Result<Self> {
        let k = labels.len();
        let matrix = (0..k).map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::new("identity", labels, matrix, seed)
    }

    pub fn uniform(labels: Vec<L>, seed: u64) -> Result<Self> {
        let k = labels.len();
        Self::new("uniform", labels, vec![vec![1.0 / k as f64; k]; k], seed)
    }

    fn validate(&self) -> Result<()> {
        let k = self.labels.len();
        if k == 0 {
            return Err(Error::data("noise spec has no labels"));
        }
        let mut sorted = self.labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != k {
            return Err(Error::data("noise spec labels must be distinct"));
        }
        if self.matrix.len() != k || self.matrix.iter().any(|r| r.len() != k) {
            return Err(Error::data(format!("confusion matrix must be {k}x{k}")));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.iter().any(|&p| !(p.is_finite() && p >= 0.0)) {
                return Err(Error::data(format!("confusion row {i}: entries must be finite and non-negative")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::data(format!("confusion row {i} sums to {sum}, expected 1")));
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    /// `(1 - alpha) I + alpha P`: off-diagonal mass scaled by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid(format!("alpha must be in [0, 1], got {alpha}")));
        }
        let k = self.labels.len();
        let matrix = (0..k)
            .map(|i| {
                let mut row: Vec<f64> = (0..k).map(|j| if i == j { 0.0 } else { alpha * self.matrix[i][j] }).collect();
                row[i] = 1.0 - row.iter().sum::<f64>();
                row
            })
            .collect();
        Self::new(format!("{}@{alpha}", self.name), self.labels.clone(), matrix, self.seed)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub(crate) fn sampler(&self) -> Result<Sampler<L>> {
        let rows = self
            .matrix
            .iter()
            .map(|row| WeightedIndex::new(row).map_err(|e| Error::data(format!("confusion row: {e}"))))
            .collect::<Result<_>>()?;
        let index = self.labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        Ok(Sampler {
            labels: self.labels.clone(),
            index,
            rows,
        })
    }
}

impl NoiseSpec<RileClass> {
    /// The coarse confusion counts observed for a fine-grained cross-country
    /// classifier, rows and columns ordered Right, Left, Other.
    pub fn observed_xcountry(seed: u64) -> Self {
        Self::from_counts(
            "observed-xcountry",
            vec![RileClass::Right, RileClass::Left, RileClass::Other],
            vec![vec![46.0, 20.0, 33.0], vec![8.0, 66.0, 26.0], vec![9.0, 16.0, 75.0]],
            seed,
        )
        .expect("constant counts are valid")
    }

    /// Swaps the roles of Left and Right in both rows and columns.
    pub fn mirrored(&self) -> Self {
        NoiseSpec {
            name: format!("{}-mirrored", self.name),
            labels: self.labels.iter().map(|l| l.mirrored()).collect(),
            matrix: self.matrix.clone(),
            seed: self.seed,
        }
    }

    /// Whether the matrix is unchanged by swapping Left and Right.
    pub fn is_lr_symmetric(&self) -> bool {
        let m = self.mirrored();
        self.labels.iter().all(|a| {
            self.labels
                .iter()
                .all(|b| (self.prob(a, b) - m.prob(a, b)).abs() <= ROW_TOLERANCE)
        })
    }

    fn prob(&self, from: &RileClass, to: &RileClass) -> f64 {
        let i = self.labels.iter().position(|l| l == from).expect("label present");
        let j = self.labels.iter().position(|l| l == to).expect("label present");
        self.matrix[i][j]
    }

    /// Parses `{"name"?, "labels": [...], "matrix" | "counts": [[...]]}`.
    pub fn from_json(json: &str, seed: u64) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct File {
            name: Option<String>,
            labels: Vec<String>,
            matrix: Option<Vec<Vec<f64>>>,
            counts: Option<Vec<Vec<f64>>>,
        }
        let file: File = serde_json::from_str(json)?;
        let labels = file
            .labels
            .iter()
            .map(|l| l.parse::<RileClass>().map_err(|_| Error::UnknownLabel(l.clone())))
            .collect::<Result<Vec<_>>>()?;
        let name = file.name.unwrap_or_else(|| "custom".to_owned());
        match (file.matrix, file.counts) {
            (Some(m), None) => Self::new(name, labels, m, seed),
            (None, Some(c)) => Self::from_counts(name, labels, c, seed),
            _ => Err(Error::data("noise spec needs exactly one of `matrix` or `counts`")),
        }
    }
}

pub(crate) struct Sampler<L> {
    labels: Vec<L>,
    index: BTreeMap<L, usize>,
    rows: Vec<WeightedIndex<f64>>,
}

impl<L: Clone + Ord + Debug> Sampler<L> {
    pub(crate) fn emit<R: Rng>(&self, label: &L, rng: &mut R) -> Result<L> {
        let i = *self
            .index
            .get(label)
            .ok_or_else(|| Error::UnknownLabel(format!("{label:?}")))?;
        Ok(self.labels[self.rows[i].sample(rng)].clone())
    }
}

/// Resamples every label independently from its confusion row, using an RNG
/// seeded from the spec.
pub fn perturb_labels<L: Clone + Ord + Debug>(gold: &[L], spec: &NoiseSpec<L>) -> Result<Vec<L>> {
    perturb_with(gold, spec, &mut ChaCha8Rng::seed_from_u64(spec.seed))
}

pub fn perturb_with<L: Clone + Ord + Debug, R: Rng>(gold: &[L], spec: &NoiseSpec<L>, rng: &mut R) -> Result<Vec<L>> {
    let sampler = spec.sampler()?;
    gold.iter().map(|l| sampler.emit(l, rng)).collect()
}
