//! Prediction-exchange JSONL.
//!
//! Statement level, one object per line:
//! `{"statement_id", "label", "probs"?: {label: p}, "model", "split"}`.
//!
//! Chunk level, one object per line:
//! `{"manifesto_id", "chunk_index", "score"?, "stance"?, "model", "split"}`
//! where at least one of `score` (in `[-1, 1]`) and `stance` is present.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scales::StanceBin;

const PROB_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub statement_id: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<BTreeMap<String, f64>>,
}

impl Prediction {
    fn check(&self) -> std::result::Result<(), String> {
        let Some(probs) = &self.probs else {
            return Ok(());
        };
        if let Some((l, p)) = probs.iter().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
            return Err(format!("probability for {l:?} is {p}, outside [0, 1]"));
        }
        let sum: f64 = probs.values().sum();
        if (sum - 1.0).abs() > PROB_TOLERANCE {
            return Err(format!("probabilities sum to {sum}, not 1"));
        }
        Ok(())
    }
}

/// Per-statement predictions from one model on one split.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    pub model: String,
    pub split: String,
    predictions: Vec<Prediction>,
    index: HashMap<String, usize>,
}

impl PredictionSet {
    pub fn new(model: impl Into<String>, split: impl Into<String>) -> Self {
        PredictionSet {
            model: model.into(),
            split: split.into(),
            predictions: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn from_predictions(
        model: impl Into<String>,
        split: impl Into<String>,
        predictions: Vec<Prediction>,
    ) -> Result<Self> {
        let mut set = PredictionSet::new(model, split);
        for p in predictions {
            set.push(p)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, p: Prediction) -> Result<()> {
        p.check().map_err(Error::Data)?;
        if self.index.contains_key(&p.statement_id) {
            return Err(Error::data(format!("duplicate prediction for statement {:?}", p.statement_id)));
        }
        self.index.insert(p.statement_id.clone(), self.predictions.len());
        self.predictions.push(p);
        Ok(())
    }

    pub fn get(&self, statement_id: &str) -> Option<&Prediction> {
        self.index.get(statement_id).map(|&i| &self.predictions[i])
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &Prediction> {
        self.predictions.iter()
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }

    /// Concatenates sets, e.g. the test folds of a leave-one-out run.
    pub fn merge(&mut self, other: PredictionSet) -> Result<()> {
        for p in other.predictions {
            self.push(p)?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct StatementLineOut<'a> {
    statement_id: &'a str,
    label: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    probs: Option<&'a BTreeMap<String, f64>>,
    model: &'a str,
    split: &'a str,
}

#[derive(Deserialize)]
struct StatementLineIn {
    statement_id: String,
    label: String,
    #[serde(default)]
    probs: Option<BTreeMap<String, f64>>,
    model: String,
    split: String,
}

pub fn write_predictions<W: Write>(set: &PredictionSet, mut out: W) -> Result<()> {
    for p in &set.predictions {
        let line = StatementLineOut {
            statement_id: &p.statement_id,
            label: &p.label,
            probs: p.probs.as_ref(),
            model: &set.model,
            split: &set.split,
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn schema_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        field: "<record>".to_owned(),
        message: message.into(),
    }
}

/// Non-blank lines with their 1-based line numbers.
fn lines<R: Read>(source: R) -> impl Iterator<Item = Result<(usize, String)>> {
    BufReader::new(source)
        .lines()
        .enumerate()
        .filter_map(|(i, l)| match l {
            Ok(l) if l.trim().is_empty() => None,
            Ok(l) => Some(Ok((i + 1, l))),
            Err(e) => Some(Err(schema_err(i + 1, format!("unreadable line: {e}")))),
        })
}

fn provenance(model: &mut Option<(String, String)>, line: usize, m: &str, s: &str) -> Result<()> {
    match model {
        None => *model = Some((m.to_owned(), s.to_owned())),
        Some((pm, ps)) if pm != m || ps != s => {
            return Err(schema_err(
                line,
                format!("model/split {m:?}/{s:?} differs from {pm:?}/{ps:?} on earlier lines"),
            ))
        }
        Some(_) => {}
    }
    Ok(())
}

pub fn read_predictions<R: Read>(source: R) -> Result<PredictionSet> {
    let mut set = PredictionSet::new("", "");
    let mut prov = None;
    for item in lines(source) {
        let (line, text) = item?;
        let rec: StatementLineIn =
            serde_json::from_str(&text).map_err(|e| schema_err(line, e.to_string()))?;
        provenance(&mut prov, line, &rec.model, &rec.split)?;
        let pred = Prediction {
            statement_id: rec.statement_id,
            label: rec.label,
            probs: rec.probs,
        };
        set.push(pred).map_err(|e| schema_err(line, e.to_string()))?;
    }
    if let Some((m, s)) = prov {
        set.model = m;
        set.split = s;
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkPrediction {
    pub manifesto_id: String,
    pub chunk_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stance: Option<StanceBin>,
}

/// Per-chunk scores or stance classes from a long-input model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChunkPredictionSet {
    pub model: String,
    pub split: String,
    pub items: Vec<ChunkPrediction>,
}

impl ChunkPredictionSet {
    pub fn new(model: impl Into<String>, split: impl Into<String>, items: Vec<ChunkPrediction>) -> Result<Self> {
        let mut seen = HashSet::new();
        for c in &items {
            check_chunk(c).map_err(Error::Data)?;
            if !seen.insert((c.manifesto_id.clone(), c.chunk_index)) {
                return Err(Error::data(format!(
                    "duplicate prediction for chunk {} of {:?}",
                    c.chunk_index, c.manifesto_id
                )));
            }
        }
        Ok(ChunkPredictionSet {
            model: model.into(),
            split: split.into(),
            items,
        })
    }

    /// Predictions grouped by manifesto, each group in chunk order.
    pub fn by_manifesto(&self) -> BTreeMap<&str, Vec<&ChunkPrediction>> {
        let mut out: BTreeMap<&str, Vec<&ChunkPrediction>> = BTreeMap::new();
        for c in &self.items {
            out.entry(c.manifesto_id.as_str()).or_default().push(c);
        }
        for v in out.values_mut() {
            v.sort_by_key(|c| c.chunk_index);
        }
        out
    }
}

fn check_chunk(c: &ChunkPrediction) -> std::result::Result<(), String> {
    if c.score.is_none() && c.stance.is_none() {
        return Err("chunk prediction needs a score or a stance".to_owned());
    }
    if let Some(s) = c.score {
        if !(s.is_finite() && (-1.0..=1.0).contains(&s)) {
            return Err(format!("score {s} outside [-1, 1]"));
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct ChunkLine {
    #[serde(flatten)]
    item: ChunkPrediction,
    model: String,
    split: String,
}

pub fn write_chunk_predictions<W: Write>(set: &ChunkPredictionSet, mut out: W) -> Result<()> {
    for item in &set.items {
        let line = ChunkLine {
            item: item.clone(),
            model: set.model.clone(),
            split: set.split.clone(),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_chunk_predictions<R: Read>(source: R) -> Result<ChunkPredictionSet> {
    let mut items = Vec::new();
    let mut prov = None;
    let mut seen = HashSet::new();
    for item in lines(source) {
        let (line, text) = item?;
        let rec: ChunkLine = serde_json::from_str(&text).map_err(|e| schema_err(line, e.to_string()))?;
        provenance(&mut prov, line, &rec.model, &rec.split)?;
        check_chunk(&rec.item).map_err(|m| schema_err(line, m))?;
        if !seen.insert((rec.item.manifesto_id.clone(), rec.item.chunk_index)) {
            return Err(schema_err(line, "duplicate chunk prediction"));
        }
        items.push(rec.item);
    }
    let (model, split) = prov.unwrap_or_default();
    ChunkPredictionSet::new(model, split, items)
}

/// Either flavour of exchange file.
#[derive(Debug, Clone, PartialEq)]
pub enum ExchangeFile {
    Statements(PredictionSet),
    Chunks(ChunkPredictionSet),
}

/// Reads an exchange file, detecting the flavour from the first record.
pub fn read_exchange<R: Read>(mut source: R) -> Result<ExchangeFile> {
    let mut buf = Vec::new();
    source.read_to_end(&mut buf)?;
    let first = buf
        .split(|&b| b == b'\n')
        .enumerate()
        .find(|(_, l)| !l.iter().all(u8::is_ascii_whitespace));
    let is_chunk = match first {
        None => false,
        Some((i, l)) => match serde_json::from_slice::<Value>(l) {
            Ok(Value::Object(m)) => m.contains_key("chunk_index"),
            _ => return Err(schema_err(i + 1, "expected a JSON object")),
        },
    };
    if is_chunk {
        read_chunk_predictions(buf.as_slice()).map(ExchangeFile::Chunks)
    } else {
        read_predictions(buf.as_slice()).map(ExchangeFile::Statements)
    }
}
