//! Token-budget chunks of consecutive statements for long-input models, and
//! aggregation of chunk-level predictions back to manifestos.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, BufReader, Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::ChunkPredictionSet;
use crate::corpus::{Corpus, Manifesto, Statement};
use crate::error::{Error, Result};
use crate::num::{from_usize, Scalar};
use crate::scales::{rile_class, rile_score, RileScore, RileTally, StanceBin};

/// Counts the tokens of a statement.
///
/// Implementations must be deterministic and return 0 for empty text.
pub trait TokenCounter: Sync {
    fn name(&self) -> &str;
    fn count(&self, statement: &Statement) -> Result<usize>;
}

/// Unicode-whitespace word count.
#[derive(Debug, Clone, Copy, Default)]
pub struct WhitespaceCounter;

impl TokenCounter for WhitespaceCounter {
    fn name(&self) -> &str {
        "whitespace"
    }

    fn count(&self, statement: &Statement) -> Result<usize> {
        Ok(statement.text.split_whitespace().count())
    }
}

/// Precomputed per-statement counts, e.g. from a model's subword tokenizer.
#[derive(Debug, Clone, Default)]
pub struct ExternalCounts {
    name: String,
    counts: HashMap<String, usize>,
}

#[derive(Deserialize)]
struct CountLine {
    statement_id: String,
    tokens: usize,
}

impl ExternalCounts {
    pub fn new(name: impl Into<String>, counts: HashMap<String, usize>) -> Self {
        ExternalCounts {
            name: name.into(),
            counts,
        }
    }

    /// Reads JSONL lines of `{"statement_id": ..., "tokens": n}`.
    pub fn from_jsonl<R: Read>(name: impl Into<String>, source: R) -> Result<Self> {
        let mut counts = HashMap::new();
        for (i, line) in BufReader::new(source).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: CountLine = serde_json::from_str(&line).map_err(|e| Error::Parse {
                line: i + 1,
                field: "<record>".into(),
                message: e.to_string(),
            })?;
            if counts.insert(rec.statement_id.clone(), rec.tokens).is_some() {
                return Err(Error::DuplicateId {
                    line: i + 1,
                    id: rec.statement_id,
                });
            }
        }
        Ok(ExternalCounts::new(name, counts))
    }
}

impl TokenCounter for ExternalCounts {
    fn name(&self) -> &str {
        &self.name
    }

    fn count(&self, statement: &Statement) -> Result<usize> {
        self.counts
            .get(&statement.id)
            .copied()
            .ok_or_else(|| Error::data(format!("no external token count for statement {:?}", statement.id)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkConfig {
    pub max_tokens: usize,
    pub min_tokens: usize,
}

impl Default for ChunkConfig {
    fn default() -> Self {
        ChunkConfig {
            max_tokens: 4095,
            min_tokens: 1000,
        }
    }
}

impl ChunkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_tokens == 0 || self.max_tokens <= self.min_tokens {
            return Err(Error::invalid(format!(
                "chunk bounds need max > min > 0, got max={} min={}",
                self.max_tokens, self.min_tokens
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chunk<T> {
    pub manifesto_id: String,
    /// Ordinal among the chunks kept for this manifesto.
    pub index: usize,
    pub statement_ids: Vec<String>,
    pub token_count: usize,
    pub gold_score: RileScore<T>,
    /// A single statement longer than the token budget.
    pub oversized: bool,
}

/// Greedy left-to-right packing of consecutive statements.
///
/// Statements are appended while the running count stays within
/// `max_tokens`; the statement that would overflow starts the next chunk. A
/// statement longer than `max_tokens` on its own forms an oversized chunk.
/// Chunks below `min_tokens` are dropped wherever they occur, and the kept
/// chunks are numbered densely.
pub fn build_chunks<T: Scalar>(
    m: &Manifesto,
    counter: &dyn TokenCounter,
    config: ChunkConfig,
) -> Result<Vec<Chunk<T>>> {
    config.validate()?;
    let counts = m
        .statements
        .iter()
        .map(|s| counter.count(s))
        .collect::<Result<Vec<_>>>()?;

    // (start, end, tokens, oversized) over statement positions.
    let mut spans = Vec::new();
    let mut start = 0;
    let mut running = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > config.max_tokens {
            if i > start {
                spans.push((start, i, running, false));
            }
            spans.push((i, i + 1, c, true));
            start = i + 1;
            running = 0;
        } else if running + c <= config.max_tokens {
            running += c;
        } else {
            spans.push((start, i, running, false));
            start = i;
            running = c;
        }
    }
    if start < counts.len() {
        spans.push((start, counts.len(), running, false));
    }

    let mut chunks = Vec::new();
    for (start, end, tokens, oversized) in spans {
        if tokens < config.min_tokens {
            continue;
        }
        let statements = &m.statements[start..end];
        let tally = RileTally::from_classes(statements.iter().map(|s| rile_class(&s.code)));
        chunks.push(Chunk {
            manifesto_id: m.id.clone(),
            index: chunks.len(),
            statement_ids: statements.iter().map(|s| s.id.clone()).collect(),
            token_count: tokens,
            gold_score: rile_score(&tally)?,
            oversized,
        });
    }
    Ok(chunks)
}

/// Chunks every manifesto of the corpus, in manifesto id order.
pub fn chunk_corpus<T: Scalar>(
    corpus: &Corpus,
    counter: &dyn TokenCounter,
    config: ChunkConfig,
) -> Result<Vec<Chunk<T>>> {
    let manifestos: Vec<&Manifesto> = corpus.manifestos().collect();
    let per: Vec<Vec<Chunk<T>>> = manifestos
        .par_iter()
        .map(|m| build_chunks(m, counter, config))
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Gold RILE of a chunk, recomputed from the manifesto's statements.
pub fn chunk_gold_score<T: Scalar>(chunk: &Chunk<T>, m: &Manifesto) -> Result<RileScore<T>> {
    let by_id: HashMap<&str, &Statement> = m.statements.iter().map(|s| (s.id.as_str(), s)).collect();
    let mut tally = RileTally::default();
    for id in &chunk.statement_ids {
        let s = by_id.get(id.as_str()).ok_or_else(|| {
            Error::data(format!("chunk {} refers to unknown statement {id:?} of {:?}", chunk.index, m.id))
        })?;
        tally.add(rile_class(&s.code));
    }
    rile_score(&tally)
}

/// Arithmetic mean of chunk scores.
pub fn average_chunk_scores<T: Scalar>(scores: &[RileScore<T>]) -> Result<RileScore<T>> {
    if scores.is_empty() {
        return Err(Error::NoChunks);
    }
    let sum: T = scores.iter().map(|s| s.value()).sum();
    RileScore::new(sum / from_usize(scores.len()))
}

/// How `majority_stance` resolves equally frequent bins.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieBreak {
    /// Prefer the bin nearest `Centrist`; between equidistant bins, the left one.
    #[default]
    Centreward,
    Leftward,
    Rightward,
}

/// Most frequent stance bin.
pub fn majority_stance(bins: &[StanceBin], tie: TieBreak) -> Result<StanceBin> {
    let mut counts = [0usize; 5];
    for b in bins {
        counts[b.ordinal()] += 1;
    }
    let top = *counts.iter().max().expect("five bins");
    if top == 0 {
        return Err(Error::NoChunks);
    }
    let tied = StanceBin::ALL.into_iter().filter(|b| counts[b.ordinal()] == top);
    let pick = match tie {
        TieBreak::Centreward => tied.min_by_key(|b| (b.extremity(), b.ordinal())),
        TieBreak::Leftward => tied.min_by_key(|b| b.ordinal()),
        TieBreak::Rightward => tied.max_by_key(|b| b.ordinal()),
    };
    Ok(pick.expect("at least one bin reaches the maximum"))
}

/// Manifesto-level scores from chunk predictions, by averaging.
pub fn aggregate_chunk_scores(preds: &ChunkPredictionSet) -> Result<BTreeMap<String, RileScore<f64>>> {
    let mut out = BTreeMap::new();
    for (id, chunks) in preds.by_manifesto() {
        let scores = chunks
            .iter()
            .filter_map(|c| c.score)
            .map(RileScore::new)
            .collect::<Result<Vec<_>>>()?;
        if scores.is_empty() {
            continue;
        }
        out.insert(id.to_owned(), average_chunk_scores(&scores)?);
    }
    Ok(out)
}

/// Manifesto-level stance from chunk predictions, by majority vote. Chunks
/// without a stance use the bin of their score.
pub fn aggregate_chunk_stances(
    preds: &ChunkPredictionSet,
    tie: TieBreak,
) -> Result<BTreeMap<String, StanceBin>> {
    let mut out = BTreeMap::new();
    for (id, chunks) in preds.by_manifesto() {
        let bins = chunks
            .iter()
            .map(|c| match (c.stance, c.score) {
                (Some(b), _) => Ok(b),
                (None, Some(s)) => crate::scales::stance_bin(s),
                (None, None) => Err(Error::data("chunk prediction without score or stance")),
            })
            .collect::<Result<Vec<_>>>()?;
        out.insert(id.to_owned(), majority_stance(&bins, tie)?);
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct ChunkRecord {
    manifesto_id: String,
    chunk_index: usize,
    statement_ids: Vec<String>,
    token_count: usize,
    gold_rile: f64,
    oversized: bool,
}

/// Writes the chunk training-data JSONL.
pub fn write_chunks<W: Write>(chunks: &[Chunk<f64>], mut out: W) -> Result<()> {
    for c in chunks {
        let rec = ChunkRecord {
            manifesto_id: c.manifesto_id.clone(),
            chunk_index: c.index,
            statement_ids: c.statement_ids.clone(),
            token_count: c.token_count,
            gold_rile: c.gold_score.value(),
            oversized: c.oversized,
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_chunks<R: Read>(source: R) -> Result<Vec<Chunk<f64>>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(source).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: i + 1,
            field: "<record>".into(),
            message,
        };
        let rec: ChunkRecord = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        out.push(Chunk {
            manifesto_id: rec.manifesto_id,
            index: rec.chunk_index,
            statement_ids: rec.statement_ids,
            token_count: rec.token_count,
            gold_score: RileScore::new(rec.gold_rile).map_err(|e| parse_err(e.to_string()))?,
            oversized: rec.oversized,
        });
    }
    Ok(out)
}
