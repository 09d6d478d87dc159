//! Versioned binary model container.
//!
//! ```text
//! magic   8 bytes  "SBMODEL\0"
//! version u32 LE
//! hlen    u32 LE   length of the JSON header
//! header  hlen bytes of UTF-8 JSON {kind, space, labels, config | label}
//! linear models only:
//!   bias    labels.len() x f64 LE
//!   nnz     u64 LE
//!   entries nnz x (label u32 LE, bucket u32 LE, weight f64 LE)
//! ```

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};

use super::labels::LabelSpace;
use super::linear::{LinearModel, TrainConfig};
use super::majority::MajorityClassifier;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"SBMODEL\0";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Linear(LinearModel<f64>),
    Majority(MajorityClassifier),
}

impl Model {
    pub fn space(&self) -> LabelSpace {
        match self {
            Model::Linear(m) => m.space(),
            Model::Majority(m) => m.space,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Linear(_) => "linear",
            Model::Majority(_) => "majority",
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Header {
    Linear {
        space: LabelSpace,
        labels: Vec<String>,
        config: TrainConfig,
    },
    Majority {
        space: LabelSpace,
        label: String,
    },
}

pub fn save_model<W: Write>(model: &Model, mut out: W) -> Result<()> {
    let header = match model {
        Model::Linear(m) => Header::Linear {
            space: m.space,
            labels: m.labels.clone(),
            config: m.config.clone(),
        },
        Model::Majority(m) => Header::Majority {
            space: m.space,
            label: m.label.clone(),
        },
    };
    let header = serde_json::to_vec(&header)?;
    out.write_all(MAGIC)?;
    out.write_u32::<LittleEndian>(VERSION)?;
    out.write_u32::<LittleEndian>(u32::try_from(header.len()).map_err(|_| Error::data("model header too large"))?)?;
    out.write_all(&header)?;
    if let Model::Linear(m) = model {
        for &b in &m.bias {
            out.write_f64::<LittleEndian>(b)?;
        }
        let dim = m.hash_dim.size();
        let nnz = m.weights.iter().filter(|w| **w != 0.0).count();
        out.write_u64::<LittleEndian>(nnz as u64)?;
        for (i, &w) in m.weights.iter().enumerate().filter(|(_, w)| **w != 0.0) {
            out.write_u32::<LittleEndian>((i / dim) as u32)?;
            out.write_u32::<LittleEndian>((i % dim) as u32)?;
            out.write_f64::<LittleEndian>(w)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::data(format!("model file: {}", msg.into()))
}

pub fn load_model<R: Read>(mut source: R) -> Result<Model> {
    let mut magic = [0u8; 8];
    source.read_exact(&mut magic).map_err(|_| corrupt("truncated before magic"))?;
    if &magic != MAGIC {
        return Err(corrupt("bad magic; not a model file"));
    }
    let version = source.read_u32::<LittleEndian>()?;
    if version != VERSION {
        return Err(corrupt(format!("unsupported version {version}")));
    }
    let hlen = source.read_u32::<LittleEndian>()? as usize;
    let mut header = vec![0u8; hlen];
    source.read_exact(&mut header).map_err(|_| corrupt("truncated header"))?;
    let header: Header = serde_json::from_slice(&header).map_err(|e| corrupt(e.to_string()))?;
    match header {
        Header::Majority { space, label } => {
            space.check(&label)?;
            Ok(Model::Majority(MajorityClassifier { label, space }))
        }
        Header::Linear { space, labels, config } => {
            let mut m = LinearModel::<f64>::zeros(labels, space, config)?;
            for b in m.bias.iter_mut() {
                *b = source.read_f64::<LittleEndian>().map_err(|_| corrupt("truncated bias"))?;
            }
            let dim = m.hash_dim.size();
            let nnz = source.read_u64::<LittleEndian>()?;
            for _ in 0..nnz {
                let k = source.read_u32::<LittleEndian>().map_err(|_| corrupt("truncated weights"))? as usize;
                let j = source.read_u32::<LittleEndian>()? as usize;
                let w = source.read_f64::<LittleEndian>()?;
                if k >= m.labels.len() || j >= dim {
                    return Err(corrupt(format!("weight index ({k}, {j}) out of bounds")));
                }
                m.weights[k * dim + j] = w;
            }
            if !m.is_finite() {
                return Err(corrupt("non-finite weights"));
            }
            Ok(Model::Linear(m))
        }
    }
}
