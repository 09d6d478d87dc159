use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;

/// Number of hash buckets, always a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct HashDim {
    bits: u32,
}

impl HashDim {
    pub const MAX_BITS: u32 = 30;

    pub fn from_bits(bits: u32) -> Result<Self> {
        if bits == 0 || bits > Self::MAX_BITS {
            return Err(Error::invalid(format!(
                "hash bits must be in 1..={}, got {bits}",
                Self::MAX_BITS
            )));
        }
        Ok(HashDim { bits })
    }

    /// Accepts a bucket count; it must be a power of two.
    pub fn from_size(size: usize) -> Result<Self> {
        if !size.is_power_of_two() {
            return Err(Error::invalid(format!("hash dimension {size} is not a power of two")));
        }
        HashDim::from_bits(size.trailing_zeros())
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn size(self) -> usize {
        1usize << self.bits
    }
}

impl TryFrom<u32> for HashDim {
    type Error = Error;

    fn try_from(bits: u32) -> Result<Self> {
        HashDim::from_bits(bits)
    }
}

impl From<HashDim> for u32 {
    fn from(d: HashDim) -> u32 {
        d.bits
    }
}

/// Sparse vector with strictly increasing indices and no stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<T> {
    pub indices: Vec<u32>,
    pub values: Vec<T>,
    pub dim: usize,
}

impl<T: Scalar> SparseVector<T> {
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_zero(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.indices.iter().map(|&i| i as usize).zip(self.values.iter().copied())
    }

    /// Dot product with a dense slice of length `dim`.
    pub fn dot(&self, dense: &[T]) -> T {
        self.iter().fold(T::zero(), |acc, (i, v)| acc + dense[i] * v)
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a; stable across platforms and toolchains.
fn fnv1a(parts: &[&[u8]]) -> u64 {
    let mut h = FNV_OFFSET;
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            h ^= 0x1f;
            h = h.wrapping_mul(FNV_PRIME);
        }
        for &b in *part {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

fn tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Lowercased word unigrams and bigrams hashed into `dim` buckets with a
/// sign hash, then L2-normalized.
pub fn featurize<T: Scalar>(text: &str, dim: HashDim) -> SparseVector<T> {
    let mask = (dim.size() - 1) as u64;
    let mut acc = std::collections::BTreeMap::<u32, f64>::new();
    let mut add = |h: u64| {
        let sign = if h >> 63 == 1 { -1.0 } else { 1.0 };
        *acc.entry((h & mask) as u32).or_insert(0.0) += sign;
    };
    let words = tokens(text);
    for w in &words {
        add(fnv1a(&[b"u", w.as_bytes()]));
    }
    for pair in words.windows(2) {
        add(fnv1a(&[b"b", pair[0].as_bytes(), pair[1].as_bytes()]));
    }
    acc.retain(|_, v| *v != 0.0);
    let norm = acc.values().map(|v| v * v).sum::<f64>().sqrt();
    let (indices, values) = acc
        .into_iter()
        .map(|(i, v)| (i, T::from_f64(v / norm).unwrap_or_else(T::zero)))
        .unzip();
    SparseVector {
        indices,
        values,
        dim: dim.size(),
    }
}
