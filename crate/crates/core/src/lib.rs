//! Left–right (RILE) scaling of category-annotated party manifestos.
//!
//! The crate covers the whole label-aggregation workflow: a canonical corpus
//! format, the MARPOR category registry and RILE mapping, token-budget
//! chunking for long-input models, cross-country and cross-time splits,
//! desk-scale baseline classifiers with a prediction-exchange format,
//! evaluation metrics, and a confusion-driven label-noise simulator.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`). The aliases
//! exported at the crate root fix the scalar to `f64`, which is what the
//! command-line tool uses.

pub mod baseline;
pub mod chunking;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod noisesim;
pub mod num;
pub mod scales;
pub mod splits;

pub use error::{Error, ErrorKind, Result};
pub use num::Scalar;

pub use corpus::{Corpus, CorpusStats, Manifesto, Statement, YearMonth};
pub use scales::{CategoryCode, MajorCode, RileClass, RileScale, RileTally, StanceBin};
pub use splits::SplitSpec;

/// RILE score in double precision.
pub type RileScore = scales::RileScore<f64>;
/// Chunk whose gold score is held in double precision.
pub type Chunk = chunking::Chunk<f64>;
/// Scale-level error diagnostics in double precision.
pub type ErrorReport = eval::ErrorReport<f64>;
/// Hashed linear softmax model with `f64` weights.
pub type LinearModel = baseline::LinearModel<f64>;
/// Sparse hashed feature vector with `f64` values.
pub type SparseVector = baseline::SparseVector<f64>;
