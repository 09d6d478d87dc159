//! Label-noise simulation: perturb gold 3-way labels through a confusion
//! matrix and measure what survives at the scale level.

mod spec;
mod sweep;
mod synthetic;

pub use spec::{perturb_labels, perturb_with, NoiseSpec};
pub use sweep::{noise_sweep, Aggregate, SweepReport, SweepRow, SweepSummary};
pub use synthetic::{synthetic_corpus, SyntheticConfig};
