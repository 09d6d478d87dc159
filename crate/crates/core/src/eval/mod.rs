//! Metrics and error diagnostics.

mod classification;
mod profile;
mod rank;
mod scale_error;

pub use classification::{
    classification_metrics, classification_metrics_with_labels, confusion, observed_labels, ConfusionMatrix,
    MetricsReport,
};
pub use profile::{category_share_profile, category_share_profile_with, CountryShares};
pub use rank::{average_ranks, spearman};
pub use scale_error::{
    histogram, manifesto_score_pairs, scale_error_report, stance_labels, ErrorReport, HistogramBin, ScorePair,
    SignFlips, DEFAULT_EPSILON,
};
