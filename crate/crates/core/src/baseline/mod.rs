//! Desk-scale statement classifiers and the prediction-exchange format.
//!
//! Two baselines live here: a constant majority-class predictor and a
//! softmax regression over hashed unigram and bigram features trained by
//! mini-batch SGD. Any other classifier, including external neural models,
//! plugs into evaluation by writing a [`PredictionSet`] file.

mod exchange;
mod features;
mod labels;
mod linear;
mod majority;
mod model_file;

pub use exchange::{
    read_chunk_predictions, read_exchange, read_predictions, write_chunk_predictions,
    write_predictions, ChunkPrediction, ChunkPredictionSet, ExchangeFile, Prediction,
    PredictionSet,
};
pub use features::{featurize, HashDim, SparseVector};
pub use labels::{examples, Example, LabelSpace};
pub use linear::{predict, train_linear, EpochStats, LinearModel, TrainConfig, TrainLog};
pub use majority::{majority_label, MajorityClassifier};
pub use model_file::{load_model, save_model, Model};
