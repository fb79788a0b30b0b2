//! Banknote recognition on precomputed feature embeddings.
//!
//! The pipeline starts at fixed-length feature vectors produced by a frozen
//! image backbone and consists of:
//!
//! - [`head`]: a trainable fully connected + softmax layer, trained with Adam
//!   on cross-entropy.
//! - [`rejector`]: the 0-class module that maps low-confidence probability
//!   vectors to the reject class, plus ecdf and quantile threshold calibration.
//! - [`sorter`]: the ECB category decision (1, 2, 3, 4a, 4b) and the ECB test
//!   procedure evaluator.
//! - [`data`]: the FVEC interchange format, manifests, stratified splits and a
//!   seeded synthetic generator.
//! - [`eval`]: accuracy, confusion matrices, the training-condition grid and
//!   timing benchmarks.
//!
//! Class indices are 1-based throughout (`1..=n`); a decision of `0` means the
//! sample was rejected.

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod head;
pub mod rejector;
pub mod sorter;
pub mod types;

pub use error::{Error, Result};
pub use head::{HeadGradient, HeadParams, TrainConfig};
pub use rejector::RejectThreshold;
pub use types::{
    argmax_decision, BanknoteClassLabel, Category, FeatureVector, LabeledSample, ProbabilityVector,
    Provenance, SampleLabel,
};
