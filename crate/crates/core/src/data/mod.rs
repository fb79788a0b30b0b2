//! Datasets: the FVEC interchange format, model files, manifests, stratified
//! splitting and the synthetic generator.

mod fvec;
mod manifest;
mod model;
mod split;
mod synth;

pub use fvec::{read_fvec, read_fvec_from, write_fvec, write_fvec_to, FVEC_MAGIC, FVEC_VERSION};
pub use manifest::{class_names, manifest_path, Manifest, MANIFEST_FORMAT_VERSION};
pub use model::{
    read_model, read_model_from, write_model, write_model_to, HEAD_MAGIC, HEAD_VERSION,
};
pub use split::{split_size, stratified_split, SplitIndices};
pub use synth::{gen_synthetic, SynthConfig};

use crate::types::{LabeledSample, Provenance};

/// Samples sharing one feature dimension, labelled over `n_classes` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub n_classes: usize,
    pub dim: usize,
    pub samples: Vec<LabeledSample>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Copies of the samples at `indices`.
    pub fn select(&self, indices: &[usize]) -> Vec<LabeledSample> {
        indices.iter().map(|&i| self.samples[i].clone()).collect()
    }

    pub fn with_provenance(&self, provenance: Provenance) -> Vec<LabeledSample> {
        self.samples
            .iter()
            .filter(|s| s.provenance() == provenance)
            .cloned()
            .collect()
    }
}
