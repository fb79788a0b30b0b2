use crate::data::{stratified_split, Dataset};
use crate::error::Result;
use crate::head::HeadParams;
use crate::rejector::{self, RejectThreshold};
use crate::types::{LabeledSample, Provenance};

/// Validation and test share per class.
pub const HELD_OUT_RATIO: f64 = 0.10;

/// A dataset split 80/10/10 per class.
///
/// Heads are trained on accepted genuine notes of the training part only; the
/// legacy-rejected and category-1 populations are held out for calibration and
/// the reject experiments.
#[derive(Debug, Clone)]
pub struct Partition {
    pub n_classes: usize,
    pub train: Vec<LabeledSample>,
    pub val: Vec<LabeledSample>,
    pub test: Vec<LabeledSample>,
}

impl Partition {
    pub fn new(dataset: &Dataset, seed: u64) -> Result<Self> {
        let split = stratified_split(&dataset.samples, HELD_OUT_RATIO, HELD_OUT_RATIO, seed)?;
        Ok(Self {
            n_classes: dataset.n_classes,
            train: dataset.select(&split.train),
            val: dataset.select(&split.val),
            test: dataset.select(&split.test),
        })
    }

    pub fn training_set(&self) -> Vec<LabeledSample> {
        only(&self.train, |p| p == Provenance::AcceptedGenuine)
    }

    /// Accepted genuine validation notes.
    pub fn validation_set(&self) -> Vec<LabeledSample> {
        only(&self.val, |p| p == Provenance::AcceptedGenuine)
    }

    /// Accepted genuine test notes: the population of the accuracy grid.
    pub fn accepted_test(&self) -> Vec<LabeledSample> {
        only(&self.test, |p| p == Provenance::AcceptedGenuine)
    }

    /// Accepted plus legacy-rejected genuine test notes.
    pub fn genuine_test(&self) -> Vec<LabeledSample> {
        only(&self.test, Provenance::is_genuine)
    }

    pub fn cat1_test(&self) -> Vec<LabeledSample> {
        only(&self.test, |p| p == Provenance::NonEuroCat1)
    }

    /// Legacy-rejected genuine notes outside the test part.
    pub fn legacy_calibration_pool(&self) -> Vec<LabeledSample> {
        self.train
            .iter()
            .chain(&self.val)
            .filter(|s| s.provenance() == Provenance::LegacyRejectedGenuine)
            .cloned()
            .collect()
    }
}

fn only(samples: &[LabeledSample], keep: impl Fn(Provenance) -> bool) -> Vec<LabeledSample> {
    samples
        .iter()
        .filter(|s| keep(s.provenance()))
        .cloned()
        .collect()
}

/// Decisions for every sample: plain argmax, or the 0-class rule when a
/// threshold is given.
pub fn decide(
    head: &HeadParams,
    samples: &[LabeledSample],
    threshold: Option<RejectThreshold>,
) -> Result<Vec<usize>> {
    samples
        .iter()
        .map(|s| {
            let y = head.forward(s.features())?;
            Ok(match threshold {
                Some(t) => rejector::apply(&y, t),
                None => y.argmax(),
            })
        })
        .collect()
}
