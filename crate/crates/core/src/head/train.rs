use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{accumulate, check_batch, AdamConfig, AdamState, Example, HeadParams};
use crate::error::{Error, Result};
use crate::types::LabeledSample;

/// Training hyperparameters.
///
/// `episodes` counts optimizer updates, each on one batch of `batch_size`
/// samples drawn uniformly with replacement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub episodes: usize,
    pub batch_size: usize,
    #[serde(flatten)]
    pub adam: AdamConfig,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            episodes: 1000,
            batch_size: 300,
            adam: AdamConfig::default(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument(
                "batch_size must be at least 1".into(),
            ));
        }
        self.adam.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub params: HeadParams,
    /// Batch loss before each update, one entry per episode.
    pub loss_history: Vec<f64>,
}

/// Trains a zero-initialized head on `samples` (all must carry class indices).
pub fn train(
    samples: &[LabeledSample],
    n_classes: usize,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    let first = samples.first().ok_or(Error::Empty("training data"))?;
    let mut params = HeadParams::zeros(n_classes, first.features().dim())?;
    let examples = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.class()
                .map(|c| (s.features(), c))
                .ok_or_else(|| Error::InvalidRecord {
                    record: i,
                    reason: "category-1 objects cannot be used for training".into(),
                })
        })
        .collect::<Result<Vec<Example<'_>>>>()?;
    check_batch(&examples, &params)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = AdamState::for_params(&params);
    let mut grad = vec![0.0; params.as_flat().len()];
    let mut batch = Vec::with_capacity(cfg.batch_size);
    let mut loss_history = Vec::with_capacity(cfg.episodes);

    for episode in 0..cfg.episodes {
        batch.clear();
        batch.extend((0..cfg.batch_size).map(|_| examples[rng.random_range(0..examples.len())]));
        let loss = accumulate(&batch, &params, &mut grad);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { episode, loss });
        }
        loss_history.push(loss);
        state.step(params.as_flat_mut(), &grad, &cfg.adam)?;
    }
    Ok(TrainOutcome {
        params,
        loss_history,
    })
}
