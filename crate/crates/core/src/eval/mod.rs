//! Experiment harness: metrics, the training-condition grid and timing.

mod bench;
mod experiment;
mod grid;
mod metrics;

pub use bench::{bench, BenchConfig, RetrainTiming, TimingReport};
pub use experiment::{decide, Partition, HELD_OUT_RATIO};
pub use grid::{run_grid, GridResult, ImageCap};
pub use metrics::{accuracy, confusion, reject_rate, ConfusionMatrix};
