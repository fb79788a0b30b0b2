use std::fmt::Write as _;
use std::hint::black_box;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::head::{train, HeadParams, TrainConfig};
use crate::rejector::{self, RejectThreshold};
use crate::types::LabeledSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub reps: usize,
    /// Forward + reject calls per inference repetition.
    pub calls: usize,
    pub threshold: f64,
    pub retrain_episodes: Vec<usize>,
    pub retrain_batches: Vec<usize>,
    pub train: TrainConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            reps: 3,
            calls: 10_000,
            threshold: 0.9986,
            retrain_episodes: vec![100, 300, 1000],
            retrain_batches: vec![30, 100, 300],
            train: TrainConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetrainTiming {
    pub episodes: usize,
    pub batch_size: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub n_classes: usize,
    pub dim: usize,
    pub calls: usize,
    pub reps: usize,
    /// Median time of one head forward plus reject decision.
    pub per_image_ms: f64,
    /// Median rate when a whole batch of vectors is processed in one pass.
    pub throughput_per_s: f64,
    pub retrain: Vec<RetrainTiming>,
}

impl TimingReport {
    pub fn retrain_seconds(&self, episodes: usize, batch_size: usize) -> Option<f64> {
        self.retrain
            .iter()
            .find(|r| r.episodes == episodes && r.batch_size == batch_size)
            .map(|r| r.seconds)
    }

    /// True if retraining time grows with the episode count at every batch size.
    pub fn retrain_monotone_in_episodes(&self) -> bool {
        let mut batches: Vec<usize> = self.retrain.iter().map(|r| r.batch_size).collect();
        batches.dedup();
        batches.iter().all(|&b| {
            let mut row: Vec<&RetrainTiming> =
                self.retrain.iter().filter(|r| r.batch_size == b).collect();
            row.sort_by_key(|r| r.episodes);
            row.windows(2).all(|w| w[0].seconds <= w[1].seconds)
        })
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "head inference (n={}, l={}, {} calls x {} reps)",
            self.n_classes, self.dim, self.calls, self.reps
        );
        let _ = writeln!(out, "  per image:  {:.4} ms", self.per_image_ms);
        let _ = writeln!(out, "  throughput: {:.0} images/s", self.throughput_per_s);
        if self.retrain.is_empty() {
            return out;
        }
        let mut episodes: Vec<usize> = self.retrain.iter().map(|r| r.episodes).collect();
        episodes.sort_unstable();
        episodes.dedup();
        let mut batches: Vec<usize> = self.retrain.iter().map(|r| r.batch_size).collect();
        batches.sort_unstable();
        batches.dedup();
        let _ = writeln!(out, "retraining time (s)");
        let _ = write!(out, "{:>12} |", "batch \\ ep");
        for e in &episodes {
            let _ = write!(out, " {e:>10}");
        }
        out.push('\n');
        for b in &batches {
            let _ = write!(out, "{b:>12} |");
            for e in &episodes {
                match self.retrain_seconds(*e, *b) {
                    Some(s) => {
                        let _ = write!(out, " {s:>10.3}");
                    }
                    None => out.push_str("          -"),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,episodes,batch_size,value\n");
        let _ = writeln!(out, "per_image_ms,,,{}", self.per_image_ms);
        let _ = writeln!(out, "throughput_per_s,,,{}", self.throughput_per_s);
        for r in &self.retrain {
            let _ = writeln!(
                out,
                "retrain_seconds,{},{},{}",
                r.episodes, r.batch_size, r.seconds
            );
        }
        out
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

/// Runs `f` once as warmup, then `reps` timed times; returns the median seconds.
fn time_median<F: FnMut() -> Result<()>>(reps: usize, mut f: F) -> Result<f64> {
    f()?;
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        f()?;
        times.push(start.elapsed().as_secs_f64());
    }
    Ok(median(times))
}

/// Measures head inference and retraining wall time on the current thread.
///
/// `samples` provide the inference inputs and, when a retraining grid is
/// configured, the training data (they must then carry class indices).
pub fn bench(
    head: &HeadParams,
    samples: &[LabeledSample],
    cfg: &BenchConfig,
) -> Result<TimingReport> {
    if cfg.reps < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 repetitions, got {}",
            cfg.reps
        )));
    }
    if cfg.calls == 0 {
        return Err(Error::InvalidArgument("calls must be positive".into()));
    }
    if samples.is_empty() {
        return Err(Error::Empty("benchmark samples"));
    }
    let threshold = RejectThreshold::new(cfg.threshold)?;
    for s in samples {
        if s.features().dim() != head.dim() {
            return Err(Error::DimensionMismatch {
                expected: head.dim(),
                got: s.features().dim(),
            });
        }
    }

    let per_call = time_median(cfg.reps, || {
        for i in 0..cfg.calls {
            let y = head.forward(samples[i % samples.len()].features())?;
            black_box(rejector::apply(&y, threshold));
        }
        Ok(())
    })? / cfg.calls as f64;

    let batch: Vec<&LabeledSample> = (0..cfg.calls)
        .map(|i| &samples[i % samples.len()])
        .collect();
    let batch_secs = time_median(cfg.reps, || {
        let decisions = batch
            .iter()
            .map(|s| {
                head.forward(s.features())
                    .map(|y| rejector::apply(&y, threshold))
            })
            .collect::<Result<Vec<usize>>>()?;
        black_box(decisions);
        Ok(())
    })?;

    let mut retrain = Vec::new();
    for &batch_size in &cfg.retrain_batches {
        for &episodes in &cfg.retrain_episodes {
            let tc = TrainConfig {
                episodes,
                batch_size,
                ..cfg.train
            };
            let seconds = time_median(cfg.reps, || {
                black_box(train(samples, head.n_classes(), &tc)?);
                Ok(())
            })?;
            retrain.push(RetrainTiming {
                episodes,
                batch_size,
                seconds,
            });
        }
    }

    Ok(TimingReport {
        n_classes: head.n_classes(),
        dim: head.dim(),
        calls: cfg.calls,
        reps: cfg.reps,
        per_image_ms: per_call * 1e3,
        throughput_per_s: cfg.calls as f64 / batch_secs,
        retrain,
    })
}
