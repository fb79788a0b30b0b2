use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{accuracy, decide, Partition};
use crate::error::{Error, Result};
use crate::head::{train, TrainConfig};
use crate::types::LabeledSample;

/// Training images per class for one grid row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImageCap {
    Limit(usize),
    All,
}

impl fmt::Display for ImageCap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImageCap::Limit(k) => write!(f, "{k}"),
            ImageCap::All => f.write_str("all"),
        }
    }
}

impl FromStr for ImageCap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(ImageCap::All),
            t => match t.parse::<usize>() {
                Ok(k) if k > 0 => Ok(ImageCap::Limit(k)),
                _ => Err(Error::InvalidArgument(format!(
                    "bad image cap {s:?}; expected a positive count or \"all\""
                ))),
            },
        }
    }
}

/// Test accuracy for every (images per class, episodes) combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub caps: Vec<ImageCap>,
    pub episodes: Vec<usize>,
    /// `accuracy[row][col]` for `caps[row]` and `episodes[col]`, as a ratio.
    pub accuracy: Vec<Vec<f64>>,
}

impl GridResult {
    pub fn cell(&self, row: usize, col: usize) -> f64 {
        self.accuracy[row][col]
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:>18} |", "images/class \\ ep");
        for e in &self.episodes {
            let _ = write!(out, " {e:>9}");
        }
        out.push('\n');
        let _ = writeln!(out, "{}", "-".repeat(20 + 10 * self.episodes.len()));
        for (cap, row) in self.caps.iter().zip(&self.accuracy) {
            let _ = write!(out, "{:>18} |", cap.to_string());
            for a in row {
                let _ = write!(out, " {:>8.3}%", 100.0 * a);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("images_per_class,episodes,accuracy\n");
        for (cap, row) in self.caps.iter().zip(&self.accuracy) {
            for (e, a) in self.episodes.iter().zip(row) {
                let _ = writeln!(out, "{cap},{e},{a}");
            }
        }
        out
    }
}

/// Caps the accepted training notes per class. Each class is shuffled once
/// with `seed`, so a smaller cap always selects a subset of a larger one.
fn capped_training_set(partition: &Partition, cap: ImageCap, seed: u64) -> Vec<LabeledSample> {
    let training = partition.training_set();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for class in 1..=partition.n_classes {
        let mut members: Vec<&LabeledSample> = training
            .iter()
            .filter(|s| s.class() == Some(class))
            .collect();
        members.shuffle(&mut rng);
        let keep = match cap {
            ImageCap::Limit(k) => k.min(members.len()),
            ImageCap::All => members.len(),
        };
        out.extend(members[..keep].iter().map(|s| (*s).clone()));
    }
    out
}

/// Trains a fresh head per cell and reports accuracy on the accepted genuine
/// test notes. Cells run in parallel; results do not depend on scheduling.
pub fn run_grid(
    partition: &Partition,
    caps: &[ImageCap],
    episodes: &[usize],
    base: &TrainConfig,
) -> Result<GridResult> {
    if caps.is_empty() || episodes.is_empty() {
        return Err(Error::Empty("grid settings"));
    }
    let test = partition.accepted_test();
    if test.is_empty() {
        return Err(Error::Empty("test split"));
    }
    let labels: Vec<usize> = test.iter().filter_map(|s| s.class()).collect();
    let training: Vec<Vec<LabeledSample>> = caps
        .iter()
        .map(|&c| capped_training_set(partition, c, base.seed))
        .collect();

    let cells: Vec<(usize, usize)> = (0..caps.len())
        .flat_map(|r| (0..episodes.len()).map(move |c| (r, c)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(r, c)| {
            let cfg = TrainConfig {
                episodes: episodes[c],
                ..*base
            };
            let head = train(&training[r], partition.n_classes, &cfg)?.params;
            accuracy(&decide(&head, &test, None)?, &labels)
        })
        .collect::<Result<Vec<f64>>>()?;

    let accuracy = results
        .chunks(episodes.len())
        .map(|row| row.to_vec())
        .collect();
    Ok(GridResult {
        caps: caps.to_vec(),
        episodes: episodes.to_vec(),
        accuracy,
    })
}
