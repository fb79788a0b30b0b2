use std::fmt::Write as _;

use crate::error::{Error, Result};

fn check_lengths(predictions: &[usize], labels: &[usize]) -> Result<()> {
    if predictions.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: predictions.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::Empty("labels"));
    }
    Ok(())
}

/// Share of predictions equal to the label. A rejection (`0`) is never correct.
pub fn accuracy(predictions: &[usize], labels: &[usize]) -> Result<f64> {
    check_lengths(predictions, labels)?;
    let hits = predictions
        .iter()
        .zip(labels)
        .filter(|(p, l)| p == l && **p != 0)
        .count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Percentage of rejected predictions.
pub fn reject_rate(predictions: &[usize]) -> f64 {
    if predictions.is_empty() {
        return 0.0;
    }
    100.0 * predictions.iter().filter(|&&p| p == 0).count() as f64 / predictions.len() as f64
}

/// Counts indexed by (predicted `0..=n`, true `1..=n`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    n: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn n_classes(&self) -> usize {
        self.n
    }

    pub fn get(&self, predicted: usize, truth: usize) -> u64 {
        assert!(predicted <= self.n && (1..=self.n).contains(&truth));
        self.counts[predicted * self.n + truth - 1]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Correct predictions: the diagonal of the banknote rows.
    pub fn trace(&self) -> u64 {
        (1..=self.n).map(|c| self.get(c, c)).sum()
    }

    pub fn column_sum(&self, truth: usize) -> u64 {
        (0..=self.n).map(|p| self.get(p, truth)).sum()
    }

    /// Header `predicted,true_1,...,true_n`, then one row per predicted class.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("predicted");
        for t in 1..=self.n {
            let _ = write!(out, ",true_{t}");
        }
        out.push('\n');
        for p in 0..=self.n {
            let _ = write!(out, "{p}");
            for t in 1..=self.n {
                let _ = write!(out, ",{}", self.get(p, t));
            }
            out.push('\n');
        }
        out
    }
}

pub fn confusion(
    predictions: &[usize],
    labels: &[usize],
    n_classes: usize,
) -> Result<ConfusionMatrix> {
    check_lengths(predictions, labels)?;
    let mut counts = vec![0u64; (n_classes + 1) * n_classes];
    for (i, (&p, &t)) in predictions.iter().zip(labels).enumerate() {
        if p > n_classes {
            return Err(Error::InvalidArgument(format!(
                "prediction {p} at {i} outside 0..={n_classes}"
            )));
        }
        if !(1..=n_classes).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "label {t} at {i} outside 1..={n_classes}"
            )));
        }
        counts[p * n_classes + t - 1] += 1;
    }
    Ok(ConfusionMatrix {
        n: n_classes,
        counts,
    })
}
