//! The 0-class module: rejects a probability vector whose largest entry does
//! not exceed a threshold `T`, plus ecdf and quantile-based calibration of `T`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::head::HeadParams;
use crate::types::{LabeledSample, ProbabilityVector};

/// Decision value meaning "rejected to the 0-class".
pub const REJECT: usize = 0;

/// Header of the CSV rendering of a threshold sweep.
pub const SWEEP_CSV_HEADER: &str = "threshold,reject_rate_pct,cat1_accepted,genuine_wrong_class";

/// Global reject threshold `T` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RejectThreshold(f64);

impl RejectThreshold {
    pub fn new(t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "threshold {t} outside [0, 1]"
            )));
        }
        Ok(Self(t))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for RejectThreshold {
    type Error = Error;

    fn try_from(t: f64) -> Result<Self> {
        Self::new(t)
    }
}

impl From<RejectThreshold> for f64 {
    fn from(t: RejectThreshold) -> f64 {
        t.0
    }
}

/// Returns `0` when `max(y) <= T`, otherwise the argmax class of `y`.
pub fn apply(y: &ProbabilityVector, threshold: RejectThreshold) -> usize {
    if y.max() <= threshold.value() {
        REJECT
    } else {
        y.argmax()
    }
}

/// Largest class probability.
pub fn max_prob(y: &ProbabilityVector) -> f64 {
    y.max()
}

/// Empirical cumulative distribution function of a finite sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    /// `#{v <= x} / N`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }

    /// One `value,ecdf` row per sample point, in ascending order.
    pub fn to_csv(&self) -> String {
        let n = self.sorted.len();
        let mut out = String::from("value,ecdf\n");
        for (k, v) in self.sorted.iter().enumerate() {
            // Duplicate points report the height after the last copy.
            if self.sorted.get(k + 1) == Some(v) {
                continue;
            }
            let _ = writeln!(out, "{v},{}", (k + 1) as f64 / n as f64);
        }
        out
    }
}

pub fn build_ecdf(values: &[f64]) -> Result<Ecdf> {
    if values.is_empty() {
        return Err(Error::Empty("ecdf sample"));
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Ecdf { sorted })
}

/// Lower empirical `q`-quantile: the `ceil(q N)`-th smallest value.
///
/// At least `ceil(q N)` calibration values are `<= T`, so at least that share
/// of the calibration population is rejected.
pub fn calibrate_threshold(max_probs: &[f64], q: f64) -> Result<RejectThreshold> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "quantile {q} outside (0, 1)"
        )));
    }
    let ecdf = build_ecdf(max_probs)?;
    let n = ecdf.len();
    // The small offset keeps products such as 0.95 * 20 from rounding up a rank.
    let k = ((q * n as f64 - 1e-9).ceil() as usize).clamp(1, n);
    RejectThreshold::new(ecdf.sorted[k - 1])
}

/// One row of a threshold sweep, mirroring the sorting-results table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub threshold: f64,
    /// Percentage of genuine test notes sent to the 0-class.
    pub reject_rate_pct: f64,
    /// Category-1 objects accepted into some banknote class.
    pub cat1_accepted: usize,
    /// Genuine notes accepted into a class other than their own.
    pub genuine_wrong_class: usize,
}

/// Evaluates each threshold on the genuine and category-1 test populations.
pub fn threshold_sweep(
    head: &HeadParams,
    thresholds: &[RejectThreshold],
    genuine: &[LabeledSample],
    cat1: &[LabeledSample],
) -> Result<Vec<SweepRow>> {
    if genuine.is_empty() {
        return Err(Error::Empty("genuine test set"));
    }
    if cat1.is_empty() {
        return Err(Error::Empty("category-1 test set"));
    }
    let genuine_probs = genuine
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let class = s.class().ok_or_else(|| Error::InvalidRecord {
                record: i,
                reason: "genuine test sample without a class index".into(),
            })?;
            Ok((head.forward(s.features())?, class))
        })
        .collect::<Result<Vec<_>>>()?;
    let cat1_probs = cat1
        .iter()
        .map(|s| head.forward(s.features()))
        .collect::<Result<Vec<_>>>()?;

    Ok(thresholds
        .iter()
        .map(|&t| {
            let mut rejected = 0usize;
            let mut wrong = 0usize;
            for (y, class) in &genuine_probs {
                match apply(y, t) {
                    REJECT => rejected += 1,
                    c if c != *class => wrong += 1,
                    _ => {}
                }
            }
            let cat1_accepted = cat1_probs.iter().filter(|y| apply(y, t) != REJECT).count();
            SweepRow {
                threshold: t.value(),
                reject_rate_pct: 100.0 * rejected as f64 / genuine_probs.len() as f64,
                cat1_accepted,
                genuine_wrong_class: wrong,
            }
        })
        .collect())
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.4},{},{}",
            r.threshold, r.reject_rate_pct, r.cat1_accepted, r.genuine_wrong_class
        );
    }
    out
}

pub fn sweep_to_table(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<4} {:>10} {:>16} {:>14} {:>20}",
        "Nr.", "T", "reject rate (%)", "cat1 accepted", "genuine wrong class"
    );
    for (i, r) in rows.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:<4} {:>10.6} {:>16.2} {:>14} {:>20}",
            format!("C{}", i + 1),
            r.threshold,
            r.reject_rate_pct,
            r.cat1_accepted,
            r.genuine_wrong_class
        );
    }
    out
}
