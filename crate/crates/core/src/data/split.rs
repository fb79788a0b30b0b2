use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::{LabeledSample, SampleLabel};

/// Indices into the original sample list, each ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Number of samples a stratum of `count` contributes to a held-out part:
/// `floor(ratio * count)`, at least one.
pub fn split_size(count: usize, ratio: f64) -> usize {
    ((ratio * count as f64 + 1e-9).floor() as usize).max(1)
}

/// Per-class split into train/validation/test. Category-1 objects form their
/// own stratum.
pub fn stratified_split(
    samples: &[LabeledSample],
    val_ratio: f64,
    test_ratio: f64,
    seed: u64,
) -> Result<SplitIndices> {
    for (name, r) in [("val_ratio", val_ratio), ("test_ratio", test_ratio)] {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "{name} = {r} outside (0, 1)"
            )));
        }
    }
    if val_ratio + test_ratio >= 1.0 {
        return Err(Error::InvalidArgument(
            "val_ratio + test_ratio must be below 1".into(),
        ));
    }

    let mut strata: BTreeMap<SampleLabel, Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        strata.entry(s.label()).or_default().push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SplitIndices {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    for (label, mut members) in strata {
        let count = members.len();
        if count < 3 {
            let class = match label {
                SampleLabel::Class(c) => c.to_string(),
                SampleLabel::Cat1 => "category-1".into(),
            };
            return Err(Error::StratumTooSmall { class, count });
        }
        members.shuffle(&mut rng);
        let n_val = split_size(count, val_ratio);
        let n_test = split_size(count, test_ratio);
        out.val.extend_from_slice(&members[..n_val]);
        out.test.extend_from_slice(&members[n_val..n_val + n_test]);
        out.train.extend_from_slice(&members[n_val + n_test..]);
    }
    out.train.sort_unstable();
    out.val.sort_unstable();
    out.test.sort_unstable();
    Ok(out)
}
