//! Seeded Gaussian-cluster stand-in for field data.
//!
//! Class `c` has mean `separation * u_c` where the `u_c` are random orthonormal
//! directions, so class means are `separation * sqrt(2)` apart. Accepted
//! genuine samples have unit isotropic noise. Legacy-rejected samples model
//! degraded notes: their noise is scaled by `legacy_widening` and their mean is
//! shrunk toward the origin by `legacy_attenuation`. Category-1 objects are
//! drawn around the origin with standard deviation `cat1_dispersion`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{FeatureVector, LabeledSample, Provenance, SampleLabel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_classes: usize,
    pub dim: usize,
    /// One count per class, or a single count applied to every class.
    pub per_class_counts: Vec<usize>,
    pub cluster_separation: f64,
    /// Share of each class drawn as legacy-rejected genuine notes.
    pub legacy_reject_fraction: f64,
    pub legacy_widening: f64,
    /// 0 keeps the class mean, 1 moves legacy samples to the origin.
    pub legacy_attenuation: f64,
    pub cat1_count: usize,
    pub cat1_dispersion: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_classes: 40,
            dim: 64,
            per_class_counts: vec![300],
            cluster_separation: 6.0,
            legacy_reject_fraction: 0.0,
            legacy_widening: 3.0,
            legacy_attenuation: 0.0,
            cat1_count: 0,
            cat1_dispersion: 1.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn count_for(&self, class: usize) -> usize {
        match self.per_class_counts.as_slice() {
            [k] => *k,
            counts => counts[class],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n_classes < 2 {
            return bad(format!("need at least 2 classes, got {}", self.n_classes));
        }
        if self.dim < self.n_classes {
            return bad(format!(
                "dimension {} too small to place {} orthogonal class means",
                self.dim, self.n_classes
            ));
        }
        if self.per_class_counts.len() != 1 && self.per_class_counts.len() != self.n_classes {
            return bad(format!(
                "per_class_counts has {} entries; expected 1 or {}",
                self.per_class_counts.len(),
                self.n_classes
            ));
        }
        if self.per_class_counts.contains(&0) {
            return bad("every class needs at least one sample".into());
        }
        if !(self.cluster_separation >= 0.0 && self.cluster_separation.is_finite()) {
            return bad(format!(
                "separation {} must be finite and nonnegative",
                self.cluster_separation
            ));
        }
        if !(0.0..=1.0).contains(&self.legacy_reject_fraction) {
            return bad(format!(
                "legacy_reject_fraction {} outside [0, 1]",
                self.legacy_reject_fraction
            ));
        }
        if !(self.legacy_widening > 0.0 && self.legacy_widening.is_finite()) {
            return bad(format!(
                "legacy_widening {} must be positive",
                self.legacy_widening
            ));
        }
        if !(0.0..=1.0).contains(&self.legacy_attenuation) {
            return bad(format!(
                "legacy_attenuation {} outside [0, 1]",
                self.legacy_attenuation
            ));
        }
        if !(self.cat1_dispersion > 0.0 && self.cat1_dispersion.is_finite()) {
            return bad(format!(
                "cat1_dispersion {} must be positive",
                self.cat1_dispersion
            ));
        }
        Ok(())
    }

    /// Legacy-rejected samples generated for class `class` (0-based).
    pub fn legacy_count_for(&self, class: usize) -> usize {
        (self.legacy_reject_fraction * self.count_for(class) as f64).round() as usize
    }
}

/// Generates the synthetic dataset: classes in index order, then category-1
/// objects. Values are rounded to 32-bit precision so that a written and
/// re-read file reproduces the samples exactly.
pub fn gen_synthetic(cfg: &SynthConfig) -> Result<Vec<LabeledSample>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let means: Vec<Vec<f64>> = orthonormal_rows(cfg.n_classes, cfg.dim, &mut rng)
        .into_iter()
        .map(|u| u.into_iter().map(|v| v * cfg.cluster_separation).collect())
        .collect();

    let total: usize = (0..cfg.n_classes).map(|c| cfg.count_for(c)).sum::<usize>() + cfg.cat1_count;
    let mut out = Vec::with_capacity(total);
    for (c, mean) in means.iter().enumerate() {
        let legacy = cfg.legacy_count_for(c);
        for i in 0..cfg.count_for(c) {
            let (scale, shrink, provenance) = if i < legacy {
                (
                    cfg.legacy_widening,
                    1.0 - cfg.legacy_attenuation,
                    Provenance::LegacyRejectedGenuine,
                )
            } else {
                (1.0, 1.0, Provenance::AcceptedGenuine)
            };
            let values = mean
                .iter()
                .map(|&m| round_f32(shrink * m + scale * normal(&mut rng)))
                .collect();
            out.push(LabeledSample::new(
                FeatureVector::new(values)?,
                SampleLabel::Class(c + 1),
                provenance,
            )?);
        }
    }
    for _ in 0..cfg.cat1_count {
        let values = (0..cfg.dim)
            .map(|_| round_f32(cfg.cat1_dispersion * normal(&mut rng)))
            .collect();
        out.push(LabeledSample::new(
            FeatureVector::new(values)?,
            SampleLabel::Cat1,
            Provenance::NonEuroCat1,
        )?);
    }
    Ok(out)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn round_f32(v: f64) -> f64 {
    v as f32 as f64
}

/// Gram-Schmidt on Gaussian rows; a row that collapses is redrawn.
fn orthonormal_rows(n: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut v: Vec<f64> = (0..dim).map(|_| normal(rng)).collect();
        let raw_norm = norm(&v);
        for u in &rows {
            let proj: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (a, b) in v.iter_mut().zip(u) {
                *a -= proj * b;
            }
        }
        let residual = norm(&v);
        if residual < 1e-6 * raw_norm {
            continue;
        }
        v.iter_mut().for_each(|a| *a /= residual);
        rows.push(v);
    }
    rows
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}
