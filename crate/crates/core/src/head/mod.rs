//! The trainable classification head: one fully connected layer followed by
//! softmax, mapping an `l`-dimensional feature vector to a probability vector
//! over `n` classes.
//!
//! Parameters are stored as one flat vector `theta` of length `n * l + n`:
//! the weight matrix row-major (`n` rows of length `l`) followed by the bias.

mod adam;
mod train;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use train::{train, TrainConfig, TrainOutcome};

use crate::error::{Error, Result};
use crate::types::{FeatureVector, ProbabilityVector};

/// Lower clamp applied to the true-class probability before taking the log.
pub const LOSS_PROB_FLOOR: f64 = 1e-300;

/// A training example: features and a 1-based class index.
pub type Example<'a> = (&'a FeatureVector, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct HeadParams {
    n: usize,
    l: usize,
    theta: Vec<f64>,
}

impl HeadParams {
    /// All-zero parameters; the forward pass then yields the uniform vector.
    pub fn zeros(n_classes: usize, dim: usize) -> Result<Self> {
        check_shape(n_classes, dim)?;
        Ok(Self {
            n: n_classes,
            l: dim,
            theta: vec![0.0; n_classes * dim + n_classes],
        })
    }

    /// Builds parameters from a row-major `n x l` weight matrix and a bias of length `n`.
    pub fn from_parts(
        n_classes: usize,
        dim: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self> {
        check_shape(n_classes, dim)?;
        if weights.len() != n_classes * dim {
            return Err(Error::DimensionMismatch {
                expected: n_classes * dim,
                got: weights.len(),
            });
        }
        if bias.len() != n_classes {
            return Err(Error::DimensionMismatch {
                expected: n_classes,
                got: bias.len(),
            });
        }
        let mut theta = weights;
        theta.extend(bias);
        Self::from_flat(n_classes, dim, theta)
    }

    /// Builds parameters from the flat `[W row-major, b]` layout.
    pub fn from_flat(n_classes: usize, dim: usize, theta: Vec<f64>) -> Result<Self> {
        check_shape(n_classes, dim)?;
        if theta.len() != n_classes * dim + n_classes {
            return Err(Error::DimensionMismatch {
                expected: n_classes * dim + n_classes,
                got: theta.len(),
            });
        }
        if let Some(index) = theta.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            n: n_classes,
            l: dim,
            theta,
        })
    }

    pub fn n_classes(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.l
    }

    pub fn weights(&self) -> &[f64] {
        &self.theta[..self.n * self.l]
    }

    pub fn bias(&self) -> &[f64] {
        &self.theta[self.n * self.l..]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.theta
    }

    pub(crate) fn as_flat_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    /// Affine scores `Wx + b`.
    pub fn logits(&self, x: &FeatureVector) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut out = vec![0.0; self.n];
        self.logits_into(x.values(), &mut out);
        Ok(out)
    }

    fn logits_into(&self, x: &[f64], out: &mut [f64]) {
        let (w, b) = self.theta.split_at(self.n * self.l);
        for ((o, row), bias) in out.iter_mut().zip(w.chunks_exact(self.l)).zip(b) {
            *o = dot(row, x) + bias;
        }
    }

    /// Class probabilities for `x`.
    pub fn forward(&self, x: &FeatureVector) -> Result<ProbabilityVector> {
        forward(x, self)
    }

    fn check_dim(&self, x: &FeatureVector) -> Result<()> {
        if x.dim() != self.l {
            return Err(Error::DimensionMismatch {
                expected: self.l,
                got: x.dim(),
            });
        }
        Ok(())
    }
}

fn check_shape(n_classes: usize, dim: usize) -> Result<()> {
    if n_classes < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 classes, got {n_classes}"
        )));
    }
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "feature dimension must be positive".into(),
        ));
    }
    Ok(())
}

/// Gradient of the loss with respect to the head parameters, in the same
/// flat layout as [`HeadParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct HeadGradient {
    n: usize,
    l: usize,
    theta: Vec<f64>,
}

impl HeadGradient {
    pub fn from_flat(n_classes: usize, dim: usize, theta: Vec<f64>) -> Result<Self> {
        check_shape(n_classes, dim)?;
        if theta.len() != n_classes * dim + n_classes {
            return Err(Error::DimensionMismatch {
                expected: n_classes * dim + n_classes,
                got: theta.len(),
            });
        }
        Ok(Self {
            n: n_classes,
            l: dim,
            theta,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.theta[..self.n * self.l]
    }

    pub fn bias(&self) -> &[f64] {
        &self.theta[self.n * self.l..]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.theta
    }
}

/// Numerically stable softmax (the maximum logit is subtracted first).
pub fn softmax(logits: &[f64]) -> Result<ProbabilityVector> {
    if logits.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "softmax needs at least 2 logits, got {}",
            logits.len()
        )));
    }
    if let Some(index) = logits.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let mut out = logits.to_vec();
    softmax_in_place(&mut out);
    Ok(ProbabilityVector::from_softmax(out))
}

fn softmax_in_place(values: &mut [f64]) {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in values.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in values.iter_mut() {
        *v /= sum;
    }
}

/// `softmax(Wx + b)`.
pub fn forward(x: &FeatureVector, params: &HeadParams) -> Result<ProbabilityVector> {
    params.check_dim(x)?;
    let mut out = vec![0.0; params.n];
    params.logits_into(x.values(), &mut out);
    softmax_in_place(&mut out);
    Ok(ProbabilityVector::from_softmax(out))
}

/// Mean cross-entropy of the batch.
pub fn loss(batch: &[Example<'_>], params: &HeadParams) -> Result<f64> {
    check_batch(batch, params)?;
    let mut probs = vec![0.0; params.n];
    let mut total = 0.0;
    for &(x, class) in batch {
        params.logits_into(x.values(), &mut probs);
        softmax_in_place(&mut probs);
        total -= probs[class - 1].max(LOSS_PROB_FLOOR).ln();
    }
    Ok(total / batch.len() as f64)
}

/// Closed-form gradient of [`loss`]: for each sample, `(p - onehot(y)) x^T`
/// for the weights and `p - onehot(y)` for the bias, averaged over the batch.
pub fn gradient(batch: &[Example<'_>], params: &HeadParams) -> Result<HeadGradient> {
    loss_and_gradient(batch, params).map(|(_, g)| g)
}

/// Loss and gradient in a single pass over the batch.
pub fn loss_and_gradient(
    batch: &[Example<'_>],
    params: &HeadParams,
) -> Result<(f64, HeadGradient)> {
    check_batch(batch, params)?;
    let mut grad = vec![0.0; params.theta.len()];
    let loss = accumulate(batch, params, &mut grad);
    Ok((
        loss,
        HeadGradient {
            n: params.n,
            l: params.l,
            theta: grad,
        },
    ))
}

/// Writes the batch gradient into `grad` and returns the batch loss.
/// The batch must already be validated.
pub(crate) fn accumulate(batch: &[Example<'_>], params: &HeadParams, grad: &mut [f64]) -> f64 {
    let (n, l) = (params.n, params.l);
    grad.fill(0.0);
    let mut probs = vec![0.0; n];
    let mut total = 0.0;
    let scale = 1.0 / batch.len() as f64;
    {
        let (gw, gb) = grad.split_at_mut(n * l);
        for &(x, class) in batch {
            let xv = x.values();
            params.logits_into(xv, &mut probs);
            softmax_in_place(&mut probs);
            total -= probs[class - 1].max(LOSS_PROB_FLOOR).ln();
            probs[class - 1] -= 1.0;
            for ((row, &delta), gbias) in gw.chunks_exact_mut(l).zip(&probs).zip(gb.iter_mut()) {
                *gbias += delta;
                if delta != 0.0 {
                    for (g, &xi) in row.iter_mut().zip(xv) {
                        *g += delta * xi;
                    }
                }
            }
        }
    }
    for g in grad.iter_mut() {
        *g *= scale;
    }
    total * scale
}

pub(crate) fn check_batch(batch: &[Example<'_>], params: &HeadParams) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::Empty("batch"));
    }
    for &(x, class) in batch {
        params.check_dim(x)?;
        if !(1..=params.n).contains(&class) {
            return Err(Error::InvalidArgument(format!(
                "class index {class} outside 1..={}",
                params.n
            )));
        }
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let tail: f64 = chunks_a
        .remainder()
        .iter()
        .zip(chunks_b.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for k in 0..4 {
            acc[k] += ca[k] * cb[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
