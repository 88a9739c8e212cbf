//! Multinomial Naive Bayes with additive (Laplace) smoothing, in log space.

use thiserror::Error;

use crate::features::{FeatureVector, LabeledVector};
use crate::label::Label;

#[derive(Debug, Error, PartialEq)]
pub enum NbError {
    #[error("training data is empty")]
    EmptyData,
    #[error("class {0} has no training examples")]
    MissingClass(Label),
    #[error("example labeled {0} is not in the model's class order")]
    UnknownClass(Label),
    #[error("smoothing alpha must be > 0, got {0}")]
    NonPositiveAlpha(f64),
    #[error("feature index {index} outside vocabulary of size {vocab_size}")]
    IndexOutOfVocabulary { index: u32, vocab_size: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbModel {
    pub(crate) class_order: Vec<Label>,
    pub(crate) log_priors: Vec<f64>,
    /// `log_likelihoods[c][t] = ln P(t | class_order[c])`.
    pub(crate) log_likelihoods: Vec<Vec<f64>>,
    pub(crate) alpha: f64,
    pub(crate) vocab_size: usize,
}

impl NbModel {
    /// Fit over both classes in [`Label::ALL`] order.
    pub fn fit(data: &[LabeledVector], vocab_size: usize, alpha: f64) -> Result<Self, NbError> {
        Self::fit_with_classes(data, &Label::ALL, vocab_size, alpha)
    }

    /// `ln P(c) = ln(N_c / N)` and
    /// `ln P(t|c) = ln((count(t,c) + alpha) / (total(c) + alpha * V))`,
    /// where counts sum the vector values.
    pub fn fit_with_classes(
        data: &[LabeledVector],
        class_order: &[Label],
        vocab_size: usize,
        alpha: f64,
    ) -> Result<Self, NbError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(NbError::NonPositiveAlpha(alpha));
        }
        if data.is_empty() {
            return Err(NbError::EmptyData);
        }
        let k = class_order.len();
        let mut docs = vec![0usize; k];
        let mut counts = vec![vec![0.0f64; vocab_size]; k];
        for ex in data {
            let c = class_order
                .iter()
                .position(|&l| l == ex.label)
                .ok_or(NbError::UnknownClass(ex.label))?;
            docs[c] += 1;
            for &(i, v) in ex.vector.entries() {
                let slot = counts[c].get_mut(i as usize).ok_or(NbError::IndexOutOfVocabulary {
                    index: i,
                    vocab_size,
                })?;
                *slot += v;
            }
        }
        if let Some(c) = docs.iter().position(|&n| n == 0) {
            return Err(NbError::MissingClass(class_order[c]));
        }

        let n = data.len() as f64;
        let log_priors = docs.iter().map(|&d| (d as f64 / n).ln()).collect();
        let log_likelihoods = counts
            .iter()
            .map(|row| {
                let denom = (row.iter().sum::<f64>() + alpha * vocab_size as f64).ln();
                row.iter().map(|&c| (c + alpha).ln() - denom).collect()
            })
            .collect();
        Ok(Self {
            class_order: class_order.to_vec(),
            log_priors,
            log_likelihoods,
            alpha,
            vocab_size,
        })
    }

    pub fn class_order(&self) -> &[Label] {
        &self.class_order
    }

    pub fn log_priors(&self) -> &[f64] {
        &self.log_priors
    }

    pub fn log_likelihood(&self, class: usize, term: u32) -> f64 {
        self.log_likelihoods[class][term as usize]
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    /// Unnormalized per-class log scores, in class order.
    pub fn log_joint(&self, vector: &FeatureVector) -> Result<Vec<f64>, NbError> {
        if let Some(index) = vector.max_index().filter(|&i| i as usize >= self.vocab_size) {
            return Err(NbError::IndexOutOfVocabulary {
                index,
                vocab_size: self.vocab_size,
            });
        }
        Ok(self
            .log_priors
            .iter()
            .zip(&self.log_likelihoods)
            .map(|(prior, ll)| {
                prior
                    + vector
                        .entries()
                        .iter()
                        .map(|&(i, v)| v * ll[i as usize])
                        .sum::<f64>()
            })
            .collect())
    }

    /// Class probabilities via a max-shifted log-sum-exp.
    pub fn posterior(&self, vector: &FeatureVector) -> Result<Vec<f64>, NbError> {
        Ok(softmax(&self.log_joint(vector)?))
    }

    /// Highest-scoring class; exact ties go to the earlier class.
    pub fn predict(&self, vector: &FeatureVector) -> Result<Label, NbError> {
        Ok(self.class_order[argmax(&self.log_joint(vector)?)])
    }
}

pub(crate) fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / z).collect()
}

/// First index of the maximum.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}
