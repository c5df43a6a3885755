//! The shared pool of naive Bayes experts.
//!
//! Identical naive Bayes models trained on the same stream would be clones,
//! which leaves nothing for a weighting scheme to choose between. Each
//! expert is therefore diversified twice: it trains on every instance a
//! Poisson(1) number of times (online bagging style), and optionally sees
//! only a random subset of the features.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::data::{ClassLabel, FeatureKind, Instance};
use crate::error::{Error, Result};
use crate::learners::NaiveBayes;
use crate::rng::{Component, RngHandle};

#[derive(Debug, Clone, PartialEq)]
pub struct PoolConfig {
    pub size: usize,
    /// Mean of the per-instance training repetition count.
    pub poisson_mean: f64,
    /// Probability of keeping each feature in an expert's mask; `None`
    /// disables masking.
    pub subspace: Option<f64>,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig {
            size: 100,
            poisson_mean: 1.0,
            subspace: Some(0.7),
        }
    }
}

impl PoolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::config("expert pool size must be at least 1"));
        }
        if !(self.poisson_mean.is_finite() && self.poisson_mean > 0.0) {
            return Err(Error::config("Poisson mean must be positive"));
        }
        if let Some(p) = self.subspace {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::config("feature keep probability must lie in (0, 1]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Expert {
    model: NaiveBayes,
    rng: RngHandle,
}

#[derive(Debug, Clone)]
pub struct ExpertPool {
    experts: Vec<Expert>,
    poisson: Poisson<f64>,
}

/// Draws a feature mask with each feature kept independently with
/// probability `keep`, redrawing until at least one feature survives.
fn draw_mask(num_features: usize, keep: f64, rng: &mut RngHandle) -> Vec<usize> {
    loop {
        let mask: Vec<usize> = (0..num_features)
            .filter(|_| rng.inner().random::<f64>() < keep)
            .collect();
        if !mask.is_empty() {
            return mask;
        }
    }
}

impl ExpertPool {
    /// Expert `i` owns the substream `(seed, Expert(i))`; its mask is drawn
    /// first, then its Poisson repetition counts.
    pub fn new(
        kinds: &[FeatureKind],
        num_classes: usize,
        config: &PoolConfig,
        seed: u64,
    ) -> Result<Self> {
        config.validate()?;
        if kinds.is_empty() {
            return Err(Error::config("an expert pool needs at least one feature"));
        }
        let poisson =
            Poisson::new(config.poisson_mean).map_err(|e| Error::config(e.to_string()))?;
        let experts = (0..config.size)
            .map(|i| {
                let mut rng = RngHandle::substream(seed, Component::Expert(i));
                let active = match config.subspace {
                    Some(keep) => draw_mask(kinds.len(), keep, &mut rng),
                    None => (0..kinds.len()).collect(),
                };
                Expert {
                    model: NaiveBayes::with_features(kinds, num_classes, active),
                    rng,
                }
            })
            .collect();
        Ok(ExpertPool { experts, poisson })
    }

    pub fn len(&self) -> usize {
        self.experts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.experts.is_empty()
    }

    pub fn expert(&self, i: usize) -> &NaiveBayes {
        &self.experts[i].model
    }

    pub fn predict(&self, x: &Instance) -> Vec<ClassLabel> {
        let mut out = Vec::with_capacity(self.experts.len());
        self.predict_into(x, &mut out);
        out
    }

    pub fn predict_into(&self, x: &Instance, out: &mut Vec<ClassLabel>) {
        out.clear();
        out.extend(self.experts.iter().map(|e| e.model.predict(x)));
    }

    /// Each expert draws its repetition count and trains on `(x, y)` that
    /// many times.
    pub fn train(&mut self, x: &Instance, y: ClassLabel) {
        for e in &mut self.experts {
            let k = self.poisson.sample(e.rng.inner()) as u32;
            e.model.train(x, y, k);
        }
    }

    /// Trains with caller-supplied repetition counts, one per expert.
    pub fn train_with(&mut self, x: &Instance, y: ClassLabel, repetitions: &[u32]) {
        assert_eq!(repetitions.len(), self.experts.len());
        for (e, &k) in self.experts.iter_mut().zip(repetitions) {
            e.model.train(x, y, k);
        }
    }
}
