use rand_distr::{Distribution, Poisson};

use crate::data::{ClassLabel, FeatureKind, Instance};
use crate::error::{Error, Result};
use crate::learners::NaiveBayes;
use crate::rng::{Component, RngHandle};

const EPSILON_CLAMP: f64 = 1e-10;

/// Online boosting with sequential λ reweighting.
///
/// Each instance enters the first stage with λ = 1. A stage trains
/// Poisson(λ) times, then λ is scaled by `1 / (2 (1 − ε_m))` if the stage now
/// classifies the instance correctly and by `1 / (2 ε_m)` otherwise, where
/// `ε_m` is the stage's running λ-weighted error.
#[derive(Debug, Clone)]
pub struct OnlineBoosting {
    stages: Vec<NaiveBayes>,
    lambda_correct: Vec<f64>,
    lambda_wrong: Vec<f64>,
    num_classes: usize,
    rng: RngHandle,
}

impl OnlineBoosting {
    pub fn new(kinds: &[FeatureKind], num_classes: usize, size: usize, seed: u64) -> Result<Self> {
        if size == 0 {
            return Err(Error::config("boosting needs at least one stage"));
        }
        Ok(OnlineBoosting {
            stages: (0..size)
                .map(|_| NaiveBayes::new(kinds, num_classes))
                .collect(),
            lambda_correct: vec![0.0; size],
            lambda_wrong: vec![0.0; size],
            num_classes,
            rng: RngHandle::substream(seed, Component::Boosting),
        })
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Running weighted error of stage `m`, clamped away from 0 and 1.
    pub fn stage_error(&self, m: usize) -> f64 {
        let total = self.lambda_correct[m] + self.lambda_wrong[m];
        let eps = if total > 0.0 {
            self.lambda_wrong[m] / total
        } else {
            0.5
        };
        eps.clamp(EPSILON_CLAMP, 1.0 - EPSILON_CLAMP)
    }

    /// Weighted vote with stage weight `ln((1 − ε) / ε)`. Stages no better
    /// than chance carry no positive weight and are skipped.
    pub fn predict(&self, x: &Instance) -> ClassLabel {
        let mut votes = vec![0.0f64; self.num_classes];
        for (m, stage) in self.stages.iter().enumerate() {
            if !stage.is_trained() {
                continue;
            }
            let eps = self.stage_error(m);
            let weight = ((1.0 - eps) / eps).ln();
            if weight > 0.0 {
                votes[stage.predict(x).index()] += weight;
            }
        }
        let mut best = 0;
        for (c, v) in votes.iter().enumerate() {
            if *v > votes[best] {
                best = c;
            }
        }
        ClassLabel::from(best)
    }

    pub fn train(&mut self, x: &Instance, y: ClassLabel) {
        self.train_traced(x, y, |_| {});
    }

    /// Like [`train`](Self::train), reporting the λ each stage received.
    pub fn train_traced(&mut self, x: &Instance, y: ClassLabel, mut on_stage: impl FnMut(f64)) {
        let mut lambda = 1.0;
        for m in 0..self.stages.len() {
            on_stage(lambda);
            let k = Poisson::new(lambda)
                .map(|p| p.sample(self.rng.inner()) as u32)
                .unwrap_or(0);
            self.stages[m].train(x, y, k);
            if self.stages[m].predict(x) == y {
                self.lambda_correct[m] += lambda;
                let eps = self.lambda_wrong[m] / (self.lambda_correct[m] + self.lambda_wrong[m]);
                lambda /= 2.0 * (1.0 - eps);
            } else {
                self.lambda_wrong[m] += lambda;
                let eps = self.lambda_wrong[m] / (self.lambda_correct[m] + self.lambda_wrong[m]);
                lambda /= 2.0 * eps;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Value;

    fn separable(t: usize) -> (Instance, ClassLabel) {
        let v = ((t * 7919) % 1000) as f64 / 100.0 - 5.0;
        (
            Instance::new(vec![Value::Numeric(v)]),
            ClassLabel((v >= 0.0) as u32),
        )
    }

    #[test]
    fn learns_a_separable_stream() {
        let mut boost = OnlineBoosting::new(&[FeatureKind::Numeric], 2, 10, 4).unwrap();
        let mut correct = 0;
        for t in 0..2000 {
            let (x, y) = separable(t);
            if t >= 1000 && boost.predict(&x) == y {
                correct += 1;
            }
            boost.train(&x, y);
        }
        let accuracy = correct as f64 / 1000.0;
        assert!(accuracy >= 0.95, "{accuracy}");
    }

    #[test]
    fn lambda_shrinks_when_every_stage_is_right() {
        // A single nominal feature that equals the class: every stage is
        // correct as soon as it has seen the value once.
        let kinds = [FeatureKind::Nominal { domain: 2 }];
        let mut boost = OnlineBoosting::new(&kinds, 2, 6, 8).unwrap();
        let x = Instance::new(vec![Value::Nominal(0)]);
        for _ in 0..50 {
            boost.train(&x, ClassLabel(0));
        }
        for _ in 0..20 {
            let mut trace = Vec::new();
            boost.train_traced(&x, ClassLabel(0), |l| trace.push(l));
            assert!(trace.windows(2).all(|w| w[1] < w[0]), "{trace:?}");
        }
    }

    #[test]
    fn untrained_votes_class_zero() {
        let boost = OnlineBoosting::new(&[FeatureKind::Numeric], 3, 3, 0).unwrap();
        assert_eq!(
            boost.predict(&Instance::new(vec![Value::Numeric(1.0)])),
            ClassLabel(0)
        );
    }
}
