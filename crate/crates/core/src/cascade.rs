//! Cascading randomized weighted majority.
//!
//! A cascade over `L` classes keeps `L + 1` weight vectors over one shared
//! pool of `n` experts. Learner `j < L` guards class `class_order[j]`; the
//! last learner is a plain `L`-class RWM. On every instance all learners
//! draw a label. The first guard whose draw equals its class answers;
//! if no guard accepts, the final learner's draw is the answer. When the
//! label arrives only the answering learner is updated.

use crate::data::ClassLabel;
use crate::error::{Error, Result};
use crate::expert::{Beta, WeightVector};
use crate::rng::{Component, RngHandle};

/// Result of routing one instance through the cascade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingOutcome {
    pub label: ClassLabel,
    /// Index in `[0, L]` of the learner that produced `label`.
    pub responder: usize,
    /// The draw of every learner, in cascade order.
    pub per_learner_labels: Vec<ClassLabel>,
}

#[derive(Debug, Clone)]
pub struct CrwmModel {
    num_classes: usize,
    class_order: Vec<ClassLabel>,
    learners: Vec<WeightVector>,
    rngs: Vec<RngHandle>,
    instances: u64,
}

/// Serializable snapshot of a cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub num_classes: usize,
    pub class_order: Vec<ClassLabel>,
    pub beta: f64,
    pub instances: u64,
    pub log_weights: Vec<Vec<f64>>,
}

/// Checks that `order` is a permutation of `[0, num_classes)`.
pub fn validate_class_order(order: &[ClassLabel], num_classes: usize) -> Result<()> {
    if num_classes < 2 {
        return Err(Error::config("a cascade needs at least two classes"));
    }
    if order.len() != num_classes {
        return Err(Error::config(format!(
            "class order has {} entries, expected {num_classes}",
            order.len()
        )));
    }
    let mut seen = vec![false; num_classes];
    for c in order {
        match seen.get_mut(c.index()) {
            Some(s) if !*s => *s = true,
            Some(_) => {
                return Err(Error::config(format!(
                    "class {c} appears twice in the class order"
                )))
            }
            None => {
                return Err(Error::config(format!(
                    "class {c} out of range in the class order"
                )))
            }
        }
    }
    Ok(())
}

impl CrwmModel {
    /// Cascade with ascending class order. Learner `j` samples from the
    /// substream `(seed, j)`.
    pub fn new(num_classes: usize, n: usize, beta: Beta, seed: u64) -> Result<Self> {
        let order = (0..num_classes).map(ClassLabel::from).collect();
        Self::with_order(order, n, beta, seed)
    }

    pub fn with_order(
        class_order: Vec<ClassLabel>,
        n: usize,
        beta: Beta,
        seed: u64,
    ) -> Result<Self> {
        let num_classes = class_order.len();
        validate_class_order(&class_order, num_classes)?;
        if n == 0 {
            return Err(Error::config("the expert pool must not be empty"));
        }
        let learners = (0..=num_classes)
            .map(|_| WeightVector::new(n, beta))
            .collect();
        let rngs = (0..=num_classes)
            .map(|j| RngHandle::substream(seed, Component::Learner(j)))
            .collect();
        Ok(CrwmModel {
            num_classes,
            class_order,
            learners,
            rngs,
            instances: 0,
        })
    }

    /// Rebuilds a cascade from explicit weight vectors. Used for state
    /// restoration and in tests.
    pub fn from_parts(
        class_order: Vec<ClassLabel>,
        learners: Vec<WeightVector>,
        seed: u64,
    ) -> Result<Self> {
        let num_classes = class_order.len();
        validate_class_order(&class_order, num_classes)?;
        if learners.len() != num_classes + 1 {
            return Err(Error::config(format!(
                "a {num_classes}-class cascade needs {} learners, got {}",
                num_classes + 1,
                learners.len()
            )));
        }
        let n = learners[0].len();
        if learners.iter().any(|w| w.len() != n) {
            return Err(Error::config("all learners must cover the same experts"));
        }
        let rngs = (0..=num_classes)
            .map(|j| RngHandle::substream(seed, Component::Learner(j)))
            .collect();
        Ok(CrwmModel {
            num_classes,
            class_order,
            learners,
            rngs,
            instances: 0,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn num_learners(&self) -> usize {
        self.learners.len()
    }

    pub fn num_experts(&self) -> usize {
        self.learners[0].len()
    }

    pub fn class_order(&self) -> &[ClassLabel] {
        &self.class_order
    }

    pub fn learner(&self, j: usize) -> &WeightVector {
        &self.learners[j]
    }

    pub fn learners(&self) -> &[WeightVector] {
        &self.learners
    }

    pub fn instances(&self) -> u64 {
        self.instances
    }

    /// Every learner draws; routing then picks the first accepting guard,
    /// falling back to the final learner.
    pub fn predict(&mut self, predictions: &[ClassLabel]) -> RoutingOutcome {
        let per_learner_labels: Vec<ClassLabel> = self
            .learners
            .iter()
            .zip(self.rngs.iter_mut())
            .map(|(w, rng)| w.sample(predictions, rng).0)
            .collect();
        let responder = self
            .class_order
            .iter()
            .zip(&per_learner_labels)
            .position(|(guarded, drawn)| guarded == drawn)
            .unwrap_or(self.num_classes);
        RoutingOutcome {
            label: per_learner_labels[responder],
            responder,
            per_learner_labels,
        }
    }

    /// Weight fraction on wrong experts in the responding learner.
    pub fn expected_mistake(
        &self,
        outcome: &RoutingOutcome,
        predictions: &[ClassLabel],
        truth: ClassLabel,
    ) -> f64 {
        self.learners[outcome.responder].expected_mistake_fraction(predictions, truth)
    }

    /// Penalises the responding learner only; all other weight vectors are
    /// left untouched.
    ///
    /// # Panics
    ///
    /// If `outcome.responder` is not a learner index.
    pub fn update(
        &mut self,
        outcome: &RoutingOutcome,
        predictions: &[ClassLabel],
        truth: ClassLabel,
    ) {
        assert!(
            outcome.responder < self.learners.len(),
            "responder {} out of range for {} learners",
            outcome.responder,
            self.learners.len()
        );
        self.learners[outcome.responder].update(predictions, truth);
        self.instances += 1;
    }

    pub fn state(&self) -> ModelState {
        ModelState {
            num_classes: self.num_classes,
            class_order: self.class_order.clone(),
            beta: self.learners[0].beta().get(),
            instances: self.instances,
            log_weights: self
                .learners
                .iter()
                .map(|w| w.log_weights().to_vec())
                .collect(),
        }
    }
}
