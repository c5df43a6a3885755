//! Prediction with expert advice: randomized weighted majority.
//!
//! Weights live in log space. A weight is only ever multiplied by the
//! penalty `β < 1`, so on a long stream `β^m` underflows long before the
//! stream ends; `ln w` just decreases linearly. Sampling and weight fractions
//! are computed on the max-shifted exponentials, which are exact up to the
//! usual floating point rounding.

use std::fmt;

use crate::data::ClassLabel;
use crate::error::{Error, Result};
use crate::rng::RngHandle;

/// The multiplicative penalty, validated to lie strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Beta(f64);

impl Beta {
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_finite() && beta > 0.0 && beta < 1.0 {
            Ok(Beta(beta))
        } else {
            Err(Error::config(format!(
                "beta must lie in (0, 1), got {beta}"
            )))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `ln(1/β)`, always positive.
    #[inline]
    pub fn ln_inv(self) -> f64 {
        -self.0.ln()
    }
}

impl Default for Beta {
    fn default() -> Self {
        Beta(0.5)
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Per-expert multiplicative weights of one RWM learner.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    log_weights: Vec<f64>,
    beta: Beta,
    ln_beta: f64,
}

impl WeightVector {
    /// `n` experts, every weight initialised to 1.
    pub fn new(n: usize, beta: Beta) -> Self {
        assert!(n > 0, "a weight vector needs at least one expert");
        WeightVector {
            log_weights: vec![0.0; n],
            beta,
            ln_beta: beta.get().ln(),
        }
    }

    /// Builds a vector from explicit linear-scale weights, which must be
    /// finite and strictly positive.
    pub fn from_weights(weights: &[f64], beta: Beta) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::config("a weight vector needs at least one expert"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::config(format!(
                "weights must be finite and positive, got {w}"
            )));
        }
        Ok(WeightVector {
            log_weights: weights.iter().map(|w| w.ln()).collect(),
            beta,
            ln_beta: beta.get().ln(),
        })
    }

    /// Restores a vector from stored log-weights.
    pub fn from_log_weights(log_weights: Vec<f64>, beta: Beta) -> Result<Self> {
        if log_weights.is_empty() || log_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::config("log-weights must be non-empty and finite"));
        }
        Ok(WeightVector {
            log_weights,
            beta,
            ln_beta: beta.get().ln(),
        })
    }

    pub fn len(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_weights.is_empty()
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Linear-scale weights. May underflow to zero on long streams.
    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|w| w.exp()).collect()
    }

    fn max_log_weight(&self) -> f64 {
        self.log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `ln W` where `W = Σ w_i`.
    pub fn log_total_weight(&self) -> f64 {
        let max = self.max_log_weight();
        max + self
            .log_weights
            .iter()
            .map(|w| (w - max).exp())
            .sum::<f64>()
            .ln()
    }

    /// Samples expert `i` with probability `w_i / W` and returns its
    /// prediction together with `i`.
    ///
    /// Inverse-CDF sampling over the cumulative weights: expert `i` owns the
    /// half-open interval `[c_{i-1}, c_i)`.
    ///
    /// # Panics
    ///
    /// If `predictions.len()` differs from the number of experts.
    pub fn sample(&self, predictions: &[ClassLabel], rng: &mut RngHandle) -> (ClassLabel, usize) {
        assert_eq!(
            predictions.len(),
            self.log_weights.len(),
            "prediction vector length must equal the number of experts"
        );
        let max = self.max_log_weight();
        let total: f64 = self.log_weights.iter().map(|w| (w - max).exp()).sum();
        debug_assert!(total.is_finite() && total >= 1.0);
        let target = rng.uniform() * total;
        let mut cumulative = 0.0;
        let last = self.log_weights.len() - 1;
        for (i, w) in self.log_weights.iter().enumerate() {
            cumulative += (w - max).exp();
            if cumulative > target {
                return (predictions[i], i);
            }
        }
        // Only reachable when rounding puts the target on the final boundary.
        (predictions[last], last)
    }

    /// Fraction of the total weight on experts whose prediction differs
    /// from `truth`.
    pub fn expected_mistake_fraction(&self, predictions: &[ClassLabel], truth: ClassLabel) -> f64 {
        assert_eq!(
            predictions.len(),
            self.log_weights.len(),
            "prediction vector length must equal the number of experts"
        );
        let max = self.max_log_weight();
        let mut total = 0.0;
        let mut wrong = 0.0;
        for (w, p) in self.log_weights.iter().zip(predictions) {
            let v = (w - max).exp();
            total += v;
            if *p != truth {
                wrong += v;
            }
        }
        wrong / total
    }

    /// Multiplies the weight of every expert that disagrees with `truth`
    /// by `β`. Returns how many experts were penalised.
    pub fn update(&mut self, predictions: &[ClassLabel], truth: ClassLabel) -> usize {
        assert_eq!(
            predictions.len(),
            self.log_weights.len(),
            "prediction vector length must equal the number of experts"
        );
        let mut penalised = 0;
        for (w, p) in self.log_weights.iter_mut().zip(predictions) {
            if *p != truth {
                *w += self.ln_beta;
                penalised += 1;
            }
        }
        penalised
    }
}

/// One sampled prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub label: ClassLabel,
    pub expert: usize,
}

/// A single RWM learner: weights plus its own random stream.
#[derive(Debug, Clone)]
pub struct RwmLearner {
    weights: WeightVector,
    rng: RngHandle,
    instances: u64,
}

impl RwmLearner {
    pub fn new(n: usize, beta: Beta, rng: RngHandle) -> Self {
        RwmLearner {
            weights: WeightVector::new(n, beta),
            rng,
            instances: 0,
        }
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn instances(&self) -> u64 {
        self.instances
    }

    pub fn predict(&mut self, predictions: &[ClassLabel]) -> Decision {
        let (label, expert) = self.weights.sample(predictions, &mut self.rng);
        Decision { label, expert }
    }

    pub fn expected_mistake(&self, predictions: &[ClassLabel], truth: ClassLabel) -> f64 {
        self.weights.expected_mistake_fraction(predictions, truth)
    }

    pub fn update(&mut self, predictions: &[ClassLabel], truth: ClassLabel) {
        self.weights.update(predictions, truth);
        self.instances += 1;
    }
}
