//! Incremental naive Bayes over mixed numeric / nominal features.

use std::f64::consts::PI;

use crate::data::{ClassLabel, FeatureKind, Instance, Value};

/// Weighted single-pass mean / variance accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    pub count: f64,
    pub mean: f64,
    pub m2: f64,
}

impl Welford {
    /// Adds `x` with integer multiplicity `weight`; equivalent to `weight`
    /// single additions.
    #[inline]
    pub fn add(&mut self, x: f64, weight: f64) {
        let count = self.count + weight;
        let delta = x - self.mean;
        self.mean += delta * weight / count;
        self.m2 += weight * delta * (x - self.mean);
        self.count = count;
    }

    /// Unbiased sample variance; zero with fewer than two observations.
    pub fn variance(&self) -> f64 {
        if self.count > 1.0 {
            (self.m2 / (self.count - 1.0)).max(0.0)
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum FeatureStats {
    Numeric {
        per_class: Vec<Welford>,
        global: Welford,
    },
    Nominal {
        domain: usize,
        /// `counts[c * domain + v]`
        counts: Vec<f64>,
        /// Non-missing observations per class.
        totals: Vec<f64>,
    },
}

const RELATIVE_VARIANCE_FLOOR: f64 = 1e-6;
const ABSOLUTE_VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayes {
    num_classes: usize,
    class_counts: Vec<f64>,
    total: f64,
    features: Vec<FeatureStats>,
    active: Vec<usize>,
}

impl NaiveBayes {
    /// A model that uses every feature.
    pub fn new(kinds: &[FeatureKind], num_classes: usize) -> Self {
        Self::with_features(kinds, num_classes, (0..kinds.len()).collect())
    }

    /// A model restricted to the feature indices in `active`.
    pub fn with_features(kinds: &[FeatureKind], num_classes: usize, active: Vec<usize>) -> Self {
        assert!(num_classes >= 1);
        assert!(
            active.iter().all(|&f| f < kinds.len()),
            "active feature out of range"
        );
        let features = kinds
            .iter()
            .map(|kind| match *kind {
                FeatureKind::Numeric => FeatureStats::Numeric {
                    per_class: vec![Welford::default(); num_classes],
                    global: Welford::default(),
                },
                FeatureKind::Nominal { domain } => FeatureStats::Nominal {
                    domain,
                    counts: vec![0.0; num_classes * domain],
                    totals: vec![0.0; num_classes],
                },
            })
            .collect();
        NaiveBayes {
            num_classes,
            class_counts: vec![0.0; num_classes],
            total: 0.0,
            features,
            active,
        }
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn active_features(&self) -> &[usize] {
        &self.active
    }

    pub fn class_count(&self, class: ClassLabel) -> f64 {
        self.class_counts[class.index()]
    }

    pub fn is_trained(&self) -> bool {
        self.total > 0.0
    }

    /// `(count, mean, unbiased variance)` of a numeric feature within a class.
    pub fn numeric_stats(&self, class: ClassLabel, feature: usize) -> Option<(f64, f64, f64)> {
        match &self.features[feature] {
            FeatureStats::Numeric { per_class, .. } => {
                let w = per_class[class.index()];
                Some((w.count, w.mean, w.variance()))
            }
            FeatureStats::Nominal { .. } => None,
        }
    }

    /// Count of nominal value `value` of `feature` within `class`.
    pub fn nominal_count(&self, class: ClassLabel, feature: usize, value: u32) -> Option<f64> {
        match &self.features[feature] {
            FeatureStats::Nominal { domain, counts, .. } => {
                Some(counts[class.index() * domain + value as usize])
            }
            FeatureStats::Numeric { .. } => None,
        }
    }

    /// Updates the statistics as if `(x, y)` had been seen `repetitions`
    /// times. Missing values are skipped.
    pub fn train(&mut self, x: &Instance, y: ClassLabel, repetitions: u32) {
        assert_eq!(
            x.values.len(),
            self.features.len(),
            "instance arity does not match the schema"
        );
        if repetitions == 0 {
            return;
        }
        let weight = repetitions as f64;
        let c = y.index();
        self.class_counts[c] += weight;
        self.total += weight;
        for &f in &self.active {
            match (&mut self.features[f], x.values[f]) {
                (_, Value::Missing) => {}
                (FeatureStats::Numeric { per_class, global }, Value::Numeric(v)) => {
                    per_class[c].add(v, weight);
                    global.add(v, weight);
                }
                (
                    FeatureStats::Nominal {
                        domain,
                        counts,
                        totals,
                    },
                    Value::Nominal(v),
                ) => {
                    assert!(
                        (v as usize) < *domain,
                        "nominal value outside the declared domain"
                    );
                    counts[c * *domain + v as usize] += weight;
                    totals[c] += weight;
                }
                _ => panic!("feature {f} has the wrong value kind"),
            }
        }
    }

    /// Maximum a-posteriori class; ties go to the lower class index and an
    /// untrained model answers class 0.
    pub fn predict(&self, x: &Instance) -> ClassLabel {
        assert_eq!(
            x.values.len(),
            self.features.len(),
            "instance arity does not match the schema"
        );
        if self.total == 0.0 {
            return ClassLabel(0);
        }
        let mut scores = [0.0f64; 8];
        let mut heap;
        let scores: &mut [f64] = if self.num_classes <= scores.len() {
            &mut scores[..self.num_classes]
        } else {
            heap = vec![0.0; self.num_classes];
            &mut heap
        };
        self.log_joint(x, scores);
        let mut best = 0;
        for c in 1..self.num_classes {
            if scores[c] > scores[best] {
                best = c;
            }
        }
        ClassLabel::from(best)
    }

    /// Unnormalised log posterior of every class. Classes never observed get
    /// `-inf`.
    pub fn log_joint(&self, x: &Instance, scores: &mut [f64]) {
        let denom = (self.total + self.num_classes as f64).ln();
        for (c, s) in scores.iter_mut().enumerate() {
            *s = if self.class_counts[c] > 0.0 {
                (self.class_counts[c] + 1.0).ln() - denom
            } else {
                f64::NEG_INFINITY
            };
        }
        for &f in &self.active {
            match (&self.features[f], x.values[f]) {
                (_, Value::Missing) => {}
                (FeatureStats::Numeric { per_class, global }, Value::Numeric(v)) => {
                    let floor =
                        (RELATIVE_VARIANCE_FLOOR * global.variance()).max(ABSOLUTE_VARIANCE_FLOOR);
                    for (s, w) in scores.iter_mut().zip(per_class) {
                        if w.count > 0.0 {
                            let var = w.variance().max(floor);
                            let d = v - w.mean;
                            *s += -0.5 * (2.0 * PI * var).ln() - d * d / (2.0 * var);
                        }
                    }
                }
                (
                    FeatureStats::Nominal {
                        domain,
                        counts,
                        totals,
                    },
                    Value::Nominal(v),
                ) => {
                    let v = v as usize;
                    if v >= *domain {
                        continue;
                    }
                    for (c, s) in scores.iter_mut().enumerate() {
                        *s += ((counts[c * domain + v] + 1.0) / (totals[c] + *domain as f64)).ln();
                    }
                }
                _ => panic!("feature {f} has the wrong value kind"),
            }
        }
    }
}
