//! Synthetic expert streams: true labels drawn from a class prior, expert
//! predictions corrupted with a per-expert, per-class error probability.
//! They let the bounds be checked without base-learner noise.

use crate::data::{
    Attribute, ClassLabel, Dataset, DatasetSchema, Instance, LabeledInstance, Value,
};
use crate::error::{Error, Result};
use crate::rng::{Component, RngHandle};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticExpertSpec {
    /// `errors[i][c]`: probability that expert `i` is wrong on an instance of
    /// true class `c`.
    pub errors: Vec<Vec<f64>>,
    pub prior: Vec<f64>,
    pub length: usize,
    pub seed: u64,
}

/// A labeled stream with oracle expert predictions, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticStream {
    pub num_classes: usize,
    pub num_experts: usize,
    pub labels: Vec<ClassLabel>,
    pub predictions: Vec<ClassLabel>,
}

impl SyntheticExpertSpec {
    /// The two-class stream with three experts used to exhibit the
    /// crossover: A is best on class 0, B on class 1, C overall.
    pub fn crossover(length: usize, seed: u64) -> Self {
        SyntheticExpertSpec {
            errors: vec![vec![0.10, 0.30], vec![0.30, 0.10], vec![0.18, 0.18]],
            prior: vec![0.5, 0.5],
            length,
            seed,
        }
    }

    pub fn num_classes(&self) -> usize {
        self.prior.len()
    }

    pub fn num_experts(&self) -> usize {
        self.errors.len()
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.prior.len();
        if l < 2 {
            return Err(Error::config(
                "a synthetic stream needs at least two classes",
            ));
        }
        if self.errors.is_empty() {
            return Err(Error::config(
                "a synthetic stream needs at least one expert",
            ));
        }
        if self.length == 0 {
            return Err(Error::config("a synthetic stream must not be empty"));
        }
        if self.prior.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::config("class prior entries must lie in [0, 1]"));
        }
        if (self.prior.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::config("class prior must sum to 1"));
        }
        for (i, row) in self.errors.iter().enumerate() {
            if row.len() != l {
                return Err(Error::config(format!(
                    "expert {i} has {} error rates, expected {l}",
                    row.len()
                )));
            }
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::config(format!(
                    "expert {i} has an error rate outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    /// Same spec with a different seed.
    pub fn reseeded(&self, seed: u64) -> Self {
        SyntheticExpertSpec {
            seed,
            ..self.clone()
        }
    }

    pub fn generate(&self) -> Result<SyntheticStream> {
        self.validate()?;
        let l = self.num_classes();
        let n = self.num_experts();
        let mut rng = RngHandle::substream(self.seed, Component::Synthetic);
        let mut labels = Vec::with_capacity(self.length);
        let mut predictions = Vec::with_capacity(self.length * n);
        for _ in 0..self.length {
            let u = rng.uniform();
            let mut acc = 0.0;
            let mut y = l - 1;
            for (c, p) in self.prior.iter().enumerate() {
                acc += p;
                if u < acc {
                    y = c;
                    break;
                }
            }
            labels.push(ClassLabel::from(y));
            for row in &self.errors {
                let wrong = rng.uniform() < row[y];
                let label = if wrong {
                    // uniform over the other L-1 classes
                    let k = ((rng.uniform() * (l - 1) as f64) as usize).min(l - 2);
                    if k >= y {
                        k + 1
                    } else {
                        k
                    }
                } else {
                    y
                };
                predictions.push(ClassLabel::from(label));
            }
        }
        Ok(SyntheticStream {
            num_classes: l,
            num_experts: n,
            labels,
            predictions,
        })
    }
}

impl SyntheticStream {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Expert predictions for instance `t`.
    pub fn row(&self, t: usize) -> &[ClassLabel] {
        &self.predictions[t * self.num_experts..(t + 1) * self.num_experts]
    }

    /// Encodes the stream as a dataset whose features are the expert
    /// predictions, so it can be written as ARFF and replayed later.
    pub fn to_dataset(&self, relation: &str) -> Dataset {
        let classes: Vec<String> = (0..self.num_classes).map(|c| c.to_string()).collect();
        let mut attributes: Vec<Attribute> = (0..self.num_experts)
            .map(|i| Attribute::nominal(format!("expert_{i}"), classes.clone()))
            .collect();
        attributes.push(Attribute::nominal("class", classes));
        let schema = DatasetSchema::new(relation, attributes, self.num_experts)
            .expect("valid by construction");
        let instances = (0..self.len())
            .map(|t| LabeledInstance {
                instance: Instance::new(self.row(t).iter().map(|c| Value::Nominal(c.0)).collect()),
                label: self.labels[t],
            })
            .collect();
        Dataset { schema, instances }
    }

    /// Inverse of [`to_dataset`](Self::to_dataset): every feature must be a
    /// nominal attribute over the class domain, without missing values.
    pub fn from_dataset(data: &Dataset) -> Result<Self> {
        let l = data.schema.num_classes();
        let n = data.schema.num_features();
        if n == 0 {
            return Err(Error::config(
                "an oracle stream needs at least one expert column",
            ));
        }
        for attr in data.schema.feature_attributes() {
            if attr.domain_size() != Some(l) {
                return Err(Error::config(format!(
                    "oracle column '{}' must be nominal with {l} values",
                    attr.name
                )));
            }
        }
        let mut predictions = Vec::with_capacity(n * data.len());
        for (t, inst) in data.instances.iter().enumerate() {
            for v in &inst.instance.values {
                match v {
                    Value::Nominal(c) => predictions.push(ClassLabel(*c)),
                    _ => {
                        return Err(Error::Ingest {
                            index: t,
                            message: "oracle predictions must not be missing".into(),
                        })
                    }
                }
            }
        }
        Ok(SyntheticStream {
            num_classes: l,
            num_experts: n,
            labels: data.instances.iter().map(|i| i.label).collect(),
            predictions,
        })
    }
}
