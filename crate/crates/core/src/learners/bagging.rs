use crate::data::{ClassLabel, FeatureKind, Instance};
use crate::error::Result;
use crate::learners::{ExpertPool, PoolConfig};

/// Online bagging: every member trains on each instance Poisson(1) times and
/// the ensemble answers by unweighted majority vote.
#[derive(Debug, Clone)]
pub struct OnlineBagging {
    members: ExpertPool,
    num_classes: usize,
}

impl OnlineBagging {
    pub fn new(kinds: &[FeatureKind], num_classes: usize, size: usize, seed: u64) -> Result<Self> {
        let config = PoolConfig {
            size,
            poisson_mean: 1.0,
            subspace: None,
        };
        Ok(OnlineBagging {
            members: ExpertPool::new(kinds, num_classes, &config, seed)?,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &ExpertPool {
        &self.members
    }

    /// Majority vote; ties go to the lower class index.
    pub fn predict(&self, x: &Instance) -> ClassLabel {
        let mut votes = vec![0usize; self.num_classes];
        for i in 0..self.members.len() {
            votes[self.members.expert(i).predict(x).index()] += 1;
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
        self.members.train(x, y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Value;
    use crate::learners::NaiveBayes;
    use crate::rng::{Component, RngHandle};
    use rand_distr::{Distribution, Poisson};

    #[test]
    fn single_member_is_a_resampled_naive_bayes() {
        let kinds = [FeatureKind::Numeric];
        let mut bag = OnlineBagging::new(&kinds, 2, 1, 21).unwrap();
        let mut reference = NaiveBayes::new(&kinds, 2);
        let mut rng = RngHandle::substream(21, Component::Expert(0));
        let poisson = Poisson::new(1.0).unwrap();
        for t in 0..200 {
            let v = (t as f64 * 0.37).sin() * 3.0;
            let x = Instance::new(vec![Value::Numeric(v)]);
            let y = ClassLabel((v > 0.0) as u32);
            assert_eq!(bag.predict(&x), reference.predict(&x));
            bag.train(&x, y);
            reference.train(&x, y, poisson.sample(rng.inner()) as u32);
        }
    }

    #[test]
    fn majority_tie_goes_low() {
        let bag = OnlineBagging::new(&[FeatureKind::Numeric], 3, 4, 0).unwrap();
        assert_eq!(
            bag.predict(&Instance::new(vec![Value::Numeric(0.0)])),
            ClassLabel(0)
        );
    }
}
