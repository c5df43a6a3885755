//! Base classifiers and baseline ensembles.

mod bagging;
mod boosting;
mod naive_bayes;
mod pool;

pub use bagging::OnlineBagging;
pub use boosting::OnlineBoosting;
pub use naive_bayes::{NaiveBayes, Welford};
pub use pool::{ExpertPool, PoolConfig};
