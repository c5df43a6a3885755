//! Randomized weighted majority (RWM) and its cascading variant (CRWM) for
//! streaming classification.
//!
//! The crate is organised bottom-up:
//!
//! * [`expert`] holds the single-learner machinery: weighted random expert
//!   selection and the multiplicative penalty update.
//! * [`cascade`] chains `L + 1` weight vectors over one shared expert pool and
//!   routes every instance to exactly one responding learner.
//! * [`learners`] provides the base classifiers (incremental naive Bayes), the
//!   shared expert pool, and the online bagging / boosting baselines.
//! * [`bounds`] evaluates the closed-form mistake bounds and the crossover
//!   condition under which the cascade bound beats the single-learner bound.
//! * [`eval`] runs prequential (test-then-train) experiments and the
//!   statistics around them.
//! * [`io`] parses ARFF / CSV datasets and reads and writes reports.

pub mod bounds;
pub mod cascade;
pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod expert;
pub mod io;
pub mod learners;
pub mod rng;

pub use cascade::{CrwmModel, RoutingOutcome};
pub use data::{ClassLabel, Dataset, DatasetSchema, Instance, LabeledInstance, Value};
pub use error::{Error, Result};
pub use expert::{Beta, RwmLearner, WeightVector};
pub use rng::RngHandle;
