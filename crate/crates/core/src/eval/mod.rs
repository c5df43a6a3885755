//! Prequential experiment engine.

pub mod experiment;
pub mod prequential;
pub mod rates;
pub mod stats;
pub mod synthetic;

pub use experiment::{
    beta_sweep, compare, default_beta_grid, run_experiment, Comparison, Execution,
    ExperimentConfig, PrequentialReport, ReportHeader, Summary, SweepPoint, REPORT_VERSION,
};
pub use prequential::{
    run_prequential, Algorithm, Confusion, DataSource, RunBounds, RunConfig, RunReport,
};
pub use rates::{expert_rate_table, RateRow};
pub use stats::{paired_t_test, TTest, Verdict};
pub use synthetic::{SyntheticExpertSpec, SyntheticStream};
