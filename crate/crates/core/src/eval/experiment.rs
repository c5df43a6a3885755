//! Multi-run experiments, comparisons and β sweeps.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::data::ClassLabel;
use crate::error::{Error, Result};
use crate::eval::prequential::{run_prequential, Algorithm, DataSource, RunConfig, RunReport};
use crate::eval::stats::{mean, paired_t_test, std_dev, TTest};
use crate::expert::Beta;

pub const REPORT_VERSION: u32 = 1;

/// How the runs of an experiment are scheduled. Without the `parallel`
/// feature both variants run sequentially.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub run: RunConfig,
    pub runs: usize,
    pub base_seed: u64,
    pub execution: Execution,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            run: RunConfig::default(),
            runs: 50,
            base_seed: 1,
            execution: Execution::Parallel,
        }
    }
}

impl ExperimentConfig {
    pub fn seed_of(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }
}

/// Everything needed to interpret the runs of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportHeader {
    pub version: u32,
    pub algorithm: Algorithm,
    pub dataset: String,
    pub instances: u64,
    pub num_classes: usize,
    pub experts: usize,
    pub beta: f64,
    pub class_order: Vec<ClassLabel>,
    pub runs: usize,
    pub base_seed: u64,
    pub poisson_mean: f64,
    pub subspace: Option<f64>,
    pub shuffle: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrequentialReport {
    pub header: ReportHeader,
    pub runs: Vec<RunReport>,
}

/// Aggregates over the runs of one report.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub runs: usize,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_mistakes: f64,
    pub mean_expected_mistakes: f64,
    pub mean_seconds: f64,
    pub mean_rwm_bound: Option<f64>,
    pub mean_crwm_bound: Option<f64>,
    /// Fraction of runs where the crossover predicate held.
    pub crossover_rate: Option<f64>,
    pub bound_violations: u32,
    /// Runs where realized mistakes did not stay strictly below the bound
    /// of the algorithm that produced them.
    pub realized_above_bound: usize,
}

impl PrequentialReport {
    pub fn accuracies(&self) -> Vec<f64> {
        self.runs.iter().map(RunReport::accuracy).collect()
    }

    pub fn summary(&self) -> Summary {
        let acc = self.accuracies();
        let col =
            |f: &dyn Fn(&RunReport) -> f64| mean(&self.runs.iter().map(f).collect::<Vec<_>>());
        let bounds: Vec<_> = self.runs.iter().filter_map(|r| r.bounds.as_ref()).collect();
        let (rwm, crwm, crossover) = if bounds.is_empty() {
            (None, None, None)
        } else {
            let crwm: Vec<f64> = bounds.iter().filter_map(|b| b.crwm).collect();
            let cross: Vec<f64> = bounds
                .iter()
                .filter_map(|b| b.crossover)
                .map(|c| c as u8 as f64)
                .collect();
            (
                Some(mean(&bounds.iter().map(|b| b.rwm).collect::<Vec<_>>())),
                (!crwm.is_empty()).then(|| mean(&crwm)),
                (!cross.is_empty()).then(|| mean(&cross)),
            )
        };
        Summary {
            runs: self.runs.len(),
            mean_accuracy: mean(&acc),
            std_accuracy: std_dev(&acc),
            mean_mistakes: col(&|r| r.mistakes as f64),
            mean_expected_mistakes: col(&|r| r.expected_mistakes),
            mean_seconds: col(&|r| r.seconds),
            mean_rwm_bound: rwm,
            mean_crwm_bound: crwm,
            crossover_rate: crossover,
            bound_violations: bounds.iter().map(|b| b.violations).sum(),
            realized_above_bound: self
                .runs
                .iter()
                .filter(|r| {
                    r.bounds
                        .as_ref()
                        .is_some_and(|b| r.mistakes as f64 >= b.own())
                })
                .count(),
        }
    }

    pub fn total_seconds(&self) -> f64 {
        self.runs.iter().map(|r| r.seconds).sum()
    }
}

/// Runs `config.runs` independent prequential passes with seeds
/// `base_seed + run`. Runs may execute concurrently; the result is ordered
/// by run index and independent of scheduling.
pub fn run_experiment(
    algorithm: Algorithm,
    source: DataSource<'_>,
    config: &ExperimentConfig,
) -> Result<PrequentialReport> {
    if config.runs == 0 {
        return Err(Error::config("run count must be at least 1"));
    }
    let num_classes = source.num_classes();
    let class_order = if algorithm == Algorithm::Crwm {
        config.run.class_order_for(num_classes)?
    } else {
        Vec::new()
    };
    let one = |r: usize| run_prequential(algorithm, source, &config.run, r, config.seed_of(r));
    let runs: Result<Vec<RunReport>> = match config.execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..config.runs).into_par_iter().map(one).collect(),
        _ => (0..config.runs).map(one).collect(),
    };
    let runs = runs?;
    let experts = match source {
        DataSource::Dataset(_) => config.run.experts,
        DataSource::Oracle(s) => s.num_experts,
        DataSource::Synthetic(s) => s.num_experts(),
    };
    Ok(PrequentialReport {
        header: ReportHeader {
            version: REPORT_VERSION,
            algorithm,
            dataset: source.name(),
            instances: source.len() as u64,
            num_classes,
            experts,
            beta: config.run.beta.get(),
            class_order,
            runs: config.runs,
            base_seed: config.base_seed,
            poisson_mean: config.run.poisson_mean,
            subspace: config.run.subspace,
            shuffle: config.run.shuffle,
        },
        runs,
    })
}

/// Several algorithms on the same source, paired by seed, with t-tests of
/// the reference algorithm against each of the others.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub reference: Algorithm,
    pub reports: Vec<PrequentialReport>,
    pub tests: Vec<(Algorithm, TTest)>,
}

pub fn compare(
    algorithms: &[Algorithm],
    source: DataSource<'_>,
    config: &ExperimentConfig,
) -> Result<Comparison> {
    if algorithms.is_empty() {
        return Err(Error::config("nothing to compare"));
    }
    let reference = if algorithms.contains(&Algorithm::Crwm) {
        Algorithm::Crwm
    } else {
        algorithms[0]
    };
    let reports = algorithms
        .iter()
        .map(|&a| run_experiment(a, source, config))
        .collect::<Result<Vec<_>>>()?;
    let reference_acc = reports
        .iter()
        .find(|r| r.header.algorithm == reference)
        .map(PrequentialReport::accuracies)
        .expect("reference algorithm was run");
    let mut tests = Vec::new();
    if config.runs >= 2 {
        for r in reports.iter().filter(|r| r.header.algorithm != reference) {
            tests.push((
                r.header.algorithm,
                paired_t_test(&reference_acc, &r.accuracies())?,
            ));
        }
    }
    Ok(Comparison {
        reference,
        reports,
        tests,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub beta: f64,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
}

/// Mean accuracy for each β in `betas`, with identical seeds across β.
pub fn beta_sweep(
    algorithm: Algorithm,
    source: DataSource<'_>,
    betas: &[f64],
    config: &ExperimentConfig,
) -> Result<Vec<SweepPoint>> {
    betas
        .iter()
        .map(|&b| {
            let mut cfg = config.clone();
            cfg.run.beta = Beta::new(b)?;
            let report = run_experiment(algorithm, source, &cfg)?;
            let acc = report.accuracies();
            Ok(SweepPoint {
                beta: b,
                mean_accuracy: mean(&acc),
                std_accuracy: std_dev(&acc),
            })
        })
        .collect()
}

/// β grid 0.1, 0.2, …, 0.9.
pub fn default_beta_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}
