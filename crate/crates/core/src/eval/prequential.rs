//! Test-then-train evaluation of one run.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;

use crate::bounds::{
    crossover_satisfied_regions, crwm_mistake_bound, rwm_mistake_bound, RegionStats,
};
use crate::cascade::{validate_class_order, CrwmModel};
use crate::data::{ClassLabel, Dataset, FeatureKind};
use crate::error::{Error, Result};
use crate::eval::synthetic::{SyntheticExpertSpec, SyntheticStream};
use crate::expert::{Beta, RwmLearner};
use crate::learners::{ExpertPool, OnlineBagging, OnlineBoosting, PoolConfig};
use crate::rng::{Component, RngHandle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Rwm,
    Crwm,
    OnlineBagging,
    OnlineBoosting,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::OnlineBagging,
        Algorithm::OnlineBoosting,
        Algorithm::Rwm,
        Algorithm::Crwm,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Rwm => "rwm",
            Algorithm::Crwm => "crwm",
            Algorithm::OnlineBagging => "bagging",
            Algorithm::OnlineBoosting => "boosting",
        }
    }

    /// Whether the algorithm weights an expert pool (and therefore has
    /// mistake bounds and per-expert statistics).
    pub fn uses_expert_advice(self) -> bool {
        matches!(self, Algorithm::Rwm | Algorithm::Crwm)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rwm" => Ok(Algorithm::Rwm),
            "crwm" => Ok(Algorithm::Crwm),
            "bagging" | "online_bagging" | "online-bagging" => Ok(Algorithm::OnlineBagging),
            "boosting" | "online_boosting" | "online-boosting" => Ok(Algorithm::OnlineBoosting),
            other => Err(Error::config(format!(
                "unknown algorithm '{other}' (expected rwm, crwm, bagging or boosting)"
            ))),
        }
    }
}

/// Where the instances and expert predictions of a run come from.
#[derive(Debug, Clone, Copy)]
pub enum DataSource<'a> {
    /// A real dataset; expert predictions come from a naive Bayes pool.
    Dataset(&'a Dataset),
    /// A fixed stream with oracle expert predictions.
    Oracle(&'a SyntheticStream),
    /// A synthetic spec, regenerated for every run with the run seed.
    Synthetic(&'a SyntheticExpertSpec),
}

impl DataSource<'_> {
    pub fn num_classes(&self) -> usize {
        match self {
            DataSource::Dataset(d) => d.schema.num_classes(),
            DataSource::Oracle(s) => s.num_classes,
            DataSource::Synthetic(s) => s.num_classes(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            DataSource::Dataset(d) => d.len(),
            DataSource::Oracle(s) => s.len(),
            DataSource::Synthetic(s) => s.length,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn name(&self) -> String {
        match self {
            DataSource::Dataset(d) => d.name().to_string(),
            DataSource::Oracle(_) => "oracle".to_string(),
            DataSource::Synthetic(_) => "synthetic".to_string(),
        }
    }
}

/// Settings shared by all runs of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Pool / ensemble size. Ignored for oracle sources, whose expert count
    /// is fixed by the stream.
    pub experts: usize,
    pub beta: Beta,
    /// Cascade routing order; ascending class index when `None`.
    pub class_order: Option<Vec<ClassLabel>>,
    pub poisson_mean: f64,
    pub subspace: Option<f64>,
    /// Present a dataset's instances in a per-run random order instead of
    /// file order.
    pub shuffle: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experts: 100,
            beta: Beta::default(),
            class_order: None,
            poisson_mean: 1.0,
            subspace: Some(0.7),
            shuffle: false,
        }
    }
}

impl RunConfig {
    pub fn pool_config(&self) -> PoolConfig {
        PoolConfig {
            size: self.experts,
            poisson_mean: self.poisson_mean,
            subspace: self.subspace,
        }
    }

    pub fn class_order_for(&self, num_classes: usize) -> Result<Vec<ClassLabel>> {
        match &self.class_order {
            Some(order) => {
                validate_class_order(order, num_classes)?;
                Ok(order.clone())
            }
            None => Ok((0..num_classes).map(ClassLabel::from).collect()),
        }
    }
}

/// Per-expert confusion counts, with class 1 as the positive class (one
/// versus rest when there are more than two classes).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl Confusion {
    pub const POSITIVE: ClassLabel = ClassLabel(1);

    #[inline]
    fn record(&mut self, predicted: ClassLabel, truth: ClassLabel) {
        match (predicted == Self::POSITIVE, truth == Self::POSITIVE) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    /// `FP / (FP + TN)`, zero without negatives.
    pub fn fp_rate(&self) -> f64 {
        ratio(self.fp, self.fp + self.tn)
    }

    /// `FN / (FN + TP)`, zero without positives.
    pub fn fn_rate(&self) -> f64 {
        ratio(self.fn_, self.fn_ + self.tp)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Bounds evaluated on the exact counters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunBounds {
    /// Single-learner bound from the overall-best expert.
    pub rwm: f64,
    /// Cascade bound from the per-region best experts (cascade runs only).
    pub crwm: Option<f64>,
    /// Per-learner bound for each learner (`rwm` for a single learner).
    pub learner: Vec<f64>,
    /// Crossover predicate over the cascade regions (cascade runs only).
    pub crossover: Option<bool>,
    /// Number of bound inequalities that failed on expected mistakes.
    pub violations: u32,
}

impl RunBounds {
    /// The bound governing the algorithm that produced the run.
    pub fn own(&self) -> f64 {
        self.crwm.unwrap_or(self.rwm)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub run: usize,
    pub seed: u64,
    pub instances: u64,
    pub mistakes: u64,
    /// Σ F: accumulated weight fraction on wrong experts. For the
    /// deterministic ensembles this equals `mistakes`.
    pub expected_mistakes: f64,
    /// Instances answered by each learner (`K_j`).
    pub routed: Vec<u64>,
    /// Expected mistakes accumulated by each learner (`M_j`).
    pub learner_expected: Vec<f64>,
    /// `expert_mistakes[k][j]`: mistakes of expert `k` on learner `j`'s
    /// region (`m_kj`).
    pub expert_mistakes: Vec<Vec<u64>>,
    pub expert_confusion: Vec<Confusion>,
    pub bounds: Option<RunBounds>,
    /// Wall-clock seconds spent in the learning loop.
    pub seconds: f64,
}

impl RunReport {
    pub fn accuracy(&self) -> f64 {
        if self.instances == 0 {
            return 0.0;
        }
        1.0 - self.mistakes as f64 / self.instances as f64
    }

    pub fn num_experts(&self) -> usize {
        self.expert_mistakes.len()
    }

    /// Total mistakes of expert `k` over the stream.
    pub fn expert_total(&self, k: usize) -> u64 {
        self.expert_mistakes[k].iter().sum()
    }

    /// `(index, mistakes)` of the overall-best expert; lowest index on ties.
    pub fn best_expert(&self) -> Option<(usize, u64)> {
        (0..self.num_experts())
            .map(|k| (k, self.expert_total(k)))
            .min_by_key(|&(k, m)| (m, k))
    }

    /// Fewest mistakes any expert made in region `j`.
    pub fn region_best(&self, j: usize) -> u64 {
        self.expert_mistakes
            .iter()
            .map(|row| row[j])
            .min()
            .unwrap_or(0)
    }

    pub fn region_stats(&self) -> Vec<RegionStats> {
        let Some((p, _)) = self.best_expert() else {
            return Vec::new();
        };
        (0..self.routed.len())
            .map(|j| RegionStats {
                routed: self.routed[j],
                overall_best_mistakes: self.expert_mistakes[p][j],
                region_best_mistakes: self.region_best(j),
            })
            .collect()
    }

    /// Evaluates every applicable bound on this run's counters.
    pub fn compute_bounds(&self, algorithm: Algorithm, beta: Beta) -> Option<RunBounds> {
        if !algorithm.uses_expert_advice() || self.num_experts() == 0 {
            return None;
        }
        let n = self.num_experts();
        let (_, best) = self.best_expert()?;
        let rwm = rwm_mistake_bound(best, n, beta);
        let slack = |bound: f64| 1e-9 * bound.abs().max(1.0);
        let mut violations = 0;
        match algorithm {
            Algorithm::Crwm => {
                let best_per: Vec<u64> = (0..self.routed.len())
                    .map(|j| self.region_best(j))
                    .collect();
                let learner: Vec<f64> = best_per
                    .iter()
                    .map(|&m| rwm_mistake_bound(m, n, beta))
                    .collect();
                for (m_j, bound) in self.learner_expected.iter().zip(&learner) {
                    if *m_j > bound + slack(*bound) {
                        violations += 1;
                    }
                }
                let crwm = crwm_mistake_bound(&best_per, n, beta);
                if self.expected_mistakes > crwm + slack(crwm) {
                    violations += 1;
                }
                Some(RunBounds {
                    rwm,
                    crwm: Some(crwm),
                    learner,
                    crossover: Some(crossover_satisfied_regions(&self.region_stats(), n, beta)),
                    violations,
                })
            }
            _ => {
                if self.expected_mistakes > rwm + slack(rwm) {
                    violations += 1;
                }
                Some(RunBounds {
                    rwm,
                    crwm: None,
                    learner: vec![rwm],
                    crossover: None,
                    violations,
                })
            }
        }
    }
}

#[allow(clippy::large_enum_variant)]
enum Master {
    Rwm(RwmLearner),
    Crwm(CrwmModel),
}

impl Master {
    fn new(
        algorithm: Algorithm,
        num_classes: usize,
        n: usize,
        config: &RunConfig,
        seed: u64,
    ) -> Result<Self> {
        Ok(match algorithm {
            Algorithm::Rwm => Master::Rwm(RwmLearner::new(
                n,
                config.beta,
                RngHandle::substream(seed, Component::Learner(0)),
            )),
            Algorithm::Crwm => Master::Crwm(CrwmModel::with_order(
                config.class_order_for(num_classes)?,
                n,
                config.beta,
                seed,
            )?),
            _ => unreachable!("ensembles do not use a master learner"),
        })
    }

    fn num_learners(&self) -> usize {
        match self {
            Master::Rwm(_) => 1,
            Master::Crwm(m) => m.num_learners(),
        }
    }

    /// Predicts, then learns; returns `(label, responder, F)`.
    #[inline]
    fn step(&mut self, p: &[ClassLabel], truth: ClassLabel) -> (ClassLabel, usize, f64) {
        match self {
            Master::Rwm(l) => {
                let d = l.predict(p);
                let f = l.expected_mistake(p, truth);
                l.update(p, truth);
                (d.label, 0, f)
            }
            Master::Crwm(m) => {
                let out = m.predict(p);
                let f = m.expected_mistake(&out, p, truth);
                m.update(&out, p, truth);
                (out.label, out.responder, f)
            }
        }
    }
}

struct Tally {
    mistakes: u64,
    expected: f64,
    routed: Vec<u64>,
    learner_expected: Vec<f64>,
    expert_mistakes: Vec<Vec<u64>>,
    confusion: Vec<Confusion>,
}

impl Tally {
    fn new(n: usize, learners: usize) -> Self {
        Tally {
            mistakes: 0,
            expected: 0.0,
            routed: vec![0; learners],
            learner_expected: vec![0.0; learners],
            expert_mistakes: vec![vec![0; learners]; n],
            confusion: vec![Confusion::default(); n],
        }
    }

    #[inline]
    fn record(
        &mut self,
        p: &[ClassLabel],
        truth: ClassLabel,
        label: ClassLabel,
        responder: usize,
        f: f64,
    ) {
        self.mistakes += (label != truth) as u64;
        self.expected += f;
        self.routed[responder] += 1;
        self.learner_expected[responder] += f;
        for (k, &c) in p.iter().enumerate() {
            self.expert_mistakes[k][responder] += (c != truth) as u64;
            self.confusion[k].record(c, truth);
        }
    }
}

fn check_source(algorithm: Algorithm, source: &DataSource<'_>) -> Result<()> {
    if source.is_empty() {
        return Err(Error::config("the stream is empty"));
    }
    if !algorithm.uses_expert_advice() && !matches!(source, DataSource::Dataset(_)) {
        return Err(Error::config(format!(
            "{algorithm} needs feature data; synthetic oracle streams only support rwm and crwm"
        )));
    }
    Ok(())
}

fn check_label(t: usize, label: ClassLabel, num_classes: usize) -> Result<()> {
    if label.index() >= num_classes {
        return Err(Error::Ingest {
            index: t,
            message: format!("class {label} outside the {num_classes}-class domain"),
        });
    }
    Ok(())
}

/// Runs one prequential pass: every instance is predicted first and then
/// its label is revealed. For the expert-advice algorithms the shared pool
/// trains on every instance after the master learner has been updated.
pub fn run_prequential(
    algorithm: Algorithm,
    source: DataSource<'_>,
    config: &RunConfig,
    run: usize,
    seed: u64,
) -> Result<RunReport> {
    check_source(algorithm, &source)?;
    let num_classes = source.num_classes();
    let generated;
    let (stream_len, start, mut report) = match source {
        DataSource::Dataset(original) => {
            let permuted;
            let data = if config.shuffle {
                permuted = shuffled(original, seed);
                &permuted
            } else {
                original
            };
            let kinds = data.schema.feature_kinds();
            let start = Instant::now();
            let report = match algorithm {
                Algorithm::Rwm | Algorithm::Crwm => {
                    run_pool(algorithm, data, &kinds, config, seed)?
                }
                Algorithm::OnlineBagging => {
                    let mut bag = OnlineBagging::new(&kinds, num_classes, config.experts, seed)?;
                    run_ensemble(data, |x, y| {
                        let label = bag.predict(x);
                        bag.train(x, y);
                        label
                    })?
                }
                Algorithm::OnlineBoosting => {
                    let mut boost = OnlineBoosting::new(&kinds, num_classes, config.experts, seed)?;
                    run_ensemble(data, |x, y| {
                        let label = boost.predict(x);
                        boost.train(x, y);
                        label
                    })?
                }
            };
            (data.len(), start, report)
        }
        DataSource::Oracle(stream) => {
            let start = Instant::now();
            (
                stream.len(),
                start,
                run_oracle(algorithm, stream, config, seed)?,
            )
        }
        DataSource::Synthetic(spec) => {
            generated = spec.reseeded(seed).generate()?;
            let start = Instant::now();
            (
                generated.len(),
                start,
                run_oracle(algorithm, &generated, config, seed)?,
            )
        }
    };
    report.seconds = start.elapsed().as_secs_f64();
    report.run = run;
    report.seed = seed;
    report.instances = stream_len as u64;
    report.bounds = report.compute_bounds(algorithm, config.beta);
    Ok(report)
}

fn shuffled(data: &Dataset, seed: u64) -> Dataset {
    let mut rng = RngHandle::substream(seed, Component::StreamOrder);
    let mut instances = data.instances.clone();
    instances.shuffle(rng.inner());
    Dataset {
        schema: data.schema.clone(),
        instances,
    }
}

fn finish(tally: Tally) -> RunReport {
    RunReport {
        run: 0,
        seed: 0,
        instances: 0,
        mistakes: tally.mistakes,
        expected_mistakes: tally.expected,
        routed: tally.routed,
        learner_expected: tally.learner_expected,
        expert_mistakes: tally.expert_mistakes,
        expert_confusion: tally.confusion,
        bounds: None,
        seconds: 0.0,
    }
}

fn run_pool(
    algorithm: Algorithm,
    data: &Dataset,
    kinds: &[FeatureKind],
    config: &RunConfig,
    seed: u64,
) -> Result<RunReport> {
    let num_classes = data.schema.num_classes();
    let mut pool = ExpertPool::new(kinds, num_classes, &config.pool_config(), seed)?;
    let n = pool.len();
    let mut master = Master::new(algorithm, num_classes, n, config, seed)?;
    let mut tally = Tally::new(n, master.num_learners());
    let mut p = Vec::with_capacity(n);
    for (t, inst) in data.instances.iter().enumerate() {
        check_label(t, inst.label, num_classes)?;
        if inst.instance.values.len() != kinds.len() {
            return Err(Error::Ingest {
                index: t,
                message: format!(
                    "{} values, schema declares {}",
                    inst.instance.values.len(),
                    kinds.len()
                ),
            });
        }
        pool.predict_into(&inst.instance, &mut p);
        let (label, responder, f) = master.step(&p, inst.label);
        tally.record(&p, inst.label, label, responder, f);
        pool.train(&inst.instance, inst.label);
    }
    Ok(finish(tally))
}

fn run_oracle(
    algorithm: Algorithm,
    stream: &SyntheticStream,
    config: &RunConfig,
    seed: u64,
) -> Result<RunReport> {
    let n = stream.num_experts;
    let mut master = Master::new(algorithm, stream.num_classes, n, config, seed)?;
    let mut tally = Tally::new(n, master.num_learners());
    for t in 0..stream.len() {
        let truth = stream.labels[t];
        check_label(t, truth, stream.num_classes)?;
        let p = stream.row(t);
        let (label, responder, f) = master.step(p, truth);
        tally.record(p, truth, label, responder, f);
    }
    Ok(finish(tally))
}

/// `step` predicts an instance, then trains on it, returning the prediction.
fn run_ensemble(
    data: &Dataset,
    mut step: impl FnMut(&crate::data::Instance, ClassLabel) -> ClassLabel,
) -> Result<RunReport> {
    let num_classes = data.schema.num_classes();
    let mut mistakes = 0u64;
    for (t, inst) in data.instances.iter().enumerate() {
        check_label(t, inst.label, num_classes)?;
        if step(&inst.instance, inst.label) != inst.label {
            mistakes += 1;
        }
    }
    let mut tally = Tally::new(0, 0);
    tally.mistakes = mistakes;
    tally.expected = mistakes as f64;
    Ok(finish(tally))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> RunConfig {
        RunConfig::default()
    }

    #[test]
    fn perfect_single_expert() {
        let spec = SyntheticExpertSpec {
            errors: vec![vec![0.0, 0.0]],
            prior: vec![0.5, 0.5],
            length: 500,
            seed: 0,
        };
        for algo in [Algorithm::Rwm, Algorithm::Crwm] {
            let r = run_prequential(algo, DataSource::Synthetic(&spec), &cfg(), 0, 3).unwrap();
            assert_eq!(r.accuracy(), 1.0);
            assert_eq!(r.expected_mistakes, 0.0);
            assert_eq!(r.bounds.unwrap().violations, 0);
        }
    }

    #[test]
    fn counts_are_conserved() {
        let spec = SyntheticExpertSpec::crossover(2000, 0);
        let r =
            run_prequential(Algorithm::Crwm, DataSource::Synthetic(&spec), &cfg(), 0, 9).unwrap();
        assert_eq!(r.routed.iter().sum::<u64>(), r.instances);
        assert!((r.learner_expected.iter().sum::<f64>() - r.expected_mistakes).abs() < 1e-9);
        for (k, c) in r.expert_confusion.iter().enumerate() {
            assert_eq!(c.tp + c.fp + c.tn + c.fn_, r.instances);
            assert_eq!(c.fp + c.fn_, r.expert_total(k));
        }
        // m_kj = K_j * X_kj by construction
        for row in &r.expert_mistakes {
            for (j, m) in row.iter().enumerate() {
                let rate = *m as f64 / r.routed[j] as f64;
                assert!((rate * r.routed[j] as f64 - *m as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ensembles_reject_oracle_streams() {
        let spec = SyntheticExpertSpec::crossover(10, 0);
        let err = run_prequential(
            Algorithm::OnlineBagging,
            DataSource::Synthetic(&spec),
            &cfg(),
            0,
            0,
        );
        assert!(err.is_err());
    }

    #[test]
    fn bad_class_order_is_a_config_error() {
        let spec = SyntheticExpertSpec::crossover(10, 0);
        let config = RunConfig {
            class_order: Some(vec![ClassLabel(0), ClassLabel(0)]),
            ..cfg()
        };
        assert!(
            run_prequential(Algorithm::Crwm, DataSource::Synthetic(&spec), &config, 0, 0).is_err()
        );
    }

    #[test]
    fn shuffle_is_seeded_and_changes_order() {
        let spec = SyntheticExpertSpec::crossover(300, 0);
        let data = spec.generate().unwrap().to_dataset("s");
        let a = shuffled(&data, 4);
        assert_eq!(a, shuffled(&data, 4));
        assert_ne!(a.instances, data.instances);
        assert_ne!(a.instances, shuffled(&data, 5).instances);
        let mut sorted: Vec<_> = a.instances.iter().map(|i| format!("{i:?}")).collect();
        let mut orig: Vec<_> = data.instances.iter().map(|i| format!("{i:?}")).collect();
        sorted.sort();
        orig.sort();
        assert_eq!(sorted, orig);
    }

    #[test]
    fn algorithm_ids_roundtrip() {
        for a in Algorithm::ALL {
            assert_eq!(a.id().parse::<Algorithm>().unwrap(), a);
        }
        assert!("wm".parse::<Algorithm>().is_err());
    }
}
