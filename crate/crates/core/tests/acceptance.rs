//! Acceptance suite. Runs every criterion and prints one PASS/FAIL line each.
//! Failures are reported but only fail the process when `ACCEPTANCE_STRICT=1`,
//! so the remaining test targets still run under `cargo test --workspace`.
//! Pass criterion numbers as arguments to run a subset:
//! `cargo test --test acceptance -- 3 6`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crwm::bounds::{biased_fp_rate, crwm_mistake_bound, rwm_mistake_bound};
use crwm::data::Dataset;
use crwm::eval::{
    paired_t_test, run_experiment, run_prequential, Algorithm, DataSource, ExperimentConfig,
    PrequentialReport, RunConfig, RunReport, SyntheticExpertSpec, Verdict,
};
use crwm::io::{
    load_dataset, parse_arff, parse_arff_bytes, parse_csv, parse_csv_bytes, read_report,
    write_arff, write_csv, write_report, ClassSelector, WriteOptions,
};
use crwm::Beta;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn load(name: &str) -> Dataset {
    load_dataset(
        &data_dir().join(format!("{name}.arff")),
        &ClassSelector::Last,
        None,
    )
    .unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Relative slack for comparing accumulated floating-point sums with bounds.
fn within(value: f64, bound: f64) -> bool {
    value <= bound + 1e-9 * bound.abs().max(1.0)
}

fn random_spec(rng: &mut ChaCha8Rng, num_classes: usize, seed: u64) -> (SyntheticExpertSpec, Beta) {
    let n = rng.random_range(2..=100);
    let beta = Beta::new(rng.random_range(0.1..=0.9)).unwrap();
    let length = 10f64.powf(rng.random_range(2.0..=4.0)).round() as usize;
    let errors = (0..n)
        .map(|_| {
            (0..num_classes)
                .map(|_| rng.random_range(0.0..0.9))
                .collect()
        })
        .collect();
    let raw: Vec<f64> = (0..num_classes)
        .map(|_| rng.random_range(0.2..1.0))
        .collect();
    let total: f64 = raw.iter().sum();
    let mut prior: Vec<f64> = raw.iter().map(|p| p / total).collect();
    let head: f64 = prior[..num_classes - 1].iter().sum();
    prior[num_classes - 1] = 1.0 - head;
    (
        SyntheticExpertSpec {
            errors,
            prior,
            length,
            seed,
        },
        beta,
    )
}

fn run_once(algorithm: Algorithm, spec: &SyntheticExpertSpec, beta: Beta) -> RunReport {
    let cfg = RunConfig {
        beta,
        ..RunConfig::default()
    };
    run_prequential(algorithm, DataSource::Synthetic(spec), &cfg, 0, spec.seed).unwrap()
}

fn single_learner_bound_everywhere() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let (mut checks, mut violations) = (0u64, 0u64);
    for c in 0..200u64 {
        let classes = 2 + (c % 3) as usize;
        let (spec, beta) = random_spec(&mut rng, classes, 1000 + c);
        let r = run_once(Algorithm::Rwm, &spec, beta);
        let n = r.num_experts();
        for k in 0..n {
            checks += 1;
            if !within(
                r.expected_mistakes,
                rwm_mistake_bound(r.expert_total(k), n, beta),
            ) {
                violations += 1;
            }
        }
    }
    Outcome::new(
        violations == 0,
        format!("200 configurations, {checks} expert-level checks, {violations} violations"),
    )
}

fn cascade_bounds_everywhere() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let (mut learner_checks, mut total_checks, mut violations) = (0u64, 0u64, 0u64);
    for c in 0..200u64 {
        let classes = [2, 3, 5][(c % 3) as usize];
        let (spec, beta) = random_spec(&mut rng, classes, 2000 + c);
        let r = run_once(Algorithm::Crwm, &spec, beta);
        let n = r.num_experts();
        for (j, m_j) in r.learner_expected.iter().enumerate() {
            for k in 0..n {
                learner_checks += 1;
                if !within(*m_j, rwm_mistake_bound(r.expert_mistakes[k][j], n, beta)) {
                    violations += 1;
                }
            }
        }
        let best: Vec<u64> = (0..r.routed.len()).map(|j| r.region_best(j)).collect();
        total_checks += 1;
        if !within(r.expected_mistakes, crwm_mistake_bound(&best, n, beta)) {
            violations += 1;
        }
    }
    Outcome::new(
        violations == 0,
        format!("200 configurations (L = 2, 3, 5), {learner_checks} per-learner and {total_checks} total checks, {violations} violations"),
    )
}

fn experiment(algorithm: Algorithm, source: DataSource<'_>, runs: usize) -> PrequentialReport {
    let cfg = ExperimentConfig {
        runs,
        ..ExperimentConfig::default()
    };
    run_experiment(algorithm, source, &cfg).unwrap()
}

fn crossover_reproduced() -> Outcome {
    let long = SyntheticExpertSpec::crossover(10_000, 0);
    let rwm = experiment(Algorithm::Rwm, DataSource::Synthetic(&long), 50);
    let crwm = experiment(Algorithm::Crwm, DataSource::Synthetic(&long), 50);
    let bounds: Vec<_> = crwm
        .runs
        .iter()
        .map(|r| r.bounds.clone().unwrap())
        .collect();
    let bound_below = bounds.iter().all(|b| b.crwm.unwrap() < b.rwm);
    let predicate = bounds.iter().all(|b| b.crossover == Some(true));
    let mistakes =
        |r: &PrequentialReport| r.runs.iter().map(|x| x.mistakes as f64).collect::<Vec<_>>();
    let (m_rwm, m_crwm) = (mistakes(&rwm), mistakes(&crwm));
    let test = paired_t_test(&m_rwm, &m_crwm).unwrap();
    let fewer = test.mean_difference > 0.0 && test.p_greater() < 0.05;

    let short = SyntheticExpertSpec::crossover(50, 0);
    let small = experiment(Algorithm::Crwm, DataSource::Synthetic(&short), 50);
    let agree = small.runs.iter().all(|r| {
        let b = r.bounds.as_ref().unwrap();
        b.crossover == Some(b.crwm.unwrap() < b.rwm)
    });
    let s_long = crwm.summary();
    Outcome::new(
        bound_below && predicate && fewer && agree,
        format!(
            "N=1e4: bounds crwm {:.1} < rwm {:.1} in all runs: {bound_below}, predicate true in all runs: {predicate}; \
             mistakes rwm {:.1} vs crwm {:.1}, one-sided p = {:.2e}; N=50 predicate agrees with bound order: {agree}",
            s_long.mean_crwm_bound.unwrap(),
            s_long.mean_rwm_bound.unwrap(),
            rwm.summary().mean_mistakes,
            s_long.mean_mistakes,
            test.p_greater()
        ),
    )
}

/// Published cascade accuracy (percent) for each fixture dataset.
const REFERENCE_ACCURACY: [(&str, f64); 6] = [
    ("sonar", 67.73),
    ("ionosphere", 86.24),
    ("breast-cancer", 95.77),
    ("diabetes", 74.43),
    ("german-credit", 73.55),
    ("chess", 91.37),
];

struct BatteryRow {
    name: &'static str,
    reference: f64,
    rwm: PrequentialReport,
    crwm: PrequentialReport,
}

fn battery() -> &'static [BatteryRow] {
    static BATTERY: OnceLock<Vec<BatteryRow>> = OnceLock::new();
    BATTERY.get_or_init(|| {
        REFERENCE_ACCURACY
            .iter()
            .map(|&(name, reference)| {
                let data = load(name);
                BatteryRow {
                    name,
                    reference,
                    rwm: experiment(Algorithm::Rwm, DataSource::Dataset(&data), 50),
                    crwm: experiment(Algorithm::Crwm, DataSource::Dataset(&data), 50),
                }
            })
            .collect()
    })
}

fn accuracy_battery() -> Outcome {
    let mut not_worse = true;
    let mut greater = 0;
    let mut in_band = true;
    let mut parts = Vec::new();
    for row in battery() {
        let rwm = 100.0 * row.rwm.summary().mean_accuracy;
        let crwm = 100.0 * row.crwm.summary().mean_accuracy;
        not_worse &= crwm >= rwm - 0.5;
        greater += (crwm > rwm) as usize;
        let band = (crwm - row.reference).abs() <= 4.0;
        in_band &= band;
        parts.push(format!(
            "{} crwm {crwm:.2} rwm {rwm:.2} ref {:.2}{}",
            row.name,
            row.reference,
            if band { "" } else { " (outside band)" }
        ));
    }
    let pass = not_worse && greater >= 4 && in_band;
    Outcome::new(
        pass,
        format!(
            "{}; crwm >= rwm - 0.5 everywhere: {not_worse}; crwm > rwm on {greater}/6; all within 4 points: {in_band}",
            parts.join(", ")
        ),
    )
}

fn bounds_exceed_mistakes() -> Outcome {
    let mut runs = 0;
    let mut violations = 0;
    for row in battery() {
        for report in [&row.rwm, &row.crwm] {
            for r in &report.runs {
                runs += 1;
                let own = r.bounds.as_ref().unwrap().own();
                if r.mistakes as f64 >= own {
                    violations += 1;
                }
            }
        }
    }
    Outcome::new(
        violations == 0,
        format!("{runs} runs, bound <= realized mistakes in {violations}"),
    )
}

fn biased_estimator() -> Outcome {
    let zero = biased_fp_rate(0, 0) == 0.5;
    let total = 1_000_000u64;
    let converged = (0..=total)
        .step_by(997)
        .chain([total])
        .all(|fp| (biased_fp_rate(fp, total - fp) - fp as f64 / total as f64).abs() < 1e-5);
    let monotone = [0u64, 1, 7, 1000]
        .iter()
        .all(|&tp| (0..500).all(|fp| biased_fp_rate(fp + 1, tp) > biased_fp_rate(fp, tp)));
    Outcome::new(
        zero && converged && monotone,
        format!("(0,0) -> 0.5: {zero}; converges at 1e6: {converged}; monotone in fp: {monotone}"),
    )
}

fn t_test() -> Outcome {
    let spread = 0.9f64.sqrt();
    let a: Vec<f64> = (0..10)
        .map(|i| if i < 5 { 1.0 + spread } else { 1.0 - spread })
        .collect();
    let b = vec![0.0; 10];
    let r = paired_t_test(&a, &b).unwrap();
    // Two-tailed Student t reference for t = sqrt(10), df = 9.
    let example = (r.t - 3.1623).abs() < 1e-3
        && (r.p - 0.011508).abs() < 1e-3
        && r.df == 9
        && r.verdict == Verdict::Win;
    let same = paired_t_test(&a, &a).unwrap();
    let identical = same.t == 0.0 && same.p == 1.0 && same.verdict == Verdict::Draw;
    let c = paired_t_test(&[2.0; 5], &[1.0; 5]).unwrap();
    let constant = c.p == 0.0 && c.t == f64::INFINITY && c.verdict == Verdict::Win;
    Outcome::new(
        example && identical && constant,
        format!(
            "t = {:.4}, p = {:.4}, df = {}; identical samples draw: {identical}; constant difference wins with p = 0: {constant}",
            r.t, r.p, r.df
        ),
    )
}

fn determinism_and_parsing() -> Outcome {
    let sonar = load("sonar");
    let cfg = ExperimentConfig {
        runs: 3,
        base_seed: 7,
        ..ExperimentConfig::default()
    };
    let text = |a| {
        write_report(
            &run_experiment(a, DataSource::Dataset(&sonar), &cfg).unwrap(),
            &WriteOptions::machine(),
        )
    };
    let deterministic = Algorithm::ALL.iter().all(|&a| text(a) == text(a));

    let mut roundtrip = true;
    let mut datasets = Vec::new();
    for (name, _) in REFERENCE_ACCURACY {
        let d = load(name);
        roundtrip &= parse_arff(&write_arff(&d)).ok().as_ref() == Some(&d);
        roundtrip &= parse_csv(&write_csv(&d, true), &d.schema, true)
            .ok()
            .as_ref()
            == Some(&d);
        roundtrip &= parse_csv(&write_csv(&d, false), &d.schema, false)
            .ok()
            .as_ref()
            == Some(&d);
        datasets.push(d);
    }

    let seeds: Vec<Vec<u8>> = datasets
        .iter()
        .map(|d| write_arff(d).into_bytes().into_iter().take(4096).collect())
        .chain(std::iter::once(
            text(Algorithm::Crwm)
                .into_bytes()
                .into_iter()
                .take(4096)
                .collect(),
        ))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xf022);
    let mut crashes = 0;
    let mut rejected = 0;
    let previous = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    for i in 0..10_000 {
        let bytes: Vec<u8> = if i % 2 == 0 {
            let len = rng.random_range(0..512);
            (0..len).map(|_| rng.random()).collect()
        } else {
            let mut b = seeds[i % seeds.len()].clone();
            for _ in 0..rng.random_range(1..16) {
                let pos = rng.random_range(0..b.len().max(1));
                match rng.random_range(0..3) {
                    0 if !b.is_empty() => {
                        let at = pos.min(b.len() - 1);
                        b[at] = rng.random();
                    }
                    1 => {
                        let noise = b",?{}'\"%@\n";
                        b.insert(pos.min(b.len()), noise[rng.random_range(0..noise.len())])
                    }
                    _ => b.truncate(pos),
                }
            }
            b
        };
        let schema = &datasets[i % datasets.len()].schema;
        let outcome = catch_unwind(AssertUnwindSafe(|| {
            let a = parse_arff_bytes(&bytes, &ClassSelector::Last).is_err();
            let c = parse_csv_bytes(&bytes, schema, i % 3 == 0).is_err();
            let r = std::str::from_utf8(&bytes).map_or(true, |t| read_report(t).is_err());
            a as usize + c as usize + r as usize
        }));
        match outcome {
            Ok(n) => rejected += n,
            Err(_) => crashes += 1,
        }
    }
    std::panic::set_hook(previous);
    Outcome::new(
        deterministic && roundtrip && crashes == 0,
        format!(
            "byte-identical reports: {deterministic}; ARFF/CSV round-trip on 6 fixtures: {roundtrip}; \
             fuzz 10000 inputs x 3 parsers: {crashes} crashes, {rejected} positioned rejections"
        ),
    )
}

fn runtime_sanity() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let (mut total_rwm, mut total_crwm) = (0.0, 0.0);
    for row in battery() {
        let (r, c) = (row.rwm.total_seconds(), row.crwm.total_seconds());
        total_rwm += r;
        total_crwm += c;
        pass &= c <= 2.0 * r;
        parts.push(format!("{} {:.2}x", row.name, c / r));
    }
    Outcome::new(
        pass,
        format!(
            "crwm/rwm time {}; total {total_crwm:.1}s vs {total_rwm:.1}s",
            parts.join(", ")
        ),
    )
}

fn main() {
    let criteria: [(u32, &str, Check); 9] = [
        (
            1,
            "single-learner bound holds",
            single_learner_bound_everywhere,
        ),
        (
            2,
            "cascade per-learner and total bounds hold",
            cascade_bounds_everywhere,
        ),
        (3, "crossover reproduced", crossover_reproduced),
        (4, "accuracy battery", accuracy_battery),
        (5, "bounds exceed realized mistakes", bounds_exceed_mistakes),
        (6, "biased estimator", biased_estimator),
        (7, "paired t-test", t_test),
        (8, "determinism and parsing", determinism_and_parsing),
        (9, "runtime sanity", runtime_sanity),
    ];
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("panicked: {msg}"))
        });
        failed += !outcome.pass as usize;
        println!(
            "criterion {id} [{}] {name} ({:.1}s): {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        if std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
            std::process::exit(1);
        }
    }
}
