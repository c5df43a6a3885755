//! Command-line interface.
//!
//! Exit codes: 0 on success, 2 for usage, configuration, parse and I/O
//! errors, 3 when `--assert-bounds` finds a violated mistake bound.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::data::{ClassLabel, Dataset};
use crate::error::{Error, Result};
use crate::eval::{
    beta_sweep, compare, default_beta_grid, run_experiment, Algorithm, DataSource, Execution,
    ExperimentConfig, PrequentialReport, RunConfig, SyntheticExpertSpec, SyntheticStream,
};
use crate::expert::Beta;
use crate::io::{self, ClassSelector, CsvOptions, Format, WriteOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BOUND_VIOLATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "crwm",
    version,
    about = "Randomized and cascading weighted majority over streaming expert pools"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Prequential runs of one algorithm on one stream.
    Run {
        #[arg(long, default_value = "crwm")]
        algo: String,
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Exit with status 3 if any mistake bound is violated.
        #[arg(long)]
        assert_bounds: bool,
    },
    /// Several algorithms on the same stream, with paired t-tests.
    Compare {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "bagging,boosting,rwm,crwm"
        )]
        algos: Vec<String>,
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        assert_bounds: bool,
    },
    /// Mean accuracy over a grid of penalty factors.
    Sweep {
        #[arg(long, default_value = "crwm")]
        algo: String,
        /// Comma-separated grid; 0.1 to 0.9 in steps of 0.1 by default.
        #[arg(long, value_delimiter = ',')]
        betas: Vec<f64>,
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Mistake bounds, crossover condition and expert FP/FN rates.
    Bounds {
        #[arg(long, default_value = "crwm")]
        algo: String,
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        assert_bounds: bool,
    },
    /// Generate a synthetic expert stream as ARFF.
    Synth {
        #[command(flatten)]
        spec: SynthArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// Dataset file (ARFF, or CSV together with --schema).
    #[arg(long)]
    data: Option<PathBuf>,
    /// ARFF file whose header declares the attributes of a CSV dataset.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// The CSV file starts with a header row.
    #[arg(long)]
    csv_header: bool,
    /// Class attribute by name; the last attribute by default.
    #[arg(long, conflicts_with = "class_index")]
    class: Option<String>,
    /// Class attribute by zero-based position.
    #[arg(long)]
    class_index: Option<usize>,
    /// ARFF stream of recorded expert predictions (one nominal column per
    /// expert, then the class).
    #[arg(long)]
    oracle: Option<PathBuf>,
    #[command(flatten)]
    synth: SynthArgs,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Named synthetic stream: `crossover`.
    #[arg(long)]
    preset: Option<String>,
    /// Per-expert error rates by true class: `0.1,0.3;0.3,0.1`.
    #[arg(long)]
    errors: Option<String>,
    /// Class prior, uniform by default: `0.5,0.5`.
    #[arg(long)]
    prior: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    length: usize,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Expert pool or ensemble size.
    #[arg(long, default_value_t = 100)]
    experts: usize,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 50)]
    runs: usize,
    /// Seed of run 0; run r uses seed + r.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Cascade routing order, as class names or indices: `M,R` or `1,0`.
    #[arg(long, value_delimiter = ',')]
    class_order: Option<Vec<String>>,
    #[arg(long, default_value_t = 1.0)]
    poisson_mean: f64,
    /// Feature keep probability for expert masks, or `none`.
    #[arg(long, default_value = "0.7")]
    subspace: String,
    /// Present dataset instances in a per-run random order.
    #[arg(long)]
    shuffle: bool,
    /// Run sequentially instead of in parallel.
    #[arg(long)]
    sequential: bool,
    /// Output file; relative paths resolve against $CRWM_OUT_DIR if set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `machine` (versioned key-value text) or `table`.
    #[arg(long, default_value = "machine")]
    format: String,
    /// Include wall-clock timings (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
}

enum Source {
    Dataset(Dataset),
    Oracle(SyntheticStream),
    Synthetic(SyntheticExpertSpec),
}

impl Source {
    fn as_source(&self) -> DataSource<'_> {
        match self {
            Source::Dataset(d) => DataSource::Dataset(d),
            Source::Oracle(s) => DataSource::Oracle(s),
            Source::Synthetic(s) => DataSource::Synthetic(s),
        }
    }

    fn class_names(&self) -> Option<&[String]> {
        match self {
            Source::Dataset(d) => Some(d.schema.class_values()),
            _ => None,
        }
    }
}

fn parse_floats(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            let v = v.trim();
            io::values::parse_number(v)
                .ok_or_else(|| Error::config(format!("{what}: '{v}' is not a number")))
        })
        .collect()
}

impl SynthArgs {
    fn is_set(&self) -> bool {
        self.preset.is_some() || self.errors.is_some()
    }

    fn spec(&self, seed: u64) -> Result<SyntheticExpertSpec> {
        let mut spec = match (&self.preset, &self.errors) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "--preset and --errors are mutually exclusive",
                ))
            }
            (Some(p), None) if p.eq_ignore_ascii_case("crossover") => {
                SyntheticExpertSpec::crossover(self.length, seed)
            }
            (Some(p), None) => {
                return Err(Error::config(format!(
                    "unknown preset '{p}' (expected crossover)"
                )))
            }
            (None, Some(e)) => {
                let errors = e
                    .split(';')
                    .map(|row| parse_floats(row, "--errors"))
                    .collect::<Result<Vec<_>>>()?;
                let l = errors.first().map_or(0, Vec::len);
                SyntheticExpertSpec {
                    errors,
                    prior: vec![1.0 / l.max(1) as f64; l],
                    length: self.length,
                    seed,
                }
            }
            (None, None) => {
                return Err(Error::config(
                    "give --preset or --errors for a synthetic stream",
                ))
            }
        };
        if let Some(p) = &self.prior {
            spec.prior = parse_floats(p, "--prior")?;
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl SourceArgs {
    fn load(&self, seed: u64) -> Result<Source> {
        let given = [
            self.data.is_some(),
            self.oracle.is_some(),
            self.synth.is_set(),
        ];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(Error::config(
                "give exactly one input: --data, --oracle, or a synthetic spec (--preset / --errors)",
            ));
        }
        let class = match (&self.class, self.class_index) {
            (Some(name), _) => ClassSelector::Name(name.clone()),
            (None, Some(i)) => ClassSelector::Index(i),
            (None, None) => ClassSelector::Last,
        };
        if let Some(path) = &self.data {
            let csv = match &self.schema {
                Some(schema) => Some(CsvOptions {
                    schema: io::load_schema(schema, &class)?,
                    has_header: self.csv_header,
                }),
                None => None,
            };
            return Ok(Source::Dataset(io::load_dataset(
                path,
                &class,
                csv.as_ref(),
            )?));
        }
        if let Some(path) = &self.oracle {
            let data = io::load_dataset(path, &class, None)?;
            return Ok(Source::Oracle(SyntheticStream::from_dataset(&data)?));
        }
        Ok(Source::Synthetic(self.synth.spec(seed)?))
    }
}

impl CommonArgs {
    fn options(&self) -> Result<WriteOptions> {
        Ok(WriteOptions {
            format: self.format.parse::<Format>()?,
            timing: self.timing,
        })
    }

    fn config(&self, source: &Source) -> Result<ExperimentConfig> {
        let subspace = if self.subspace.eq_ignore_ascii_case("none") {
            None
        } else {
            Some(io::values::parse_number(&self.subspace).ok_or_else(|| {
                Error::config(format!("--subspace: '{}' is not a number", self.subspace))
            })?)
        };
        let class_order = match &self.class_order {
            None => None,
            Some(tokens) => Some(
                tokens
                    .iter()
                    .map(|t| class_token(t.trim(), source.class_names()))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let run = RunConfig {
            experts: self.experts,
            beta: Beta::new(self.beta)?,
            class_order,
            poisson_mean: self.poisson_mean,
            subspace,
            shuffle: self.shuffle,
        };
        if matches!(source, Source::Dataset(_)) {
            run.pool_config().validate()?;
        }
        Ok(ExperimentConfig {
            run,
            runs: self.runs,
            base_seed: self.seed,
            execution: if self.sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            },
        })
    }
}

fn class_token(t: &str, names: Option<&[String]>) -> Result<ClassLabel> {
    if let Some(i) = names.and_then(|n| n.iter().position(|v| v == t)) {
        return Ok(ClassLabel::from(i));
    }
    t.parse::<u32>()
        .map(ClassLabel)
        .map_err(|_| Error::config(format!("--class-order: unknown class '{t}'")))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => io::write_file(&io::resolve_output(path), text),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
            {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                }),
                _ => Ok(()),
            }
        }
    }
}

fn violations(report: &PrequentialReport) -> u32 {
    report.summary().bound_violations
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Run {
            algo,
            source,
            common,
            assert_bounds,
        } => {
            let algorithm: Algorithm = algo.parse()?;
            let opts = common.options()?;
            let src = source.load(common.seed)?;
            let report = run_experiment(algorithm, src.as_source(), &common.config(&src)?)?;
            emit(&io::write_report(&report, &opts), common.out.as_ref())?;
            Ok(bound_status(assert_bounds, violations(&report)))
        }
        Command::Compare {
            algos,
            source,
            common,
            assert_bounds,
        } => {
            let algorithms = algos
                .iter()
                .map(|a| a.parse())
                .collect::<Result<Vec<Algorithm>>>()?;
            let opts = common.options()?;
            let src = source.load(common.seed)?;
            let comparison = compare(&algorithms, src.as_source(), &common.config(&src)?)?;
            emit(
                &io::write_comparison(&comparison, &opts),
                common.out.as_ref(),
            )?;
            let v = comparison.reports.iter().map(violations).sum();
            Ok(bound_status(assert_bounds, v))
        }
        Command::Sweep {
            algo,
            betas,
            source,
            common,
        } => {
            let algorithm: Algorithm = algo.parse()?;
            let opts = common.options()?;
            let src = source.load(common.seed)?;
            let grid = if betas.is_empty() {
                default_beta_grid()
            } else {
                betas
            };
            let points = beta_sweep(algorithm, src.as_source(), &grid, &common.config(&src)?)?;
            let name = src.as_source().name();
            emit(
                &io::write_sweep(algorithm, &name, &points, &opts),
                common.out.as_ref(),
            )?;
            Ok(EXIT_OK)
        }
        Command::Bounds {
            algo,
            source,
            common,
            assert_bounds,
        } => {
            let algorithm: Algorithm = algo.parse()?;
            if !algorithm.uses_expert_advice() {
                return Err(Error::config(format!("{algorithm} has no mistake bound")));
            }
            let opts = common.options()?;
            let src = source.load(common.seed)?;
            let report = run_experiment(algorithm, src.as_source(), &common.config(&src)?)?;
            emit(&io::write_bounds(&report, &opts), common.out.as_ref())?;
            Ok(bound_status(assert_bounds, violations(&report)))
        }
        Command::Synth { spec, seed, out } => {
            let stream = spec.spec(seed)?.generate()?;
            emit(
                &io::write_arff(&stream.to_dataset("synthetic")),
                out.as_ref(),
            )?;
            Ok(EXIT_OK)
        }
    }
}

fn bound_status(assert_bounds: bool, violations: u32) -> i32 {
    if assert_bounds && violations > 0 {
        eprintln!("crwm: {violations} mistake bound violation(s)");
        EXIT_BOUND_VIOLATION
    } else {
        EXIT_OK
    }
}

/// Parses `args` (program name first) and runs the command. Diagnostics go
/// to stderr; the return value is the process exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("crwm: {e}");
            EXIT_USAGE
        }
    }
}
