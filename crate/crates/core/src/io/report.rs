//! Report serialization.
//!
//! The machine format is line-oriented text:
//!
//! ```text
//! crwm-report 1
//! algorithm = crwm
//! ...
//! [run 0]
//! seed = 1
//! ...
//! expert.0 = 4 3 0 ; 10 2 30 1
//! ```
//!
//! Floats are written in shortest round-trip form so that reading a report
//! back reproduces every value exactly. `[summary]` sections are derived
//! and ignored on read. Wall-clock timings are only written on request,
//! which keeps repeated runs byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::cascade::ModelState;
use crate::data::ClassLabel;
use crate::error::{Error, Result};
use crate::eval::{
    expert_rate_table, Algorithm, Comparison, Confusion, PrequentialReport, ReportHeader,
    RunBounds, RunReport, SweepPoint, REPORT_VERSION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Machine,
    Table,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "machine" | "kv" => Ok(Format::Machine),
            "table" | "human" => Ok(Format::Table),
            other => Err(Error::config(format!(
                "unknown format '{other}' (expected machine or table)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WriteOptions {
    pub format: Format,
    /// Include wall-clock seconds. Output is then no longer reproducible.
    pub timing: bool,
}

impl WriteOptions {
    pub fn machine() -> Self {
        WriteOptions::default()
    }

    pub fn table() -> Self {
        WriteOptions {
            format: Format::Table,
            timing: false,
        }
    }
}

const REPORT_MAGIC: &str = "crwm-report";
const MODEL_MAGIC: &str = "crwm-model";
const COMPARISON_MAGIC: &str = "crwm-comparison";
const SWEEP_MAGIC: &str = "crwm-sweep";
const BOUNDS_MAGIC: &str = "crwm-bounds";

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:?}")
}

/// Six significant digits, for human tables.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..=9).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn join_floats(xs: &[f64]) -> String {
    xs.iter()
        .map(|&x| fmt_float(x))
        .collect::<Vec<_>>()
        .join(" ")
}

fn kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key} = {value}");
}

fn write_header(out: &mut String, h: &ReportHeader, timing: bool) {
    let _ = writeln!(out, "{REPORT_MAGIC} {}", h.version);
    kv(out, "algorithm", h.algorithm);
    kv(out, "dataset", escape(&h.dataset));
    kv(out, "instances", h.instances);
    kv(out, "classes", h.num_classes);
    kv(out, "experts", h.experts);
    kv(out, "beta", fmt_float(h.beta));
    kv(out, "class_order", join(&h.class_order));
    kv(out, "runs", h.runs);
    kv(out, "base_seed", h.base_seed);
    kv(out, "poisson_mean", fmt_float(h.poisson_mean));
    kv(
        out,
        "subspace",
        h.subspace.map_or("none".to_string(), fmt_float),
    );
    kv(out, "shuffle", h.shuffle);
    kv(out, "timing", if timing { "included" } else { "omitted" });
}

fn write_run(out: &mut String, r: &RunReport, timing: bool) {
    let _ = writeln!(out, "[run {}]", r.run);
    kv(out, "seed", r.seed);
    kv(out, "instances", r.instances);
    kv(out, "mistakes", r.mistakes);
    kv(out, "accuracy", fmt_float(r.accuracy()));
    kv(out, "expected_mistakes", fmt_float(r.expected_mistakes));
    kv(out, "routed", join(&r.routed));
    kv(out, "learner_expected", join_floats(&r.learner_expected));
    if let Some(b) = &r.bounds {
        kv(out, "bound.rwm", fmt_float(b.rwm));
        if let Some(c) = b.crwm {
            kv(out, "bound.crwm", fmt_float(c));
        }
        kv(out, "bound.learner", join_floats(&b.learner));
        if let Some(c) = b.crossover {
            kv(out, "bound.crossover", c);
        }
        kv(out, "bound.violations", b.violations);
    }
    if timing {
        kv(out, "seconds", fmt_float(r.seconds));
    }
    for (k, (row, c)) in r
        .expert_mistakes
        .iter()
        .zip(&r.expert_confusion)
        .enumerate()
    {
        let _ = writeln!(
            out,
            "expert.{k} = {} ; {} {} {} {}",
            join(row),
            c.tp,
            c.fp,
            c.tn,
            c.fn_
        );
    }
}

fn write_summary_kv(out: &mut String, report: &PrequentialReport, timing: bool) {
    if report.runs.is_empty() {
        return;
    }
    let s = report.summary();
    out.push_str("[summary]\n");
    kv(out, "mean_accuracy", fmt_float(s.mean_accuracy));
    kv(out, "std_accuracy", fmt_float(s.std_accuracy));
    kv(out, "mean_mistakes", fmt_float(s.mean_mistakes));
    kv(
        out,
        "mean_expected_mistakes",
        fmt_float(s.mean_expected_mistakes),
    );
    if let Some(b) = s.mean_rwm_bound {
        kv(out, "mean_rwm_bound", fmt_float(b));
    }
    if let Some(b) = s.mean_crwm_bound {
        kv(out, "mean_crwm_bound", fmt_float(b));
    }
    if let Some(c) = s.crossover_rate {
        kv(out, "crossover_rate", fmt_float(c));
    }
    kv(out, "bound_violations", s.bound_violations);
    kv(out, "realized_above_bound", s.realized_above_bound);
    if timing {
        kv(out, "mean_seconds", fmt_float(s.mean_seconds));
    }
}

/// Renders a report. The machine form can be read back with
/// [`read_report`].
pub fn write_report(report: &PrequentialReport, opts: &WriteOptions) -> String {
    match opts.format {
        Format::Machine => {
            let mut out = String::new();
            write_header(&mut out, &report.header, opts.timing);
            for r in &report.runs {
                write_run(&mut out, r, opts.timing);
            }
            write_summary_kv(&mut out, report, opts.timing);
            out
        }
        Format::Table => report_table(report, opts.timing),
    }
}

/// Values are written verbatim unless they contain characters that would
/// break the line structure.
fn escape(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_control() { ' ' } else { c })
        .collect::<String>()
        .trim()
        .to_string()
}

struct Entry {
    line: usize,
    value: String,
}

struct Section {
    line: usize,
    name: String,
    entries: BTreeMap<String, Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Result<Entry> {
        self.entries.remove(key).ok_or_else(|| Error::Report {
            line: self.line,
            message: format!("[{}] is missing '{key}'", self.name),
        })
    }

    fn take_opt(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn parse<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let e = self.take(key)?;
        parse_value(&e, key)
    }

    fn list<T: FromStr>(&mut self, key: &str) -> Result<Vec<T>> {
        let e = self.take(key)?;
        parse_list(&e, key)
    }

    fn finish(self) -> Result<()> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((key, e)) => Err(Error::Report {
                line: e.line,
                message: format!("unexpected key '{key}' in [{}]", self.name),
            }),
        }
    }
}

fn parse_value<T: FromStr>(e: &Entry, key: &str) -> Result<T> {
    e.value.parse().map_err(|_| Error::Report {
        line: e.line,
        message: format!("invalid value '{}' for '{key}'", e.value),
    })
}

fn parse_list<T: FromStr>(e: &Entry, key: &str) -> Result<Vec<T>> {
    e.value
        .split_whitespace()
        .map(|v| {
            v.parse().map_err(|_| Error::Report {
                line: e.line,
                message: format!("invalid element '{v}' in '{key}'"),
            })
        })
        .collect()
}

/// Splits a document into its magic line and sections. Keys before the
/// first bracketed section belong to a section named `header`.
fn split_sections(text: &str, magic: &str) -> Result<(u32, Vec<Section>)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (first_no, first) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .ok_or(Error::Report {
            line: 1,
            message: "empty document".into(),
        })?;
    let version = first
        .strip_prefix(magic)
        .and_then(|v| v.trim().parse::<u32>().ok())
        .ok_or_else(|| Error::Report {
            line: first_no,
            message: format!("expected '{magic} <version>'"),
        })?;
    if version != REPORT_VERSION {
        return Err(Error::Report {
            line: first_no,
            message: format!("unsupported version {version}"),
        });
    }
    let mut sections = vec![Section {
        line: first_no,
        name: "header".into(),
        entries: BTreeMap::new(),
    }];
    for (no, line) in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            sections.push(Section {
                line: no,
                name: name.trim().to_string(),
                entries: BTreeMap::new(),
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Report {
            line: no,
            message: "expected 'key = value'".into(),
        })?;
        let key = key.trim().to_string();
        let section = sections.last_mut().expect("header section");
        if section.entries.contains_key(&key) {
            return Err(Error::Report {
                line: no,
                message: format!("duplicate key '{key}'"),
            });
        }
        section.entries.insert(
            key,
            Entry {
                line: no,
                value: value.trim().to_string(),
            },
        );
    }
    Ok((version, sections))
}

fn read_header(s: &mut Section, version: u32) -> Result<(ReportHeader, bool)> {
    let subspace = s.take("subspace")?;
    let subspace = if subspace.value == "none" {
        None
    } else {
        Some(parse_value(&subspace, "subspace")?)
    };
    let timing = s.take("timing")?;
    let timing = match timing.value.as_str() {
        "included" => true,
        "omitted" => false,
        _ => {
            return Err(Error::Report {
                line: timing.line,
                message: "timing must be 'included' or 'omitted'".into(),
            })
        }
    };
    let header = ReportHeader {
        version,
        algorithm: s.parse("algorithm")?,
        dataset: s.take("dataset")?.value,
        instances: s.parse("instances")?,
        num_classes: s.parse("classes")?,
        experts: s.parse("experts")?,
        beta: s.parse("beta")?,
        class_order: s
            .list::<u32>("class_order")?
            .into_iter()
            .map(ClassLabel)
            .collect(),
        runs: s.parse("runs")?,
        base_seed: s.parse("base_seed")?,
        poisson_mean: s.parse("poisson_mean")?,
        subspace,
        shuffle: s.parse("shuffle")?,
    };
    Ok((header, timing))
}

fn read_run(mut s: Section, timing: bool) -> Result<RunReport> {
    let run = s
        .name
        .strip_prefix("run ")
        .and_then(|r| r.trim().parse().ok())
        .ok_or_else(|| Error::Report {
            line: s.line,
            message: format!("unknown section [{}]", s.name),
        })?;
    let seed = s.parse("seed")?;
    let instances = s.parse("instances")?;
    let mistakes = s.parse("mistakes")?;
    s.take("accuracy")?;
    let expected_mistakes = s.parse("expected_mistakes")?;
    let routed: Vec<u64> = s.list("routed")?;
    let learner_expected: Vec<f64> = s.list("learner_expected")?;
    let bounds = match s.take_opt("bound.rwm") {
        Some(e) => Some(RunBounds {
            rwm: parse_value(&e, "bound.rwm")?,
            crwm: s
                .take_opt("bound.crwm")
                .map(|e| parse_value(&e, "bound.crwm"))
                .transpose()?,
            learner: s.list("bound.learner")?,
            crossover: s
                .take_opt("bound.crossover")
                .map(|e| parse_value(&e, "bound.crossover"))
                .transpose()?,
            violations: s.parse("bound.violations")?,
        }),
        None => None,
    };
    let seconds = if timing { s.parse("seconds")? } else { 0.0 };
    let mut expert_mistakes = Vec::new();
    let mut expert_confusion = Vec::new();
    for k in 0.. {
        let key = format!("expert.{k}");
        let Some(e) = s.take_opt(&key) else { break };
        let (row, conf) = e.value.split_once(';').ok_or_else(|| Error::Report {
            line: e.line,
            message: format!("'{key}' needs 'mistakes ; tp fp tn fn'"),
        })?;
        let row: Vec<u64> = parse_list(
            &Entry {
                line: e.line,
                value: row.to_string(),
            },
            &key,
        )?;
        let conf: Vec<u64> = parse_list(
            &Entry {
                line: e.line,
                value: conf.to_string(),
            },
            &key,
        )?;
        if row.len() != routed.len() || conf.len() != 4 {
            return Err(Error::Report {
                line: e.line,
                message: format!("'{key}' has the wrong number of fields"),
            });
        }
        expert_mistakes.push(row);
        expert_confusion.push(Confusion {
            tp: conf[0],
            fp: conf[1],
            tn: conf[2],
            fn_: conf[3],
        });
    }
    if learner_expected.len() != routed.len() {
        return Err(Error::Report {
            line: s.line,
            message: "routed and learner_expected differ in length".into(),
        });
    }
    s.finish()?;
    Ok(RunReport {
        run,
        seed,
        instances,
        mistakes,
        expected_mistakes,
        routed,
        learner_expected,
        expert_mistakes,
        expert_confusion,
        bounds,
        seconds,
    })
}

/// Parses the machine format written by [`write_report`].
pub fn read_report(text: &str) -> Result<PrequentialReport> {
    let (version, sections) = split_sections(text, REPORT_MAGIC)?;
    let mut sections = sections.into_iter();
    let mut head = sections.next().expect("header section");
    let (header, timing) = read_header(&mut head, version)?;
    head.finish()?;
    let mut runs = Vec::new();
    for s in sections {
        if s.name == "summary" {
            continue;
        }
        runs.push(read_run(s, timing)?);
    }
    Ok(PrequentialReport { header, runs })
}

/// Checkpoint of a cascade: class order, β, instance counter and every
/// learner's log-weights.
pub fn write_model_state(state: &ModelState) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MODEL_MAGIC} {REPORT_VERSION}");
    kv(&mut out, "classes", state.num_classes);
    kv(&mut out, "beta", fmt_float(state.beta));
    kv(&mut out, "instances", state.instances);
    kv(&mut out, "class_order", join(&state.class_order));
    for (j, lw) in state.log_weights.iter().enumerate() {
        kv(&mut out, &format!("learner.{j}"), join_floats(lw));
    }
    out
}

pub fn read_model_state(text: &str) -> Result<ModelState> {
    let (_, sections) = split_sections(text, MODEL_MAGIC)?;
    let mut s = sections.into_iter().next().expect("header section");
    let num_classes = s.parse("classes")?;
    let beta = s.parse("beta")?;
    let instances = s.parse("instances")?;
    let class_order = s
        .list::<u32>("class_order")?
        .into_iter()
        .map(ClassLabel)
        .collect();
    let mut log_weights = Vec::new();
    for j in 0.. {
        match s.take_opt(&format!("learner.{j}")) {
            Some(e) => log_weights.push(parse_list(&e, "learner")?),
            None => break,
        }
    }
    s.finish()?;
    Ok(ModelState {
        num_classes,
        class_order,
        beta,
        instances,
        log_weights,
    })
}

/// Right-aligned plain-text table.
struct TextTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl TextTable {
    fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        TextTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn render(&self, out: &mut String) {
        let cols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String], out: &mut String| {
            let parts: Vec<String> = (0..cols)
                .map(|i| {
                    let cell = cells.get(i).map_or("", String::as_str);
                    if i == 0 {
                        format!("{cell:<w$}", w = widths[i])
                    } else {
                        format!("{cell:>w$}", w = widths[i])
                    }
                })
                .collect();
            out.push_str(parts.join("  ").trim_end());
            out.push('\n');
        };
        line(&self.header, out);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&rule.join("  "));
        out.push('\n');
        for row in &self.rows {
            line(row, out);
        }
    }
}

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

fn opt(x: Option<f64>) -> String {
    x.map_or("-".to_string(), fmt_sig)
}

fn report_table(report: &PrequentialReport, timing: bool) -> String {
    let h = &report.header;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} on {}: {} instances, {} classes, {} experts, beta {}, {} runs from seed {}",
        h.algorithm,
        h.dataset,
        h.instances,
        h.num_classes,
        h.experts,
        fmt_sig(h.beta),
        report.runs.len(),
        h.base_seed
    );
    if report.runs.is_empty() {
        return out;
    }
    out.push('\n');
    let mut cols = vec![
        "run",
        "seed",
        "accuracy %",
        "mistakes",
        "expected",
        "rwm bound",
        "crwm bound",
        "crossover",
    ];
    if timing {
        cols.push("seconds");
    }
    let mut table = TextTable::new(cols);
    for r in &report.runs {
        let b = r.bounds.as_ref();
        let mut row = vec![
            r.run.to_string(),
            r.seed.to_string(),
            pct(r.accuracy()),
            r.mistakes.to_string(),
            fmt_sig(r.expected_mistakes),
            opt(b.map(|b| b.rwm)),
            opt(b.and_then(|b| b.crwm)),
            b.and_then(|b| b.crossover)
                .map_or("-".into(), |c| c.to_string()),
        ];
        if timing {
            row.push(format!("{:.3}", r.seconds));
        }
        table.push(row);
    }
    table.render(&mut out);
    let s = report.summary();
    out.push('\n');
    let _ = writeln!(
        out,
        "accuracy: {} ± {} %",
        pct(s.mean_accuracy),
        pct(s.std_accuracy)
    );
    let _ = writeln!(
        out,
        "mistakes: {} realized, {} expected",
        fmt_sig(s.mean_mistakes),
        fmt_sig(s.mean_expected_mistakes)
    );
    if s.mean_rwm_bound.is_some() {
        let _ = writeln!(
            out,
            "bound violations: {}, runs at or above own bound: {}",
            s.bound_violations, s.realized_above_bound
        );
    }
    if timing {
        let _ = writeln!(out, "mean seconds per run: {:.3}", s.mean_seconds);
    }
    out
}

/// Accuracy battery with paired t-tests of the reference algorithm against
/// each other algorithm.
pub fn write_comparison(c: &Comparison, opts: &WriteOptions) -> String {
    let mut out = String::new();
    let dataset = c
        .reports
        .first()
        .map_or(String::new(), |r| r.header.dataset.clone());
    match opts.format {
        Format::Machine => {
            let _ = writeln!(out, "{COMPARISON_MAGIC} {REPORT_VERSION}");
            kv(&mut out, "dataset", escape(&dataset));
            kv(&mut out, "reference", c.reference);
            let algos: Vec<String> = c
                .reports
                .iter()
                .map(|r| r.header.algorithm.to_string())
                .collect();
            kv(&mut out, "algorithms", algos.join(" "));
            kv(
                &mut out,
                "runs",
                c.reports.first().map_or(0, |r| r.runs.len()),
            );
            for r in &c.reports {
                let s = r.summary();
                let _ = writeln!(out, "[accuracy {}]", r.header.algorithm);
                kv(&mut out, "mean", fmt_float(s.mean_accuracy));
                kv(&mut out, "std", fmt_float(s.std_accuracy));
                if opts.timing {
                    kv(&mut out, "mean_seconds", fmt_float(s.mean_seconds));
                }
            }
            for (a, t) in &c.tests {
                let _ = writeln!(out, "[test {} vs {a}]", c.reference);
                kv(&mut out, "t", fmt_float(t.t));
                kv(&mut out, "p", fmt_float(t.p));
                kv(&mut out, "df", t.df);
                kv(&mut out, "mean_difference", fmt_float(t.mean_difference));
                kv(&mut out, "verdict", t.verdict);
            }
        }
        Format::Table => {
            let runs = c.reports.first().map_or(0, |r| r.runs.len());
            let _ = writeln!(out, "accuracy on {dataset} over {runs} runs\n");
            let mut cols = vec!["algorithm", "accuracy %", "std %"];
            if opts.timing {
                cols.push("seconds/run");
            }
            let mut table = TextTable::new(cols);
            for r in &c.reports {
                let s = r.summary();
                let mut row = vec![
                    r.header.algorithm.to_string(),
                    pct(s.mean_accuracy),
                    pct(s.std_accuracy),
                ];
                if opts.timing {
                    row.push(format!("{:.4}", s.mean_seconds));
                }
                table.push(row);
            }
            table.render(&mut out);
            if !c.tests.is_empty() {
                let _ = writeln!(
                    out,
                    "\npaired t-tests, {} against each algorithm (two-tailed, 0.05)\n",
                    c.reference
                );
                let mut table = TextTable::new(["versus", "mean diff %", "t", "p", "verdict"]);
                for (a, t) in &c.tests {
                    table.push(vec![
                        a.to_string(),
                        pct(t.mean_difference),
                        fmt_sig(t.t),
                        fmt_sig(t.p),
                        t.verdict.to_string(),
                    ]);
                }
                table.render(&mut out);
            }
        }
    }
    out
}

/// Mean accuracy per β.
pub fn write_sweep(
    algorithm: Algorithm,
    dataset: &str,
    points: &[SweepPoint],
    opts: &WriteOptions,
) -> String {
    let mut out = String::new();
    match opts.format {
        Format::Machine => {
            let _ = writeln!(out, "{SWEEP_MAGIC} {REPORT_VERSION}");
            kv(&mut out, "algorithm", algorithm);
            kv(&mut out, "dataset", escape(dataset));
            for p in points {
                let _ = writeln!(out, "[beta {}]", fmt_float(p.beta));
                kv(&mut out, "mean_accuracy", fmt_float(p.mean_accuracy));
                kv(&mut out, "std_accuracy", fmt_float(p.std_accuracy));
            }
        }
        Format::Table => {
            let _ = writeln!(out, "{algorithm} on {dataset}: accuracy against beta\n");
            let mut table = TextTable::new(["beta", "accuracy %", "std %"]);
            for p in points {
                table.push(vec![
                    fmt_sig(p.beta),
                    pct(p.mean_accuracy),
                    pct(p.std_accuracy),
                ]);
            }
            table.render(&mut out);
        }
    }
    out
}

/// Bound comparison for a cascade report: mean single-learner and cascade
/// bounds, realized mistakes, the crossover predicate, and the per-expert
/// FP/FN rates next to the best overall error rate.
pub fn write_bounds(report: &PrequentialReport, opts: &WriteOptions) -> String {
    let s = report.summary();
    let rates = expert_rate_table(report);
    let all_crossover = report
        .runs
        .iter()
        .all(|r| r.bounds.as_ref().and_then(|b| b.crossover).unwrap_or(false));
    let crwm_below = report.runs.iter().all(|r| {
        r.bounds
            .as_ref()
            .is_some_and(|b| b.crwm.is_some_and(|c| c < b.rwm))
    });
    let mut out = String::new();
    match opts.format {
        Format::Machine => {
            let _ = writeln!(out, "{BOUNDS_MAGIC} {REPORT_VERSION}");
            kv(&mut out, "algorithm", report.header.algorithm);
            kv(&mut out, "dataset", escape(&report.header.dataset));
            kv(&mut out, "experts", report.header.experts);
            kv(&mut out, "beta", fmt_float(report.header.beta));
            kv(&mut out, "runs", report.runs.len());
            if !report.runs.is_empty() {
                kv(&mut out, "mean_mistakes", fmt_float(s.mean_mistakes));
                kv(
                    &mut out,
                    "mean_expected_mistakes",
                    fmt_float(s.mean_expected_mistakes),
                );
                if let Some(b) = s.mean_rwm_bound {
                    kv(&mut out, "mean_rwm_bound", fmt_float(b));
                }
                if let Some(b) = s.mean_crwm_bound {
                    kv(&mut out, "mean_crwm_bound", fmt_float(b));
                }
                if let Some(c) = s.crossover_rate {
                    kv(&mut out, "crossover_rate", fmt_float(c));
                }
                kv(&mut out, "crossover_satisfied", all_crossover);
                kv(&mut out, "crwm_bound_below_rwm", crwm_below);
                kv(&mut out, "bound_violations", s.bound_violations);
            }
            if let Some(r) = rates {
                out.push_str("[rates]\n");
                kv(&mut out, "best_fp", fmt_float(r.best_fp));
                kv(&mut out, "best_fn", fmt_float(r.best_fn));
                kv(&mut out, "best_error", fmt_float(r.best_error));
                kv(&mut out, "best_fp_biased", fmt_float(r.best_fp_biased));
                kv(&mut out, "best_fn_biased", fmt_float(r.best_fn_biased));
                kv(&mut out, "fp_beats_error", r.fp_beats_error);
                kv(&mut out, "fn_beats_error", r.fn_beats_error);
            }
        }
        Format::Table => {
            let h = &report.header;
            let _ = writeln!(
                out,
                "mistake bounds for {} on {} ({} experts, beta {}, {} runs)\n",
                h.algorithm,
                h.dataset,
                h.experts,
                fmt_sig(h.beta),
                report.runs.len()
            );
            let mut table = TextTable::new([
                "realized",
                "expected",
                "rwm bound",
                "crwm bound",
                "crossover",
            ]);
            if !report.runs.is_empty() {
                table.push(vec![
                    fmt_sig(s.mean_mistakes),
                    fmt_sig(s.mean_expected_mistakes),
                    opt(s.mean_rwm_bound),
                    opt(s.mean_crwm_bound),
                    s.crossover_rate.map_or("-".into(), |c| {
                        format!("{}/{}", (c * s.runs as f64).round(), s.runs)
                    }),
                ]);
            }
            table.render(&mut out);
            if let Some(r) = rates {
                out.push_str("\nbest expert rates (pooled over runs)\n\n");
                let mut table = TextTable::new(["rate", "plain", "biased", "beats error"]);
                table.push(vec![
                    "fp".into(),
                    fmt_sig(r.best_fp),
                    fmt_sig(r.best_fp_biased),
                    r.fp_beats_error.to_string(),
                ]);
                table.push(vec![
                    "fn".into(),
                    fmt_sig(r.best_fn),
                    fmt_sig(r.best_fn_biased),
                    r.fn_beats_error.to_string(),
                ]);
                table.push(vec![
                    "error".into(),
                    fmt_sig(r.best_error),
                    "-".into(),
                    "-".into(),
                ]);
                table.render(&mut out);
            }
        }
    }
    out
}
