use crate::bounds::{biased_fn_rate, biased_fp_rate};
use crate::eval::experiment::PrequentialReport;
use crate::eval::prequential::Confusion;

/// Best per-expert rates over a pool. An FP or FN flag marks a rate that
/// beats the best overall error rate: evidence that no single expert is best
/// everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub best_fp: f64,
    pub best_fn: f64,
    pub best_error: f64,
    pub best_fp_biased: f64,
    pub best_fn_biased: f64,
    pub fp_beats_error: bool,
    pub fn_beats_error: bool,
}

/// Minimum over experts of each rate, with counts pooled across all runs of
/// the report. `None` when the report carries no per-expert statistics.
pub fn expert_rate_table(report: &PrequentialReport) -> Option<RateRow> {
    let n = report.runs.first()?.num_experts();
    if n == 0 {
        return None;
    }
    let mut pooled = vec![Confusion::default(); n];
    let mut mistakes = vec![0u64; n];
    let mut instances = 0u64;
    for run in &report.runs {
        instances += run.instances;
        for k in 0..n {
            let c = run.expert_confusion[k];
            pooled[k].tp += c.tp;
            pooled[k].fp += c.fp;
            pooled[k].tn += c.tn;
            pooled[k].fn_ += c.fn_;
            mistakes[k] += run.expert_total(k);
        }
    }
    let min = |it: &mut dyn Iterator<Item = f64>| it.fold(f64::INFINITY, f64::min);
    let best_fp = min(&mut pooled.iter().map(Confusion::fp_rate));
    let best_fn = min(&mut pooled.iter().map(Confusion::fn_rate));
    let best_error = min(&mut mistakes.iter().map(|&m| m as f64 / instances as f64));
    Some(RateRow {
        best_fp,
        best_fn,
        best_error,
        best_fp_biased: min(&mut pooled.iter().map(|c| biased_fp_rate(c.fp, c.tp))),
        best_fn_biased: min(&mut pooled.iter().map(|c| biased_fn_rate(c.fn_, c.tn))),
        fp_beats_error: best_fp < best_error,
        fn_beats_error: best_fn < best_error,
    })
}
