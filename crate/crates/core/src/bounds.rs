//! Closed-form mistake bounds.
//!
//! Mistake counts enter as exact integers; nothing here is derived from
//! rounded rates.

use crate::expert::Beta;

/// Expected-mistake bound of a single RWM learner whose best expert made
/// `best_mistakes` mistakes: `(m ln(1/β) + ln n) / (1 − β)`.
pub fn rwm_mistake_bound(best_mistakes: u64, n: usize, beta: Beta) -> f64 {
    assert!(n >= 1, "expert count must be at least 1");
    (best_mistakes as f64 * beta.ln_inv() + (n as f64).ln()) / (1.0 - beta.get())
}

/// Total expected-mistake bound of a cascade with one learner per entry of
/// `best_per_learner`, each entry being the mistakes of that learner's best
/// expert on the instances it answered.
pub fn crwm_mistake_bound(best_per_learner: &[u64], n: usize, beta: Beta) -> f64 {
    assert!(n >= 1, "expert count must be at least 1");
    let total: u64 = best_per_learner.iter().sum();
    let learners = best_per_learner.len() as f64;
    (total as f64 * beta.ln_inv() + learners * (n as f64).ln()) / (1.0 - beta.get())
}

/// Right-hand side of the crossover inequality for a cascade over
/// `num_classes` classes: `L ln n / ln(1/β)`. For two classes this is
/// `2 ln n / ln(1/β)`.
pub fn crossover_threshold(n: usize, beta: Beta, num_classes: usize) -> f64 {
    num_classes as f64 * (n as f64).ln() / beta.ln_inv()
}

/// Two-class crossover predicate: `K₁ · gap > 2 ln n / ln(1/β)`, where
/// `gap` is the error-rate advantage of the region-best expert over the
/// overall-best expert inside the first learner's region of `K₁` instances.
/// When it holds (and the other regions show no advantage) the cascade bound
/// is strictly below the single-learner bound.
pub fn crossover_satisfied(k1: u64, gap: f64, n: usize, beta: Beta) -> bool {
    k1 as f64 * gap > crossover_threshold(n, beta, 2)
}

/// Per-region view of the crossover condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionStats {
    /// Instances routed to this learner (`K_j`).
    pub routed: u64,
    /// Mistakes of the overall-best expert inside the region.
    pub overall_best_mistakes: u64,
    /// Mistakes of the region-best expert inside the region.
    pub region_best_mistakes: u64,
}

impl RegionStats {
    /// `X_pj − X_kj`, zero for an empty region.
    pub fn gap(&self) -> f64 {
        if self.routed == 0 {
            0.0
        } else {
            (self.overall_best_mistakes as f64 - self.region_best_mistakes as f64)
                / self.routed as f64
        }
    }

    /// `K_j · (X_pj − X_kj)`, computed from the exact counts.
    pub fn excess(&self) -> u64 {
        self.overall_best_mistakes - self.region_best_mistakes
    }
}

/// Crossover predicate over all regions of a cascade with `regions.len() =
/// L + 1` learners: `Σ_j K_j (X_pj − X_kj) > L ln n / ln(1/β)`. This is the
/// exact condition for the cascade bound to undercut the single-learner
/// bound; with a single advantaged region it reduces to
/// [`crossover_satisfied`].
pub fn crossover_satisfied_regions(regions: &[RegionStats], n: usize, beta: Beta) -> bool {
    let excess: u64 = regions.iter().map(RegionStats::excess).sum();
    let num_classes = regions.len().saturating_sub(1);
    excess as f64 > crossover_threshold(n, beta, num_classes)
}

/// Smoothed rate `(errors + n_p) / (errors + correct + n_c)`.
pub fn biased_rate(errors: u64, correct: u64, n_p: f64, n_c: f64) -> f64 {
    (errors as f64 + n_p) / ((errors + correct) as f64 + n_c)
}

/// Biased false-positive rate with the default constants `n_p = 1`,
/// `n_c = 2`. An expert that never predicts positive scores 0.5 instead of a
/// perfect 0.
pub fn biased_fp_rate(fp: u64, tp: u64) -> f64 {
    biased_rate(fp, tp, 1.0, 2.0)
}

/// Biased false-negative rate, defined like [`biased_fp_rate`] on `(fn, tn)`.
pub fn biased_fn_rate(fn_: u64, tn: u64) -> f64 {
    biased_rate(fn_, tn, 1.0, 2.0)
}
