use std::fmt;
use std::str::FromStr;

use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n − 1 denominator); zero for fewer than two
/// values.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Win,
    Draw,
    Lose,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Win => "win",
            Verdict::Draw => "draw",
            Verdict::Lose => "lose",
        })
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "win" => Ok(Verdict::Win),
            "draw" => Ok(Verdict::Draw),
            "lose" => Ok(Verdict::Lose),
            other => Err(Error::config(format!("unknown verdict '{other}'"))),
        }
    }
}

/// Outcome of a two-tailed paired t-test of `a` against `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    /// Two-tailed p-value.
    pub p: f64,
    pub df: usize,
    /// Mean of `a − b`.
    pub mean_difference: f64,
    pub verdict: Verdict,
}

impl TTest {
    /// One-tailed p-value for the alternative "mean of `a − b` is positive".
    pub fn p_greater(&self) -> f64 {
        if self.t == 0.0 && self.mean_difference == 0.0 {
            return if self.p == 1.0 { 0.5 } else { self.p / 2.0 };
        }
        if self.t > 0.0 {
            self.p / 2.0
        } else {
            1.0 - self.p / 2.0
        }
    }
}

pub const SIGNIFICANCE: f64 = 0.05;

/// Paired two-tailed Student t-test on per-run values, paired by position.
///
/// Differences with zero variance are handled by convention: all-zero
/// differences give `t = 0, p = 1`; a constant nonzero difference gives
/// `p = 0` and an infinite `t` with the sign of the difference.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::config(format!(
            "paired samples differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::config("a paired t-test needs at least two pairs"));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = diffs.len();
    let df = n - 1;
    let mean_difference = mean(&diffs);
    let sd = std_dev(&diffs);

    let (t, p) = if sd == 0.0 {
        if mean_difference == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY.copysign(mean_difference), 0.0)
        }
    } else {
        let t = mean_difference / (sd / (n as f64).sqrt());
        let dfv = df as f64;
        let p = beta_reg(dfv / 2.0, 0.5, dfv / (dfv + t * t));
        (t, p.clamp(0.0, 1.0))
    };

    let verdict = if p >= SIGNIFICANCE {
        Verdict::Draw
    } else if mean_difference > 0.0 {
        Verdict::Win
    } else {
        Verdict::Lose
    };
    Ok(TTest {
        t,
        p,
        df,
        mean_difference,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_draw() {
        let a = [0.7, 0.8, 0.75, 0.9];
        let r = paired_t_test(&a, &a).unwrap();
        assert_eq!((r.t, r.p, r.verdict), (0.0, 1.0, Verdict::Draw));
    }

    #[test]
    fn constant_positive_difference_wins() {
        let a = [2.0, 3.0, 4.0, 5.0, 6.0];
        let b = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = paired_t_test(&a, &b).unwrap();
        assert_eq!(r.p, 0.0);
        assert_eq!(r.verdict, Verdict::Win);
        assert!(r.t.is_infinite() && r.t > 0.0);
        let r = paired_t_test(&b, &a).unwrap();
        assert_eq!(r.verdict, Verdict::Lose);
    }

    #[test]
    fn ten_pairs_reference_values() {
        // Differences with mean 1 and sample standard deviation 1:
        // 1 ± 1/sqrt(10/9) * (±1 alternating) has exactly that shape.
        let half = 10usize / 2;
        let spread = (9.0f64 / 10.0).sqrt();
        let diffs: Vec<f64> = (0..10)
            .map(|i| if i < half { 1.0 + spread } else { 1.0 - spread })
            .collect();
        assert!((std_dev(&diffs) - 1.0).abs() < 1e-12);
        let b = vec![0.0; 10];
        let r = paired_t_test(&diffs, &b).unwrap();
        assert!((r.t - 3.162_277_660_168).abs() < 1e-9);
        // Two-tailed Student t, df = 9, reference value from an independent
        // statistics package.
        assert!((r.p - 0.011_507_985_169).abs() < 1e-9);
        assert_eq!(r.df, 9);
        assert_eq!(r.verdict, Verdict::Win);
        assert!((r.p_greater() - r.p / 2.0).abs() < 1e-15);
    }

    #[test]
    fn length_checks() {
        assert!(paired_t_test(&[1.0], &[2.0]).is_err());
        assert!(paired_t_test(&[1.0, 2.0], &[2.0]).is_err());
    }

    #[test]
    fn small_differences_draw() {
        let a = [0.5, 0.6, 0.4, 0.55];
        let b = [0.52, 0.58, 0.41, 0.54];
        assert_eq!(paired_t_test(&a, &b).unwrap().verdict, Verdict::Draw);
    }
}
