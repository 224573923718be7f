//! Combinatorial counts, deal-distribution checks, match-duration summaries
//! and the log-linear exponential tail fit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Hypergeometric};

use crate::engine::{MatchOutcome, Player, Settings, SUITS};
use crate::error::{Error, Result};

/// Trick count -> number of terminated matches of that length.
pub type Histogram = BTreeMap<u64, u64>;

/// Minimum bin count used by [`fit_exponential`].
pub const FIT_MIN_COUNT: u64 = 5;

fn factorial(n: usize) -> BigUint {
    (2..=n).fold(BigUint::from(1u32), |acc, k| acc * BigUint::from(k))
}

/// Number of distinct rank sequences of a full deck, `N! / ((4!)^R (N - 4R)!)`.
pub fn config_count(settings: &Settings) -> BigUint {
    let suits = factorial(SUITS).pow(settings.max_rank() as u32);
    factorial(settings.n_total()) / (suits * factorial(settings.ordinary_count()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpaceSizes {
    /// Every split of every arrangement, times two leader labels.
    pub total: BigUint,
    /// Splits leaving both decks nonempty, times two leader labels.
    pub playable: BigUint,
}

pub fn state_space_sizes(settings: &Settings) -> StateSpaceSizes {
    let c = config_count(settings);
    let n = settings.n_total();
    StateSpaceSizes {
        total: &c * BigUint::from(2 * (n + 1)),
        playable: c * BigUint::from(2 * (n - 1)),
    }
}

/// Probability of `k` successes when drawing `draws` items without replacement
/// from `population` items of which `successes` are successes. Zero outside the support.
pub fn hypergeometric_pmf(population: u64, successes: u64, draws: u64, k: u64) -> f64 {
    assert!(
        successes <= population && draws <= population,
        "hypergeometric parameters out of range"
    );
    let dist = Hypergeometric::new(population, successes, draws).expect("parameters validated above");
    dist.pmf(k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DurationSummary {
    pub matches: u64,
    pub terminated: u64,
    pub min: u64,
    pub max: u64,
    pub mode: u64,
    pub mean: f64,
    pub std_dev: f64,
    pub variance_to_mean: f64,
    pub wins_a_pct: f64,
    pub wins_b_pct: f64,
    pub histogram: Histogram,
    pub loop_count: u64,
    pub budget_exceeded_count: u64,
}

impl DurationSummary {
    /// One `key=value` line per statistic; the histogram is not included.
    pub fn to_kv_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "matches={}", self.matches);
        let _ = writeln!(out, "terminated={}", self.terminated);
        let _ = writeln!(out, "loops={}", self.loop_count);
        let _ = writeln!(out, "budget_exceeded={}", self.budget_exceeded_count);
        let _ = writeln!(out, "min={}", self.min);
        let _ = writeln!(out, "max={}", self.max);
        let _ = writeln!(out, "mode={}", self.mode);
        let _ = writeln!(out, "mean={:.6}", self.mean);
        let _ = writeln!(out, "std_dev={:.6}", self.std_dev);
        let _ = writeln!(out, "variance_to_mean={:.6}", self.variance_to_mean);
        let _ = writeln!(out, "wins_a_pct={:.4}", self.wins_a_pct);
        let _ = writeln!(out, "wins_b_pct={:.4}", self.wins_b_pct);
        out
    }

    /// Histogram as CSV with header `tricks,count`.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("tricks,count\n");
        for (tricks, count) in &self.histogram {
            let _ = writeln!(out, "{tricks},{count}");
        }
        out
    }
}

/// Order-independent running tally of match outcomes. Merging partial
/// accumulators in any grouping gives the same summary bit for bit.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DurationAccumulator {
    histogram: Histogram,
    wins_a: u64,
    wins_b: u64,
    loops: u64,
    budget_exceeded: u64,
}

impl DurationAccumulator {
    pub fn new() -> DurationAccumulator {
        DurationAccumulator::default()
    }

    pub fn push(&mut self, outcome: &MatchOutcome) {
        match *outcome {
            MatchOutcome::Terminated { winner, tricks } => {
                *self.histogram.entry(tricks).or_insert(0) += 1;
                match winner {
                    Player::A => self.wins_a += 1,
                    Player::B => self.wins_b += 1,
                }
            }
            MatchOutcome::Looped { .. } => self.loops += 1,
            MatchOutcome::BudgetExceeded { .. } => self.budget_exceeded += 1,
        }
    }

    pub fn merge(mut self, other: DurationAccumulator) -> DurationAccumulator {
        for (tricks, count) in other.histogram {
            *self.histogram.entry(tricks).or_insert(0) += count;
        }
        self.wins_a += other.wins_a;
        self.wins_b += other.wins_b;
        self.loops += other.loops;
        self.budget_exceeded += other.budget_exceeded;
        self
    }

    pub fn len(&self) -> u64 {
        self.wins_a + self.wins_b + self.loops + self.budget_exceeded
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Moments come from exact integer sums over the histogram, so the mean is
    /// the truncated expectation `sum n * rho(n)` over observed durations.
    /// With no terminated matches every statistic is reported as zero.
    pub fn summary(&self) -> Result<DurationSummary> {
        if self.is_empty() {
            return Err(Error::EmptyInput);
        }
        let terminated = self.wins_a + self.wins_b;
        let (mut s1, mut s2) = (0u128, 0u128);
        for (&n, &c) in &self.histogram {
            s1 += n as u128 * c as u128;
            s2 += (n as u128) * (n as u128) * c as u128;
        }
        let (mean, variance) = if terminated == 0 {
            (0.0, 0.0)
        } else {
            let t = terminated as u128;
            // t * sum(n^2) - (sum n)^2 is exact and non-negative
            let centered = t * s2 - s1 * s1;
            (s1 as f64 / t as f64, centered as f64 / (t * t) as f64)
        };
        let mode = self
            .histogram
            .iter()
            // max_by_key returns the last maximum; iterate in reverse so ties go to the smaller count
            .rev()
            .max_by_key(|(_, &c)| c)
            .map(|(&n, _)| n)
            .unwrap_or(0);
        let pct = |w: u64| {
            if terminated == 0 {
                0.0
            } else {
                100.0 * w as f64 / terminated as f64
            }
        };
        Ok(DurationSummary {
            matches: self.len(),
            terminated,
            min: self.histogram.keys().next().copied().unwrap_or(0),
            max: self.histogram.keys().next_back().copied().unwrap_or(0),
            mode,
            mean,
            std_dev: variance.sqrt(),
            variance_to_mean: if mean > 0.0 { variance / mean } else { 0.0 },
            wins_a_pct: pct(self.wins_a),
            wins_b_pct: pct(self.wins_b),
            histogram: self.histogram.clone(),
            loop_count: self.loops,
            budget_exceeded_count: self.budget_exceeded,
        })
    }
}

/// Summary statistics over the terminated outcomes; loops and budget overruns are only counted.
pub fn summarize(outcomes: &[MatchOutcome]) -> Result<DurationSummary> {
    let mut acc = DurationAccumulator::new();
    for outcome in outcomes {
        acc.push(outcome);
    }
    acc.summary()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    pub lambda: f64,
    pub fit_range: (u64, u64),
    pub r_squared: f64,
    /// `1 - exp(-lambda)`, the matching geometric success probability.
    pub p_geometric: f64,
    pub bins_used: usize,
}

/// Unweighted least squares of `ln(count)` against trick count over the bins in
/// `[n_lo, n_hi]` holding at least [`FIT_MIN_COUNT`] matches; `lambda` is minus the slope.
pub fn fit_exponential(histogram: &Histogram, n_lo: u64, n_hi: u64) -> Result<ExponentialFit> {
    let points: Vec<(f64, f64)> = histogram
        .range(n_lo..=n_hi)
        .filter(|(_, &c)| c >= FIT_MIN_COUNT)
        .map(|(&n, &c)| (n as f64, (c as f64).ln()))
        .collect();
    if points.len() < 2 || n_lo >= n_hi {
        return Err(Error::InsufficientBins {
            lo: n_lo,
            hi: n_hi,
            min_count: FIT_MIN_COUNT,
            found: points.len(),
        });
    }
    let k = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / k;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let lambda = -slope;
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::NonPositiveRate(lambda));
    }
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(ExponentialFit {
        lambda,
        fit_range: (n_lo, n_hi),
        r_squared,
        p_geometric: -(-lambda).exp_m1(),
        bins_used: points.len(),
    })
}

/// Geometric-model probability that a match lasts at least `n` tricks: `exp(-lambda (n - 1))`.
pub fn geometric_tail(lambda: f64, n: u64) -> f64 {
    assert!(
        lambda > 0.0 && n >= 1,
        "geometric_tail needs lambda > 0 and n >= 1"
    );
    (-lambda * (n - 1) as f64).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of `observed` counts against `probabilities`.
/// Adjacent bins are pooled left to right until every pooled expectation reaches `min_expected`.
pub fn chi_square_gof(observed: &[u64], probabilities: &[f64], min_expected: f64) -> ChiSquareTest {
    assert_eq!(observed.len(), probabilities.len());
    let total: u64 = observed.iter().sum();
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probabilities) {
        obs += o as f64;
        exp += p * total as f64;
        if exp >= min_expected {
            pooled.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if obs > 0.0 || exp > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => pooled.push((obs, exp)),
        }
    }
    let statistic: f64 = pooled
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let dof = pooled.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .expect("positive degrees of freedom")
            .sf(statistic)
    };
    ChiSquareTest {
        statistic,
        degrees_of_freedom: dof,
        p_value,
    }
}
