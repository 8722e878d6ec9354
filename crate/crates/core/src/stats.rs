//! The output-probability model of the controlled-bias generator and the
//! bias-corrected estimators built on it.
//!
//! A controlled-bias run emits an n-clue minimal puzzle with probability
//! proportional to P(n) = n!(cells-n)!/cells!, so adjacent clue counts
//! satisfy P(n+1)/P(n) = (n+1)/(cells-n). Correction factors cf(n) are
//! the reciprocal density, fixed to 1 at an anchor clue count; weighting
//! each sampled puzzle by cf(clues) recovers statistics of the uniform
//! distribution over all minimal puzzles.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::Error;

/// P(n+1)/P(n) as an exact rational.
pub fn transition_ratio(n: usize, cells: usize) -> Result<BigRational, Error> {
    if n >= cells {
        return Err(Error::InvalidRange(format!(
            "transition ratio needs n < cells, got n={n}, cells={cells}"
        )));
    }
    Ok(BigRational::new(
        BigInt::from(n + 1),
        BigInt::from(cells - n),
    ))
}

/// Correction factors for clue counts `n_min..=n_max`, anchored at
/// cf(anchor) = 1, evaluated by the exact recurrence
/// cf(n+1)/cf(n) = (cells-n)/(n+1) and converted to floats at the end.
pub fn correction_factors(
    n_min: usize,
    n_max: usize,
    anchor: usize,
    cells: usize,
) -> Result<Vec<(usize, f64)>, Error> {
    if !(n_min <= anchor && anchor <= n_max && n_max < cells) {
        return Err(Error::InvalidRange(format!(
            "need n_min <= anchor <= n_max < cells, got {n_min} <= {anchor} <= {n_max} < {cells}"
        )));
    }
    let model = BiasModel::new(cells, anchor);
    Ok((n_min..=n_max)
        .map(|n| (n, model.cf_f64(n)))
        .collect())
}

/// The bias model: board cell count plus the anchor for cf normalization.
#[derive(Clone, Copy, Debug)]
pub struct BiasModel {
    cells: usize,
    anchor: usize,
}

impl BiasModel {
    pub fn new(cells: usize, anchor: usize) -> BiasModel {
        assert!(anchor < cells, "anchor {anchor} must be below cells {cells}");
        BiasModel { cells, anchor }
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    /// cf(n) as an exact rational, cf(anchor) = 1.
    pub fn cf(&self, n: usize) -> BigRational {
        assert!(n < self.cells);
        let mut cf = BigRational::one();
        let mut m = self.anchor;
        while m < n {
            // cf(m+1) = cf(m) * (cells - m) / (m + 1)
            cf *= BigRational::new(BigInt::from(self.cells - m), BigInt::from(m + 1));
            m += 1;
        }
        while m > n {
            cf *= BigRational::new(BigInt::from(m), BigInt::from(self.cells - m + 1));
            m -= 1;
        }
        cf
    }

    pub fn cf_f64(&self, n: usize) -> f64 {
        self.cf(n).to_f64().expect("cf fits in f64")
    }
}

/// Streaming mean/variance accumulator with associative merge.
#[derive(Clone, Copy, Debug, Default)]
pub struct VarStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl VarStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &VarStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n1 = self.count as f64;
        let n2 = other.count as f64;
        let d = other.mean - self.mean;
        self.mean += d * n2 / (n1 + n2);
        self.m2 += other.m2 + d * d * n1 * n2 / (n1 + n2);
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Population standard deviation (biased, divides by the count).
    pub fn sd(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.m2 / self.count as f64).sqrt()
        }
    }
}

/// Per-clue-count tallies of one tracked variable: on(n), E(X,n),
/// sd(X,n).
#[derive(Clone, Debug, Default)]
pub struct SampleStats {
    bins: BTreeMap<usize, VarStats>,
}

impl SampleStats {
    pub fn record(&mut self, clue_count: usize, x: f64) {
        self.bins.entry(clue_count).or_default().push(x);
    }

    pub fn merge(&mut self, other: &SampleStats) {
        for (&n, vs) in &other.bins {
            self.bins.entry(n).or_default().merge(vs);
        }
    }

    pub fn on(&self, n: usize) -> u64 {
        self.bins.get(&n).map_or(0, |v| v.count())
    }

    pub fn total(&self) -> u64 {
        self.bins.values().map(|v| v.count()).sum()
    }

    pub fn bins(&self) -> impl Iterator<Item = (usize, &VarStats)> {
        self.bins.iter().map(|(&n, v)| (n, v))
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }
}

/// Weighted mean with an arbitrary per-clue-count weight.
pub fn weighted_mean(stats: &SampleStats, weight: impl Fn(usize) -> f64) -> Result<f64, Error> {
    if stats.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (n, vs) in stats.bins() {
        let w = vs.count() as f64 * weight(n);
        num += vs.mean() * w;
        den += w;
    }
    Ok(num / den)
}

/// Pooled within-bin weighted deviation:
/// sqrt( sum[sd(X,n)^2 on(n) cf(n)] / sum[on(n) cf(n)] ).
pub fn weighted_sd(stats: &SampleStats, weight: impl Fn(usize) -> f64) -> Result<f64, Error> {
    if stats.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (n, vs) in stats.bins() {
        let w = vs.count() as f64 * weight(n);
        num += vs.sd().powi(2) * w;
        den += w;
    }
    Ok((num / den).sqrt())
}

/// Bias-corrected mean of the tracked variable:
/// sum[E(X,n) on(n) cf(n)] / sum[on(n) cf(n)].
pub fn unbiased_mean(stats: &SampleStats, model: &BiasModel) -> Result<f64, Error> {
    weighted_mean(stats, |n| model.cf_f64(n))
}

/// Bias-corrected standard deviation, as the pooled within-bin form
/// sqrt( sum[sd(X,n)^2 on(n) cf(n)] / sum[on(n) cf(n)] ).
///
/// This pools the per-bin variances and omits the spread of the per-bin
/// means; see [`unbiased_total_sd`] for the full decomposition. For a
/// variable constant within each bin (such as the clue count itself)
/// this form is identically 0.
pub fn unbiased_sd(stats: &SampleStats, model: &BiasModel) -> Result<f64, Error> {
    weighted_sd(stats, |n| model.cf_f64(n))
}

/// Total-variance diagnostic: adds the between-bin term
/// sum[(E(X,n) - mean)^2 on(n) cf(n)] to the pooled form, giving the
/// standard deviation of X under the corrected distribution.
pub fn unbiased_total_sd(stats: &SampleStats, model: &BiasModel) -> Result<f64, Error> {
    let mean = unbiased_mean(stats, model)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (n, vs) in stats.bins() {
        let w = vs.count() as f64 * model.cf_f64(n);
        num += (vs.sd().powi(2) + (vs.mean() - mean).powi(2)) * w;
        den += w;
    }
    Ok((num / den).sqrt())
}

/// Uncorrected sample mean.
pub fn raw_mean(stats: &SampleStats) -> Result<f64, Error> {
    weighted_mean(stats, |_| 1.0)
}

/// Uncorrected pooled standard deviation.
pub fn raw_sd(stats: &SampleStats) -> Result<f64, Error> {
    weighted_sd(stats, |_| 1.0)
}

/// Clue-count histogram with a percentage view.
pub fn clue_histogram(clue_counts: &[usize]) -> Vec<(usize, u64, f64)> {
    let mut bins: BTreeMap<usize, u64> = BTreeMap::new();
    for &n in clue_counts {
        *bins.entry(n).or_default() += 1;
    }
    let total = clue_counts.len() as f64;
    bins.into_iter()
        .map(|(n, c)| (n, c, 100.0 * c as f64 / total))
        .collect()
}

/// p-value of a chi-square goodness-of-fit test of observed category
/// counts against the uniform distribution over `categories` cells.
/// `observed` lists the nonzero counts only; categories never hit
/// contribute their expectation to the statistic.
pub fn chi_square_uniform_p(observed: &[u64], categories: u64) -> Result<f64, Error> {
    if categories < 2 {
        return Err(Error::InvalidRange("need at least 2 categories".into()));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::EmptySample);
    }
    if observed.len() as u64 > categories {
        return Err(Error::InvalidRange(
            "more observed categories than categories".into(),
        ));
    }
    let e = total as f64 / categories as f64;
    let mut stat: f64 = observed
        .iter()
        .map(|&o| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let empty = categories - observed.len() as u64;
    stat += empty as f64 * e;
    let dist = ChiSquared::new((categories - 1) as f64).expect("df >= 1");
    Ok(1.0 - dist.cdf(stat))
}

/// Plain-text stats report: key-value summary plus a tab-separated per-n
/// table (n, on, %, cf, E(X,n), sd(X,n)).
pub fn stats_report(stats: &SampleStats, model: &BiasModel, var_name: &str) -> String {
    let mut out = String::new();
    let total = stats.total();
    let _ = writeln!(out, "variable\t{var_name}");
    let _ = writeln!(out, "sample_size\t{total}");
    let _ = writeln!(out, "cf_anchor\t{}", model.anchor());
    if let Ok(m) = raw_mean(stats) {
        let _ = writeln!(out, "raw_mean\t{m:.4}");
    }
    if let Ok(s) = raw_sd(stats) {
        let _ = writeln!(out, "raw_sd\t{s:.4}");
    }
    if let Ok(m) = unbiased_mean(stats, model) {
        let _ = writeln!(out, "unbiased_mean\t{m:.4}");
    }
    if let Ok(s) = unbiased_sd(stats, model) {
        let _ = writeln!(out, "unbiased_sd\t{s:.4}");
    }
    if let Ok(s) = unbiased_total_sd(stats, model) {
        let _ = writeln!(out, "unbiased_total_sd\t{s:.4}");
    }
    let _ = writeln!(out, "n\ton\tpct\tcf\tmean\tsd");
    for (n, vs) in stats.bins() {
        let _ = writeln!(
            out,
            "{n}\t{}\t{:.2}\t{:.6}\t{:.4}\t{:.4}",
            vs.count(),
            100.0 * vs.count() as f64 / total as f64,
            model.cf_f64(n),
            vs.mean(),
            vs.sd(),
        );
    }
    out
}
