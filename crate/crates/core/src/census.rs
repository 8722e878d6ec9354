//! Census estimators: from a controlled-bias sample with grid
//! bookkeeping to the mean number of n-clue minimal puzzles per complete
//! grid, expected tries per hit, and grand totals.
//!
//! The inversion rests on the output probability of the generator: an
//! n-clue minimal puzzle of a fixed grid is emitted with probability
//! P(n) = n!(cells-n)!/cells! per grid attempt, so
//! count(n) = on(n) / (grids_attempted * P(n)).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::Error;

/// C(n, k) in exact big-integer arithmetic.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Per-grid output probability of an n-clue minimal puzzle:
/// P(n) = n!(cells-n)!/cells! = 1/C(cells, n).
pub fn single_grid_p(n: usize, cells: usize) -> Result<BigRational, Error> {
    if n > cells {
        return Err(Error::InvalidRange(format!(
            "P(n) needs n <= cells, got n={n}, cells={cells}"
        )));
    }
    Ok(BigRational::new(BigInt::one(), binomial(cells, n)))
}

/// One clue-count row of a census estimate.
#[derive(Clone, Copy, Debug)]
pub struct CensusRow {
    pub on: u64,
    /// Mean n-clue minimal puzzles per complete grid.
    pub count: f64,
    /// Relative error of `count`, Poisson approximation 1/sqrt(on).
    pub rel_err: f64,
}

#[derive(Clone, Debug)]
pub struct CensusEstimate {
    pub cells: usize,
    pub rows: BTreeMap<usize, CensusRow>,
    pub success_rate: f64,
    pub total_outputs: u64,
    pub total_grids_consumed: u64,
}

/// Outputs per grid attempt.
pub fn estimate_success_rate(total_outputs: u64, total_grids_consumed: u64) -> Result<f64, Error> {
    if total_outputs == 0 || total_grids_consumed == 0 {
        return Err(Error::EmptySample);
    }
    Ok(total_outputs as f64 / total_grids_consumed as f64)
}

/// Inverts the output probabilities: count(n) = (on(n)/total) * s / P(n).
pub fn estimate_counts_per_grid(
    on: &BTreeMap<usize, u64>,
    total_outputs: u64,
    success_rate: f64,
    cells: usize,
    total_grids_consumed: u64,
) -> Result<CensusEstimate, Error> {
    if total_outputs == 0 {
        return Err(Error::EmptySample);
    }
    let mut rows = BTreeMap::new();
    for (&n, &o) in on {
        if o == 0 {
            continue;
        }
        let p = single_grid_p(n, cells)?.to_f64().expect("P(n) fits in f64");
        rows.insert(
            n,
            CensusRow {
                on: o,
                count: o as f64 / total_outputs as f64 * success_rate / p,
                rel_err: 1.0 / (o as f64).sqrt(),
            },
        );
    }
    Ok(CensusEstimate {
        cells,
        rows,
        success_rate,
        total_outputs,
        total_grids_consumed,
    })
}

/// Expected random n-subsets of a grid per minimal puzzle found:
/// tries(n) = C(cells, n) / count(n).
pub fn estimate_tries(count: f64, cells: usize, n: usize) -> Result<f64, Error> {
    if count <= 0.0 {
        return Err(Error::EmptySample);
    }
    Ok(binomial(cells, n).to_f64().expect("binomial fits in f64") / count)
}

/// Total minimal puzzles over `n_grids` complete grids, with the
/// count-weighted combined relative error.
pub fn totals(estimate: &CensusEstimate, n_grids: f64) -> (f64, f64) {
    let per_grid: f64 = estimate.rows.values().map(|r| r.count).sum();
    let var: f64 = estimate
        .rows
        .values()
        .map(|r| (r.count * r.rel_err).powi(2))
        .sum();
    let rel = if per_grid > 0.0 {
        var.sqrt() / per_grid
    } else {
        0.0
    };
    (per_grid * n_grids, rel)
}

/// Tab-separated census report: per-n rows then a totals block. The
/// complete-grid count is configuration, echoed as given.
pub fn census_report(estimate: &CensusEstimate, n_grids: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "cells\t{}", estimate.cells);
    let _ = writeln!(out, "sample_size\t{}", estimate.total_outputs);
    let _ = writeln!(out, "grids_attempted\t{}", estimate.total_grids_consumed);
    let _ = writeln!(out, "success_rate\t{:.6e}", estimate.success_rate);
    let _ = writeln!(out, "n\ton\tcount_per_grid\trel_err\ttries");
    for (&n, r) in &estimate.rows {
        let tries = estimate_tries(r.count, estimate.cells, n).unwrap_or(f64::INFINITY);
        let _ = writeln!(
            out,
            "{n}\t{}\t{:.4e}\t{:.2}%\t{:.4e}",
            r.on,
            r.count,
            100.0 * r.rel_err,
            tries
        );
    }
    let (total, rel) = totals(estimate, n_grids);
    let per_grid: f64 = estimate.rows.values().map(|r| r.count).sum();
    let _ = writeln!(out, "per_grid_total\t{per_grid:.4e}\t{:.2}%", 100.0 * rel);
    let _ = writeln!(out, "n_grids\t{n_grids:.10e}");
    let _ = writeln!(out, "grand_total\t{total:.4e}\t{:.2}%", 100.0 * rel);
    out
}
