//! Wall-clock comparison of the closed form against dense evaluation.
//!
//! Each measurement runs one discarded warm-up call, then `reps` timed calls
//! on the current thread. Reports use the median.

use std::hint::black_box;
use std::io::Write;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::closed_form::closed_form_det;
use crate::error::{Error, Result};
use crate::generator::{random_instance, Profile};
use crate::instance::KronRankOneInstance;
use crate::oracle::{check_dense_cap, materialized_det};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DurationStats {
    pub samples: Vec<Duration>,
    pub min: Duration,
    pub median: Duration,
    pub max: Duration,
}

impl DurationStats {
    fn from_samples(samples: Vec<Duration>) -> Self {
        let mut sorted = samples.clone();
        sorted.sort();
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            (sorted[mid - 1] + sorted[mid]) / 2
        };
        DurationStats {
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            median,
            samples,
        }
    }
}

fn time_reps<R>(reps: usize, mut run: impl FnMut() -> R) -> Result<DurationStats> {
    if reps == 0 {
        return Err(Error::Shape("repetitions must be at least 1".into()));
    }
    black_box(run());
    let samples = (0..reps)
        .map(|_| {
            let start = Instant::now();
            black_box(run());
            start.elapsed()
        })
        .collect();
    Ok(DurationStats::from_samples(samples))
}

pub fn time_closed_form<T: Scalar>(inst: &KronRankOneInstance<T>, reps: usize) -> Result<DurationStats> {
    time_reps(reps, || closed_form_det(black_box(inst)))
}

/// Times `materialize` followed by the dense determinant.
pub fn time_dense<T: Scalar>(inst: &KronRankOneInstance<T>, reps: usize, cap: usize) -> Result<DurationStats> {
    check_dense_cap(inst.nf(), cap)?;
    time_reps(reps, || materialized_det(black_box(inst), cap))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "F")]
    pub f: usize,
    #[serde(rename = "NF")]
    pub nf: usize,
    #[serde(rename = "t_closed_ns")]
    pub t_closed_ns: u128,
    #[serde(rename = "t_dense_ns")]
    pub t_dense_ns: u128,
    #[serde(rename = "speedup")]
    pub speedup: f64,
}

/// Benchmarks UNIFORM FLOAT instances for each `(N, F)` pair.
pub fn run_grid(pairs: &[(usize, usize)], reps: usize, seed: u64, cap: usize) -> Result<Vec<BenchRow>> {
    for &(n, f) in pairs {
        check_dense_cap(n * f, cap)?;
    }
    pairs
        .iter()
        .map(|&(n, f)| {
            let inst = random_instance::<f64>(n, f, seed, Profile::Uniform)?;
            let closed = time_closed_form(&inst, reps)?.median;
            let dense = time_dense(&inst, reps, cap)?.median;
            let closed_ns = closed.as_nanos().max(1);
            Ok(BenchRow {
                n,
                f,
                nf: n * f,
                t_closed_ns: closed_ns,
                t_dense_ns: dense.as_nanos(),
                speedup: dense.as_nanos() as f64 / closed_ns as f64,
            })
        })
        .collect()
}

/// Writes rows with the header `N,F,NF,t_closed_ns,t_dense_ns,speedup`.
pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Parse(format!("csv: {e}")))?;
    }
    if rows.is_empty() {
        w.write_record(["N", "F", "NF", "t_closed_ns", "t_dense_ns", "speedup"])
            .map_err(|e| Error::Parse(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::Parse(format!("csv: {e}")))?;
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
