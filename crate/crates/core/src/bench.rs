//! Repeated timing of the barcode and matching pipelines.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::error::Result;
use crate::matching::{compute_betti_matching_timed, BettiMatchingResult};
use crate::options::{DimSet, Options, Timings};
use crate::persistence::{compute_barcode_timed, Barcode};
use crate::volume::VoxelGrid;

/// Mean and sample standard deviation, in seconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub stddev: f64,
}

impl Summary {
    pub fn of(samples: &[f64]) -> Summary {
        let n = samples.len() as f64;
        if samples.is_empty() {
            return Summary { mean: 0.0, stddev: 0.0 };
        }
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Summary { mean, stddev: var.sqrt() }
    }
}

/// Wall time and per-stage timings of individual runs.
#[derive(Clone, Debug, Default)]
pub struct Samples {
    runs: Vec<(f64, Timings)>,
}

impl Samples {
    pub fn push(&mut self, total_secs: f64, stages: Timings) {
        self.runs.push((total_secs, stages));
    }

    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn total(&self) -> Summary {
        Summary::of(&self.runs.iter().map(|r| r.0).collect::<Vec<_>>())
    }

    /// Per-stage summaries; a stage absent from a run counts as zero there.
    pub fn stages(&self) -> BTreeMap<&'static str, Summary> {
        let mut names: Vec<&'static str> = self.runs.iter().flat_map(|r| r.1.iter().map(|(k, _)| k)).collect();
        names.sort_unstable();
        names.dedup();
        names
            .into_iter()
            .map(|k| {
                let s: Vec<f64> = self.runs.iter().map(|r| r.1.get(k).as_secs_f64()).collect();
                (k, Summary::of(&s))
            })
            .collect()
    }
}

/// Times one call of `f`, recording it in `samples`.
pub fn sample<T>(samples: &mut Samples, f: impl FnOnce() -> Result<(T, Timings)>) -> Result<T> {
    let start = Instant::now();
    let (out, t) = f()?;
    samples.push(start.elapsed().as_secs_f64(), t);
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct BenchReport<T> {
    pub samples: Samples,
    /// Every run produced the same result as the first.
    pub identical: bool,
    pub result: T,
}

impl<T> BenchReport<T> {
    pub fn runs(&self) -> usize {
        self.samples.len()
    }
}

fn repeat<T: PartialEq>(runs: usize, mut f: impl FnMut() -> Result<(T, Timings)>) -> Result<BenchReport<T>> {
    let mut samples = Samples::default();
    let first = sample(&mut samples, &mut f)?;
    let mut identical = true;
    for _ in 1..runs.max(1) {
        identical &= sample(&mut samples, &mut f)? == first;
    }
    Ok(BenchReport {
        samples,
        identical,
        result: first,
    })
}

/// Runs the matching `runs` times (at least once).
pub fn bench_matching(
    i: &VoxelGrid,
    j: &VoxelGrid,
    dims: DimSet,
    extended: bool,
    opts: &Options,
    runs: usize,
) -> Result<BenchReport<BettiMatchingResult>> {
    repeat(runs, || compute_betti_matching_timed(i, j, dims, extended, opts))
}

/// Runs the barcode computation `runs` times (at least once).
pub fn bench_barcode(grid: &VoxelGrid, dims: DimSet, opts: &Options, runs: usize) -> Result<BenchReport<Barcode>> {
    repeat(runs, || Ok(compute_barcode_timed(grid, dims, opts)))
}
