//! Wall-clock scalability runs on synthetic data.
//!
//! Either the number of records varies with `k` fixed (tables are prefixes of
//! one generated table) or `k` varies on one fixed-size table. Only the detect
//! call is timed.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dataset::CategoricalTable;
use crate::detector::{greedy_detect_with, naive_greedy_detect, DetectOptions};
use crate::error::{Error, Result};
use crate::synth::{generate_synthetic, SynthSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Incremental,
    Naive,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "incremental" => Ok(Algorithm::Incremental),
            "naive" => Ok(Algorithm::Naive),
            other => Err(Error::config(format!("unknown algorithm {other:?} (expected incremental or naive)"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Incremental => "incremental",
            Algorithm::Naive => "naive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchAxis {
    /// Number of records varies; `fixed` is `k`.
    Records,
    /// Number of outliers varies; `fixed` is the number of records.
    Outliers,
}

impl FromStr for BenchAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "records" | "objects" => Ok(BenchAxis::Records),
            "outliers" => Ok(BenchAxis::Outliers),
            other => Err(Error::config(format!("unknown axis {other:?} (expected records or outliers)"))),
        }
    }
}

impl fmt::Display for BenchAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchAxis::Records => "records",
            BenchAxis::Outliers => "outliers",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    /// Generator settings; `rows` is overridden by the records axis.
    pub base: SynthSpec,
    pub axis: BenchAxis,
    pub grid: Vec<usize>,
    pub fixed: usize,
    pub algorithms: Vec<Algorithm>,
    /// Timed runs per point; the median is reported.
    pub repeats: usize,
    pub threads: usize,
    /// Stop after this much total detect time, keeping the points so far.
    pub budget: Option<Duration>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchPoint {
    /// Value of the varying parameter.
    pub value: usize,
    pub records: usize,
    pub outliers: usize,
    pub algorithm: Algorithm,
    /// Median over `samples`.
    pub wall_seconds: f64,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub axis: BenchAxis,
    pub attributes: usize,
    pub fixed: usize,
    pub seed: u64,
    pub threads: usize,
    pub repeats: usize,
    pub points: Vec<BenchPoint>,
    /// Why the run stopped early, if it did.
    pub aborted: Option<String>,
}

fn median(samples: &mut [f64]) -> f64 {
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        0.5 * (samples[mid - 1] + samples[mid])
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::config("empty bench grid"));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("bench grid must be strictly ascending"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::config("no algorithms selected"));
        }
        if self.repeats == 0 {
            return Err(Error::config("repeat count must be at least 1"));
        }
        let (max_n, max_k) = match self.axis {
            BenchAxis::Records => (self.grid[0], self.fixed),
            BenchAxis::Outliers => (self.fixed, *self.grid.last().unwrap()),
        };
        if max_k >= max_n {
            return Err(Error::InvalidK { k: max_k, n: max_n });
        }
        Ok(())
    }
}

/// Runs the benchmark. Repeats are interleaved round-robin over the grid so a
/// transient slowdown lands on different points rather than on every sample of
/// one point. Each point goes to `on_point` as soon as its last sample is in,
/// so a caller can flush partial results; on abort, points holding at least
/// one sample are still reported.
pub fn bench_scalability(config: &BenchConfig, mut on_point: impl FnMut(&BenchPoint)) -> Result<BenchReport> {
    config.validate()?;
    let rows = match config.axis {
        BenchAxis::Records => *config.grid.last().unwrap(),
        BenchAxis::Outliers => config.fixed,
    };
    let full = generate_synthetic(&SynthSpec {
        rows,
        ..config.base.clone()
    })?;
    let cells: Vec<(usize, CategoricalTable, usize)> = config
        .grid
        .iter()
        .map(|&value| match config.axis {
            BenchAxis::Records => {
                let prefix: Vec<usize> = (0..value).collect();
                Ok((value, full.select_rows(&prefix)?, config.fixed))
            }
            BenchAxis::Outliers => Ok((value, full.clone(), value)),
        })
        .collect::<Result<_>>()?;

    let mut report = BenchReport::for_config(config);
    let options = DetectOptions {
        threads: config.threads,
        verify_cache: false,
    };
    let algorithms = config.algorithms.len();
    let mut samples = vec![Vec::with_capacity(config.repeats); cells.len() * algorithms];
    let mut emitted = vec![false; samples.len()];
    let mut spent = Duration::ZERO;
    let point = |slot: usize, samples: &[f64]| {
        let (value, table, k) = &cells[slot / algorithms];
        BenchPoint {
            value: *value,
            records: table.n(),
            outliers: *k,
            algorithm: config.algorithms[slot % algorithms],
            wall_seconds: median(&mut samples.to_vec()),
            samples: samples.to_vec(),
        }
    };

    // One untimed run per algorithm on the smallest cell warms code and allocator.
    for &algorithm in &config.algorithms {
        let (_, table, k) = &cells[0];
        time_once(table, *k, algorithm, &options)?;
    }

    'rounds: for round in 0..config.repeats {
        for slot in 0..samples.len() {
            let (value, table, k) = &cells[slot / algorithms];
            let algorithm = config.algorithms[slot % algorithms];
            match time_once(table, *k, algorithm, &options) {
                Ok(elapsed) => {
                    spent += elapsed;
                    samples[slot].push(elapsed.as_secs_f64().max(1e-9));
                }
                Err(e) => {
                    report.aborted = Some(format!("{algorithm} at {} = {value}: {e}", config.axis));
                    break 'rounds;
                }
            }
            if round + 1 == config.repeats {
                let p = point(slot, &samples[slot]);
                on_point(&p);
                report.points.push(p);
                emitted[slot] = true;
            }
            if let Some(budget) = config.budget.filter(|&b| spent > b) {
                report.aborted = Some(format!("time budget of {budget:?} exhausted"));
                break 'rounds;
            }
        }
    }
    if report.aborted.is_some() {
        for slot in (0..samples.len()).filter(|&s| !emitted[s] && !samples[s].is_empty()) {
            let p = point(slot, &samples[slot]);
            on_point(&p);
            report.points.push(p);
        }
    }
    Ok(report)
}

fn time_once(table: &CategoricalTable, k: usize, algorithm: Algorithm, options: &DetectOptions) -> Result<Duration> {
    let start = Instant::now();
    let result = match algorithm {
        Algorithm::Incremental => greedy_detect_with(table, k, options)?,
        Algorithm::Naive => naive_greedy_detect(table, k)?,
    };
    let elapsed = start.elapsed();
    std::hint::black_box(result);
    Ok(elapsed)
}

impl BenchReport {
    /// Report with no points yet, labelled from `config`.
    pub fn for_config(config: &BenchConfig) -> Self {
        Self {
            axis: config.axis,
            attributes: config.base.attributes,
            fixed: config.fixed,
            seed: config.base.seed,
            threads: config.threads,
            repeats: config.repeats,
            points: Vec::new(),
            aborted: None,
        }
    }

    pub fn points_for(&self, algorithm: Algorithm) -> impl Iterator<Item = &BenchPoint> {
        self.points.iter().filter(move |p| p.algorithm == algorithm)
    }

    /// Time growth between consecutive grid points of one algorithm, rescaled
    /// to a doubling of the varying parameter: `(t₂/t₁)^(ln 2 / ln(v₂/v₁))`.
    /// Linear scaling gives 2.
    pub fn doubling_factors(&self, algorithm: Algorithm) -> Vec<(usize, usize, f64)> {
        let pts: Vec<&BenchPoint> = self.points_for(algorithm).collect();
        pts.windows(2)
            .map(|w| {
                let step = w[1].value as f64 / w[0].value as f64;
                let growth = w[1].wall_seconds / w[0].wall_seconds;
                (w[0].value, w[1].value, growth.powf(std::f64::consts::LN_2 / step.ln()))
            })
            .collect()
    }

    pub const HEADER: &'static str = "axis,value,records,outliers,attributes,algorithm,threads,repeats,wall_seconds";

    pub fn write_point<W: Write>(&self, point: &BenchPoint, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.6}",
            self.axis,
            point.value,
            point.records,
            point.outliers,
            self.attributes,
            point.algorithm,
            self.threads,
            self.repeats,
            point.wall_seconds
        )
    }

    pub fn write_delimited<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::HEADER)?;
        for point in &self.points {
            self.write_point(point, &mut out)?;
        }
        Ok(())
    }
}
