//! The greedy outlier detector and the two reference solvers it is checked
//! against.
//!
//! `greedy_detect` runs `k` scans. Each scan scores every record still marked
//! as a non-outlier by the entropy the data would have without it, takes the
//! record with the lowest resulting entropy (lowest index on ties), removes it
//! from the frequency model and marks it as an outlier.
//!
//! Inside a scan the candidates are ranked by the integer key from
//! [`FrequencyModel::removal_key`]: the `ln(N−1)` and `1/(N−1)` factors and the
//! cached `S_j` sums are shared by every candidate, so only `Σ_j δ(c_j)` varies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::CategoricalTable;
use crate::entropy::{attribute_entropy, EntropyValue, FrequencyModel};
use crate::error::{Error, Result};

/// Largest number of subsets `exhaustive_optimal` will enumerate.
pub const EXHAUSTIVE_BUDGET: u128 = 10_000_000;

/// Entropy gap below which the reference solvers treat two candidates as tied.
/// Their from-scratch sums round differently for candidates that are equal in
/// exact arithmetic, so an exact comparison would break such ties by noise.
const REFERENCE_TIE_TOLERANCE: f64 = 1e-10;

/// Cache drift that counts as a broken model when verification is enabled.
const CACHE_TOLERANCE: f64 = 1e-9;

/// Candidates per parallel work unit.
const PARALLEL_BLOCK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierResult {
    /// Record indices in selection order.
    pub selected: Vec<usize>,
    /// Independent-attribute entropy (nats) before any removal, then after each.
    pub entropy_trace: Vec<f64>,
    pub k: usize,
}

impl OutlierResult {
    pub fn initial_entropy(&self) -> f64 {
        self.entropy_trace[0]
    }

    pub fn final_entropy(&self) -> f64 {
        *self.entropy_trace.last().expect("trace always holds the initial entropy")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectOptions {
    /// Worker threads for candidate scoring: 1 scans sequentially, 0 uses the
    /// global rayon pool.
    pub threads: usize,
    /// Recompute every `S_j` after each removal and fail on drift.
    pub verify_cache: bool,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            threads: 1,
            verify_cache: cfg!(debug_assertions),
        }
    }
}

fn check_k(table: &CategoricalTable, k: usize) -> Result<()> {
    if table.n() == 0 {
        return Err(Error::EmptyInput("no records"));
    }
    if k >= table.n() && k > 0 {
        return Err(Error::InvalidK { k, n: table.n() });
    }
    Ok(())
}

/// Greedy detection with default options (sequential scan).
pub fn greedy_detect(table: &CategoricalTable, k: usize) -> Result<OutlierResult> {
    greedy_detect_with(table, k, &DetectOptions::default())
}

pub fn greedy_detect_with(
    table: &CategoricalTable,
    k: usize,
    options: &DetectOptions,
) -> Result<OutlierResult> {
    check_k(table, k)?;
    match options.threads {
        1 => run_greedy(table, k, options.verify_cache, sequential_best),
        0 => run_greedy(table, k, options.verify_cache, parallel_best),
        threads => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::config(format!("cannot start {threads} worker threads: {e}")))?;
            pool.install(|| run_greedy(table, k, options.verify_cache, parallel_best))
        }
    }
}

type ScanFn = fn(&CategoricalTable, &FrequencyModel, &[bool]) -> Option<usize>;

fn run_greedy(
    table: &CategoricalTable,
    k: usize,
    verify_cache: bool,
    best_candidate: ScanFn,
) -> Result<OutlierResult> {
    let mut model = FrequencyModel::from_table(table);
    let mut active = vec![true; table.n()];
    let mut selected = Vec::with_capacity(k);
    let mut entropy_trace = Vec::with_capacity(k + 1);
    entropy_trace.push(model.independent_entropy()?.nats());

    for _ in 0..k {
        let best = best_candidate(table, &model, &active)
            .ok_or_else(|| Error::Invariant("scan found no active record".into()))?;
        model.apply_removal(table.row(best))?;
        active[best] = false;
        selected.push(best);
        entropy_trace.push(model.independent_entropy()?.nats());
        if verify_cache {
            let drift = model.cache_drift();
            if drift > CACHE_TOLERANCE {
                return Err(Error::Invariant(format!(
                    "cached count-entropy sums drifted by {drift:e} after {} removals",
                    selected.len()
                )));
            }
        }
    }

    Ok(OutlierResult {
        selected,
        entropy_trace,
        k,
    })
}

fn sequential_best(table: &CategoricalTable, model: &FrequencyModel, active: &[bool]) -> Option<usize> {
    let mut best: Option<(i64, usize)> = None;
    for (i, (row, _)) in table.rows().zip(active).enumerate().filter(|(_, (_, &a))| a) {
        let key = model.removal_key(row);
        if best.is_none_or(|(b, _)| key < b) {
            best = Some((key, i));
        }
    }
    best.map(|(_, i)| i)
}

fn parallel_best(table: &CategoricalTable, model: &FrequencyModel, active: &[bool]) -> Option<usize> {
    // (key, index) has a total order, so the reduction is the same for any
    // split of the candidates.
    (0..table.n())
        .into_par_iter()
        .with_min_len(PARALLEL_BLOCK)
        .filter(|&i| active[i])
        .map(|i| (model.removal_key(table.row(i)), i))
        .min()
        .map(|(_, i)| i)
}

/// Same selection policy as [`greedy_detect`], but every candidate is scored
/// by rebuilding all value counts from the remaining records and evaluating
/// the entropy from scratch. `O(n²·k·m)`.
pub fn naive_greedy_detect(table: &CategoricalTable, k: usize) -> Result<OutlierResult> {
    check_k(table, k)?;
    let n = table.n();
    let mut active = vec![true; n];
    let mut counts: Vec<Vec<usize>> = (0..table.m()).map(|j| vec![0; table.cardinality(j)]).collect();
    let mut selected = Vec::with_capacity(k);
    let mut entropy_trace = Vec::with_capacity(k + 1);
    entropy_trace.push(entropy_without(table, &active, None, &mut counts)?);

    for _ in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for candidate in (0..n).filter(|&i| active[i]) {
            let h = entropy_without(table, &active, Some(candidate), &mut counts)?;
            if best.is_none_or(|(b, _)| h < b - REFERENCE_TIE_TOLERANCE) {
                best = Some((h, candidate));
            }
        }
        let (h, chosen) = best.ok_or_else(|| Error::Invariant("scan found no active record".into()))?;
        active[chosen] = false;
        selected.push(chosen);
        entropy_trace.push(h);
    }

    Ok(OutlierResult {
        selected,
        entropy_trace,
        k,
    })
}

/// Independent-attribute entropy of the active records minus `skip`,
/// counted from scratch into the reusable `counts` buffers.
fn entropy_without(
    table: &CategoricalTable,
    active: &[bool],
    skip: Option<usize>,
    counts: &mut [Vec<usize>],
) -> Result<f64> {
    counts.iter_mut().for_each(|c| c.fill(0));
    let mut total = 0;
    for (i, row) in table.rows().enumerate() {
        if !active[i] || Some(i) == skip {
            continue;
        }
        for (c, &code) in counts.iter_mut().zip(row) {
            c[code as usize] += 1;
        }
        total += 1;
    }
    let mut h = 0.0;
    for c in counts.iter() {
        h += attribute_entropy(c, total)?.nats();
    }
    Ok(h)
}

fn binomial_capped(n: usize, k: usize, cap: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap {
            return None;
        }
    }
    Some(acc)
}

/// Enumerates every size-`k` subset and returns one whose removal leaves the
/// lowest independent-attribute entropy, together with that entropy. Among
/// optima the lexicographically smallest index set wins.
pub fn exhaustive_optimal(table: &CategoricalTable, k: usize) -> Result<(Vec<usize>, EntropyValue)> {
    check_k(table, k)?;
    if binomial_capped(table.n(), k, EXHAUSTIVE_BUDGET).is_none() {
        return Err(Error::InstanceTooLarge {
            n: table.n(),
            k,
            budget: EXHAUSTIVE_BUDGET,
        });
    }

    struct Search<'a> {
        table: &'a CategoricalTable,
        model: FrequencyModel,
        chosen: Vec<usize>,
        best: Option<(f64, Vec<usize>)>,
    }

    impl Search<'_> {
        fn visit(&mut self, start: usize, remaining: usize) -> Result<()> {
            if remaining == 0 {
                let h = self.model.independent_entropy()?.nats();
                // Lexicographic enumeration: only a strictly better subset replaces.
                if self
                    .best
                    .as_ref()
                    .is_none_or(|(b, _)| h < b - REFERENCE_TIE_TOLERANCE)
                {
                    self.best = Some((h, self.chosen.clone()));
                }
                return Ok(());
            }
            for i in start..=self.table.n() - remaining {
                let row = self.table.row(i);
                self.model.apply_removal(row)?;
                self.chosen.push(i);
                self.visit(i + 1, remaining - 1)?;
                self.chosen.pop();
                self.model.apply_insertion(row)?;
            }
            Ok(())
        }
    }

    let mut search = Search {
        table,
        model: FrequencyModel::from_table(table),
        chosen: Vec::with_capacity(k),
        best: None,
    };
    search.visit(0, k)?;
    let (h, subset) = search
        .best
        .ok_or_else(|| Error::Invariant("no subset enumerated".into()))?;
    Ok((subset, EntropyValue::from_nats(h)))
}
