//! Shannon entropies over categorical counts and the frequency model that
//! scores single-record removals in `O(m)`.
//!
//! All logarithms are natural; `0·ln 0` is taken as `0`.
//!
//! For one attribute with counts `c_v` over `N` active records, write
//! `S = Σ_v c_v·ln c_v`. Then the attribute's entropy is `ln N − S/N`. Removing
//! a record whose value has count `c` changes `S` by
//! `δ(c) = c·ln c − (c−1)·ln(c−1)` and `N` by one, so the entropy after a
//! removal needs only the cached `S` and one count lookup per attribute.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::CategoricalTable;
use crate::error::{Error, Result};

/// Fixed-point scale for removal keys (2^40, about 9.1e-13 per unit).
const KEY_SCALE: f64 = (1u64 << 40) as f64;

/// An entropy in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct EntropyValue(f64);

impl EntropyValue {
    pub const ZERO: EntropyValue = EntropyValue(0.0);

    pub(crate) fn from_nats(nats: f64) -> Self {
        // Rounding can leave -0.0 or a hair below zero on degenerate inputs.
        EntropyValue(if nats <= 0.0 { 0.0 } else { nats })
    }

    pub fn nats(self) -> f64 {
        self.0
    }

    pub fn bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.0)
    }
}

/// `c·ln c` with `0·ln 0 = 0`.
#[inline]
pub fn xlogx(c: usize) -> f64 {
    if c <= 1 {
        0.0
    } else {
        let c = c as f64;
        c * c.ln()
    }
}

/// Change in `Σ c·ln c` when a count drops from `c` to `c − 1`.
#[inline]
fn removal_delta(c: usize) -> f64 {
    if c == 0 {
        0.0
    } else {
        xlogx(c) - xlogx(c - 1)
    }
}

#[inline]
fn removal_key_of(c: usize) -> i64 {
    (removal_delta(c) * KEY_SCALE).round() as i64
}

/// Entropy of an empirical distribution given by `counts` summing to `total`.
pub fn attribute_entropy(counts: &[usize], total: usize) -> Result<EntropyValue> {
    if total == 0 {
        return Err(Error::EmptyDistribution);
    }
    let total = total as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum();
    Ok(EntropyValue::from_nats(h))
}

/// Entropy over whole records (joint distribution of all attributes) among
/// the records flagged in `active`. Hashes full rows, so it is meant for small
/// tables used as a reference.
pub fn joint_entropy(table: &CategoricalTable, active: &[bool]) -> Result<EntropyValue> {
    if active.len() != table.n() {
        return Err(Error::config(format!(
            "active mask has {} entries for {} records",
            active.len(),
            table.n()
        )));
    }
    let mut freq: HashMap<&[u32], usize> = HashMap::new();
    let mut total = 0usize;
    for (row, _) in table.rows().zip(active).filter(|(_, &a)| a) {
        *freq.entry(row).or_default() += 1;
        total += 1;
    }
    if total == 0 {
        return Err(Error::EmptyInput("no active records"));
    }
    let counts: Vec<usize> = freq.into_values().collect();
    attribute_entropy(&counts, total)
}

/// Per-attribute value counts over the active records, with cached
/// `S_j = Σ_v c_v·ln c_v` sums and per-value removal keys.
///
/// Reads (`removal_score`, `removal_key`) take `&self` and may run
/// concurrently; `apply_removal` needs `&mut self`.
#[derive(Debug, Clone)]
pub struct FrequencyModel {
    active_n: usize,
    counts: Vec<Vec<usize>>,
    count_entropy_sum: Vec<f64>,
    /// `round(δ(c_v) · 2^40)` per attribute and code.
    removal_keys: Vec<Vec<i64>>,
}

impl FrequencyModel {
    /// Model over every record of `table`.
    pub fn from_table(table: &CategoricalTable) -> Self {
        let mut model = Self::empty(table);
        for row in table.rows() {
            model.add_counts(row);
        }
        model.rebuild_caches();
        model
    }

    /// Model over the records flagged in `active`.
    pub fn from_active(table: &CategoricalTable, active: &[bool]) -> Self {
        let mut model = Self::empty(table);
        for (row, _) in table.rows().zip(active).filter(|(_, &a)| a) {
            model.add_counts(row);
        }
        model.rebuild_caches();
        model
    }

    fn empty(table: &CategoricalTable) -> Self {
        let counts: Vec<Vec<usize>> = (0..table.m())
            .map(|j| vec![0; table.cardinality(j)])
            .collect();
        let removal_keys = counts.iter().map(|c| vec![0; c.len()]).collect();
        Self {
            active_n: 0,
            count_entropy_sum: vec![0.0; table.m()],
            counts,
            removal_keys,
        }
    }

    fn add_counts(&mut self, record: &[u32]) {
        for (counts, &code) in self.counts.iter_mut().zip(record) {
            counts[code as usize] += 1;
        }
        self.active_n += 1;
    }

    fn rebuild_caches(&mut self) {
        for (j, counts) in self.counts.iter().enumerate() {
            self.count_entropy_sum[j] = counts.iter().map(|&c| xlogx(c)).sum();
            for (key, &c) in self.removal_keys[j].iter_mut().zip(counts) {
                *key = removal_key_of(c);
            }
        }
    }

    pub fn active_n(&self) -> usize {
        self.active_n
    }

    pub fn attributes(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self, attribute: usize) -> &[usize] {
        &self.counts[attribute]
    }

    pub fn count_entropy_sum(&self, attribute: usize) -> f64 {
        self.count_entropy_sum[attribute]
    }

    /// Sum of per-attribute entropies, evaluated from the counts.
    pub fn independent_entropy(&self) -> Result<EntropyValue> {
        if self.active_n == 0 {
            return Err(Error::EmptyInput("no active records"));
        }
        let mut h = 0.0;
        for counts in &self.counts {
            h += attribute_entropy(counts, self.active_n)?.nats();
        }
        Ok(EntropyValue::from_nats(h))
    }

    fn check_removable(&self, record: &[u32]) -> Result<()> {
        if self.active_n < 2 {
            return Err(Error::CannotEmpty);
        }
        if record.len() != self.counts.len() {
            return Err(Error::config(format!(
                "record has {} values, model has {} attributes",
                record.len(),
                self.counts.len()
            )));
        }
        for (j, (counts, &code)) in self.counts.iter().zip(record).enumerate() {
            if counts.get(code as usize).copied().unwrap_or(0) == 0 {
                return Err(Error::InconsistentModel { attribute: j, code });
            }
        }
        Ok(())
    }

    /// Independent-attribute entropy the model would have after removing
    /// `record`, in `O(m)`.
    pub fn removal_score(&self, record: &[u32]) -> Result<f64> {
        self.check_removable(record)?;
        let remaining = (self.active_n - 1) as f64;
        let ln_remaining = remaining.ln();
        let mut h = 0.0;
        for (j, &code) in record.iter().enumerate() {
            let c = self.counts[j][code as usize];
            let s = self.count_entropy_sum[j] - removal_delta(c);
            h += ln_remaining - s / remaining;
        }
        Ok(h.max(0.0))
    }

    /// Integer ranking key for removing `record`: `Σ_j round(δ(c_j)·2^40)`.
    ///
    /// A smaller key means a larger entropy decrease. Integer addition is
    /// associative, so candidates whose value counts are permutations of each
    /// other across attributes get identical keys. No bounds or count checks:
    /// callers must only pass active records.
    #[inline]
    pub fn removal_key(&self, record: &[u32]) -> i64 {
        record
            .iter()
            .zip(&self.removal_keys)
            .map(|(&code, keys)| keys[code as usize])
            .sum()
    }

    /// Removes `record` from the counts and updates the caches.
    pub fn apply_removal(&mut self, record: &[u32]) -> Result<()> {
        self.check_removable(record)?;
        for (j, &code) in record.iter().enumerate() {
            let v = code as usize;
            let c = self.counts[j][v];
            self.count_entropy_sum[j] -= removal_delta(c);
            self.counts[j][v] = c - 1;
            self.removal_keys[j][v] = removal_key_of(c - 1);
        }
        self.active_n -= 1;
        Ok(())
    }

    /// Adds `record` back; the inverse of [`apply_removal`](Self::apply_removal).
    pub fn apply_insertion(&mut self, record: &[u32]) -> Result<()> {
        if record.len() != self.counts.len() {
            return Err(Error::config(format!(
                "record has {} values, model has {} attributes",
                record.len(),
                self.counts.len()
            )));
        }
        for (j, &code) in record.iter().enumerate() {
            if code as usize >= self.counts[j].len() {
                return Err(Error::InconsistentModel { attribute: j, code });
            }
        }
        for (j, &code) in record.iter().enumerate() {
            let v = code as usize;
            let c = self.counts[j][v] + 1;
            self.count_entropy_sum[j] += removal_delta(c);
            self.counts[j][v] = c;
            self.removal_keys[j][v] = removal_key_of(c);
        }
        self.active_n += 1;
        Ok(())
    }

    /// Largest absolute gap between a cached `S_j` and its from-scratch value.
    pub fn cache_drift(&self) -> f64 {
        self.counts
            .iter()
            .zip(&self.count_entropy_sum)
            .map(|(counts, &s)| (s - counts.iter().map(|&c| xlogx(c)).sum::<f64>()).abs())
            .fold(0.0, f64::max)
    }
}
