//! Seeded synthetic categorical data: class prototypes plus cell noise.
//!
//! The generator is fully specified so other implementations can reproduce
//! the same tables bit for bit:
//!
//! * Random source: SplitMix64 (Steele, Lea & Flood 2014) seeded with `seed`;
//!   state increment `0x9E3779B97F4A7C15`, output mix multipliers
//!   `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`.
//! * `uniform(p)` = high 64 bits of the 128-bit product `next_u64() · p`.
//! * `unit()` = `(next_u64() >> 11) · 2^-53`, a double in `[0, 1)`.
//! * Prototypes: for each class `c` in order, for each attribute `j` in order,
//!   `proto[c][j] = uniform(values_per_attribute)`.
//! * Records: record `r` belongs to class `r mod classes`. For each attribute
//!   in order draw `u = unit()`; if `u < noise` the cell is a fresh
//!   `uniform(values_per_attribute)`, otherwise it copies the prototype.
//! * Raw values are written as `v<code>`, labels as `c<class>`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::dataset::CategoricalTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub rows: usize,
    pub attributes: usize,
    pub classes: usize,
    #[serde(default = "default_values_per_attribute")]
    pub values_per_attribute: usize,
    #[serde(default = "default_noise")]
    pub noise: f64,
    pub seed: u64,
}

fn default_values_per_attribute() -> usize {
    10
}

fn default_noise() -> f64 {
    0.1
}

impl SynthSpec {
    pub fn new(rows: usize, attributes: usize, classes: usize, seed: u64) -> Self {
        Self {
            rows,
            attributes,
            classes,
            values_per_attribute: default_values_per_attribute(),
            noise: default_noise(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes == 0 || self.rows < self.classes {
            return Err(Error::config(format!(
                "need rows >= classes >= 1 (rows = {}, classes = {})",
                self.rows, self.classes
            )));
        }
        if self.attributes == 0 {
            return Err(Error::config("need at least one attribute"));
        }
        if self.values_per_attribute < 2 {
            return Err(Error::config("need at least two values per attribute"));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(Error::config(format!("noise {} outside [0, 1]", self.noise)));
        }
        Ok(())
    }
}

/// SplitMix64 with the draw mappings documented at module level.
pub struct SeededStream(SplitMix64);

impl SeededStream {
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::from_seed(seed.to_le_bytes()))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Value in `0..bound` by multiply-shift.
    pub fn uniform(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Generates a table with a trailing class label per record.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<CategoricalTable> {
    spec.validate()?;
    let mut rng = SeededStream::new(spec.seed);
    let p = spec.values_per_attribute as u64;
    let prototypes: Vec<Vec<u64>> = (0..spec.classes)
        .map(|_| (0..spec.attributes).map(|_| rng.uniform(p)).collect())
        .collect();

    let names: Vec<String> = (0..p).map(|v| format!("v{v}")).collect();
    let mut rows = Vec::with_capacity(spec.rows);
    let mut labels = Vec::with_capacity(spec.rows);
    for r in 0..spec.rows {
        let class = r % spec.classes;
        let row: Vec<&str> = prototypes[class]
            .iter()
            .map(|&proto| {
                let code = if rng.unit() < spec.noise {
                    rng.uniform(p)
                } else {
                    proto
                };
                names[code as usize].as_str()
            })
            .collect();
        rows.push(row);
        labels.push(format!("c{class}"));
    }
    CategoricalTable::encode(&rows)?.with_labels(labels)
}
