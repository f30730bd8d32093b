//! Reference computations for the integration tests. Nothing here calls into
//! the library's entropy code.

#![allow(dead_code)]

use std::collections::HashMap;

use entropy_outlier::CategoricalTable;
use proptest::prelude::*;

/// Independent-attribute entropy of `rows` (each row a slice of codes),
/// counting values with hash maps and summing `−p ln p`.
pub fn brute_independent_entropy(rows: &[&[u32]]) -> f64 {
    let n = rows.len() as f64;
    let m = rows.first().map_or(0, |r| r.len());
    (0..m)
        .map(|j| {
            let mut freq: HashMap<u32, usize> = HashMap::new();
            for r in rows {
                *freq.entry(r[j]).or_default() += 1;
            }
            freq.values().map(|&c| c as f64 / n).map(|p| -p * p.ln()).sum::<f64>()
        })
        .sum()
}

/// Same as above in base-2 logarithms.
pub fn brute_independent_entropy_bits(rows: &[&[u32]]) -> f64 {
    let n = rows.len() as f64;
    let m = rows.first().map_or(0, |r| r.len());
    (0..m)
        .map(|j| {
            let mut freq: HashMap<u32, usize> = HashMap::new();
            for r in rows {
                *freq.entry(r[j]).or_default() += 1;
            }
            freq.values().map(|&c| c as f64 / n).map(|p| -p * p.log2()).sum::<f64>()
        })
        .sum()
}

pub fn brute_joint_entropy(rows: &[&[u32]]) -> f64 {
    let n = rows.len() as f64;
    let mut freq: HashMap<&[u32], usize> = HashMap::new();
    for r in rows {
        *freq.entry(*r).or_default() += 1;
    }
    freq.values().map(|&c| c as f64 / n).map(|p| -p * p.ln()).sum()
}

/// Rows of `table` whose indices are not in `removed`.
pub fn remaining<'a>(table: &'a CategoricalTable, removed: &[usize]) -> Vec<&'a [u32]> {
    (0..table.n()).filter(|i| !removed.contains(i)).map(|i| table.row(i)).collect()
}

pub fn table_from_codes(rows: &[Vec<u32>]) -> CategoricalTable {
    let raw: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.iter().map(|c| format!("v{c}")).collect())
        .collect();
    CategoricalTable::encode(&raw).unwrap()
}

/// Tables with `n` in `n_range`, `m` in `m_range`, values drawn from `0..p`
/// with `p` in `p_range`.
pub fn tables(
    n_range: std::ops::RangeInclusive<usize>,
    m_range: std::ops::RangeInclusive<usize>,
    p_range: std::ops::RangeInclusive<u32>,
) -> impl Strategy<Value = CategoricalTable> {
    (n_range, m_range, p_range).prop_flat_map(|(n, m, p)| {
        prop::collection::vec(prop::collection::vec(0..p, m), n).prop_map(|rows| table_from_codes(&rows))
    })
}

/// Deterministic pseudo-random table for fixed-seed loops (SplitMix-style hash).
pub fn hashed_table(seed: u64, n: usize, m: usize, p: u32) -> CategoricalTable {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03;
    let mut next = move || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    };
    let rows: Vec<Vec<u32>> = (0..n)
        .map(|_| (0..m).map(|_| (next() % p as u64) as u32).collect())
        .collect();
    table_from_codes(&rows)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}
