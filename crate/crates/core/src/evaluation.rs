//! Rare-class coverage of a detection run.
//!
//! Records of user-designated small classes serve as ground-truth outliers;
//! for each `k` on a ladder we count how many of the first `k` selections
//! carry a rare label.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::detector::OutlierResult;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub k: usize,
    /// `k / n`.
    pub ratio: f64,
    pub rare_found: usize,
    /// `rare_found / total_rare`.
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub rare_labels: BTreeSet<String>,
    pub total_rare: usize,
    pub records: usize,
    pub rows: Vec<CoverageRow>,
}

pub fn coverage_at(
    result: &OutlierResult,
    labels: &[String],
    rare_labels: &BTreeSet<String>,
    k_ladder: &[usize],
) -> Result<EvaluationReport> {
    if rare_labels.is_empty() {
        return Err(Error::config("no rare labels given"));
    }
    let present: HashSet<&str> = labels.iter().map(String::as_str).collect();
    if let Some(unknown) = rare_labels.iter().find(|l| !present.contains(l.as_str())) {
        return Err(Error::config(format!("rare label {unknown:?} does not occur in the data")));
    }
    if let Some(&too_big) = k_ladder.iter().find(|&&k| k > result.selected.len()) {
        return Err(Error::config(format!(
            "k = {too_big} on the ladder exceeds the {} selected records",
            result.selected.len()
        )));
    }
    if let Some(&bad) = result.selected.iter().find(|&&i| i >= labels.len()) {
        return Err(Error::config(format!("selected index {bad} has no label")));
    }

    let is_rare = |i: usize| rare_labels.contains(&labels[i]);
    let total_rare = (0..labels.len()).filter(|&i| is_rare(i)).count();

    // prefix[k] = rare records among the first k selections
    let prefix: Vec<usize> = std::iter::once(0)
        .chain(result.selected.iter().scan(0, |acc, &i| {
            *acc += usize::from(is_rare(i));
            Some(*acc)
        }))
        .collect();

    let mut ladder = k_ladder.to_vec();
    ladder.sort_unstable();
    ladder.dedup();
    let rows = ladder
        .into_iter()
        .map(|k| CoverageRow {
            k,
            ratio: k as f64 / labels.len() as f64,
            rare_found: prefix[k],
            coverage: prefix[k] as f64 / total_rare as f64,
        })
        .collect();

    Ok(EvaluationReport {
        rare_labels: rare_labels.clone(),
        total_rare,
        records: labels.len(),
        rows,
    })
}

impl EvaluationReport {
    pub fn rare_found(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.rare_found).collect()
    }

    /// Delimited form: header `k,ratio,rare_found,total_rare,coverage`.
    pub fn write_delimited<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "k,ratio,rare_found,total_rare,coverage")?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{:.6},{},{},{:.6}",
                row.k, row.ratio, row.rare_found, self.total_rare, row.coverage
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for EvaluationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rare: Vec<&str> = self.rare_labels.iter().map(String::as_str).collect();
        writeln!(
            f,
            "rare classes {{{}}}: {} of {} records",
            rare.join(","),
            self.total_rare,
            self.records
        )?;
        writeln!(f, "{:>16}  {:>18}", "top ratio (k)", "rare found (cov.)")?;
        for row in &self.rows {
            let top = format!("{:.1}% ({})", 100.0 * row.ratio, row.k);
            let found = format!("{} ({:.2}%)", row.rare_found, 100.0 * row.coverage);
            writeln!(f, "{top:>16}  {found:>18}")?;
        }
        Ok(())
    }
}
