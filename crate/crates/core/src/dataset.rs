//! Dictionary-encoded categorical tables.
//!
//! Raw string values are mapped to dense `u32` codes once, at load time, in
//! first-occurrence order per attribute. Everything downstream works on the
//! codes; the dictionaries are only needed to decode back to strings.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Mapping between the raw values of one attribute and their dense codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDictionary {
    attribute_index: usize,
    value_names: Vec<String>,
    lookup: HashMap<String, u32>,
}

impl AttributeDictionary {
    pub fn new(attribute_index: usize) -> Self {
        Self {
            attribute_index,
            value_names: Vec::new(),
            lookup: HashMap::new(),
        }
    }

    /// Returns the code for `value`, assigning the next free code on first sight.
    pub fn intern(&mut self, value: &str) -> u32 {
        if let Some(&code) = self.lookup.get(value) {
            return code;
        }
        let code = self.value_names.len() as u32;
        self.value_names.push(value.to_owned());
        self.lookup.insert(value.to_owned(), code);
        code
    }

    pub fn code_of(&self, value: &str) -> Option<u32> {
        self.lookup.get(value).copied()
    }

    pub fn name_of(&self, code: u32) -> Option<&str> {
        self.value_names.get(code as usize).map(String::as_str)
    }

    pub fn attribute_index(&self) -> usize {
        self.attribute_index
    }

    pub fn value_names(&self) -> &[String] {
        &self.value_names
    }

    /// Number of distinct values (`p_j`).
    pub fn cardinality(&self) -> usize {
        self.value_names.len()
    }
}

/// An immutable `n × m` table of categorical codes, with optional class labels
/// and external record identifiers that never take part in entropy math.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoricalTable {
    n: usize,
    m: usize,
    /// Row-major cell codes.
    cells: Vec<u32>,
    dictionaries: Vec<AttributeDictionary>,
    labels: Option<Vec<String>>,
    record_ids: Option<Vec<String>>,
}

impl CategoricalTable {
    /// Dictionary-encodes raw rows. All rows must have the same, nonzero length.
    pub fn encode<R, S>(rows: &[R]) -> Result<Self>
    where
        R: AsRef<[S]>,
        S: AsRef<str>,
    {
        let first = rows.first().ok_or(Error::EmptyInput("no rows"))?;
        let m = first.as_ref().len();
        if m == 0 {
            return Err(Error::EmptyInput("no columns"));
        }
        let mut dictionaries: Vec<_> = (0..m).map(AttributeDictionary::new).collect();
        let mut cells = Vec::with_capacity(rows.len() * m);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != m {
                return Err(Error::Ragged {
                    row: i,
                    found: row.len(),
                    expected: m,
                });
            }
            for (dict, value) in dictionaries.iter_mut().zip(row) {
                cells.push(dict.intern(value.as_ref()));
            }
        }
        Ok(Self {
            n: rows.len(),
            m,
            cells,
            dictionaries,
            labels: None,
            record_ids: None,
        })
    }

    /// Attaches per-record class labels.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::config(format!(
                "{} labels supplied for {} records",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Attaches per-record external identifiers.
    pub fn with_record_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n {
            return Err(Error::config(format!(
                "{} record ids supplied for {} records",
                ids.len(),
                self.n
            )));
        }
        self.record_ids = Some(ids);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn row(&self, index: usize) -> &[u32] {
        &self.cells[index * self.m..(index + 1) * self.m]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.cells.chunks_exact(self.m)
    }

    pub fn dictionaries(&self) -> &[AttributeDictionary] {
        &self.dictionaries
    }

    pub fn cardinality(&self, attribute: usize) -> usize {
        self.dictionaries[attribute].cardinality()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn record_ids(&self) -> Option<&[String]> {
        self.record_ids.as_deref()
    }

    /// Decodes the table back to raw string rows.
    pub fn decode(&self) -> Vec<Vec<String>> {
        self.rows()
            .map(|row| {
                row.iter()
                    .zip(&self.dictionaries)
                    .map(|(&code, dict)| dict.value_names[code as usize].clone())
                    .collect()
            })
            .collect()
    }

    /// Number of records holding each code of `attribute`.
    pub fn column_counts(&self, attribute: usize) -> Result<Vec<usize>> {
        if attribute >= self.m {
            return Err(Error::AttributeOutOfRange {
                index: attribute,
                attributes: self.m,
            });
        }
        let mut counts = vec![0usize; self.cardinality(attribute)];
        for row in self.rows() {
            counts[row[attribute] as usize] += 1;
        }
        Ok(counts)
    }

    /// Builds a new table from the given records, in the given order.
    ///
    /// The result is re-encoded so its dictionaries only hold values that
    /// still occur; labels and ids follow their records.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let decoded: Vec<Vec<&str>> = indices
            .iter()
            .map(|&i| {
                self.row(i)
                    .iter()
                    .zip(&self.dictionaries)
                    .map(|(&code, dict)| dict.value_names[code as usize].as_str())
                    .collect()
            })
            .collect();
        let mut table = Self::encode(&decoded)?;
        if let Some(labels) = &self.labels {
            table.labels = Some(indices.iter().map(|&i| labels[i].clone()).collect());
        }
        if let Some(ids) = &self.record_ids {
            table.record_ids = Some(indices.iter().map(|&i| ids[i].clone()).collect());
        }
        Ok(table)
    }
}
