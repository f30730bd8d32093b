//! Delimited dataset files, evaluation-set preprocessing and result files.

use std::collections::HashSet;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::CategoricalTable;
use crate::detector::OutlierResult;
use crate::error::{Error, Result};
use crate::synth::SeededStream;

/// Column reference: zero-based position or header name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    /// All-digit strings are positions, anything else a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_owned()),
        })
    }
}

impl std::fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnSelector::Index(i) => write!(f, "{i}"),
            ColumnSelector::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadSpec {
    pub path: PathBuf,
    pub delimiter: char,
    pub label_column: Option<ColumnSelector>,
    pub id_column: Option<ColumnSelector>,
    pub has_header: bool,
    /// Marker for a missing cell. It is kept as an ordinary category value;
    /// [`drop_missing`] can filter such records out.
    pub missing_token: String,
}

impl LoadSpec {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            delimiter: ',',
            label_column: None,
            id_column: None,
            has_header: false,
            missing_token: "?".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delimiter.is_ascii() || matches!(self.delimiter, '"' | '\'' | '\n' | '\r') {
            return Err(Error::config(format!("unusable delimiter {:?}", self.delimiter)));
        }
        if self.label_column.is_some() && self.label_column == self.id_column {
            return Err(Error::config("label column and id column must differ"));
        }
        Ok(())
    }
}

fn resolve(selector: &ColumnSelector, header: Option<&[String]>, width: usize, role: &str) -> Result<usize> {
    let index = match selector {
        ColumnSelector::Index(i) => Some(*i).filter(|&i| i < width),
        ColumnSelector::Name(name) => header.and_then(|h| h.iter().position(|c| c == name)),
    };
    index.ok_or_else(|| Error::config(format!("{role} column {selector} not found")))
}

/// Reads a delimited file; the label and id columns (if any) are split off and
/// every other column becomes a categorical attribute.
pub fn load_table(spec: &LoadSpec) -> Result<CategoricalTable> {
    spec.validate()?;
    let file = File::open(&spec.path).map_err(|e| Error::io(&spec.path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter as u8)
        .has_headers(spec.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let parse_err = |line: u64, message: String| Error::Parse {
        path: spec.path.clone(),
        line,
        message,
    };
    let convert = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line());
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(&spec.path, io),
            other => parse_err(line, format!("{other:?}")),
        }
    };

    let header: Option<Vec<String>> = if spec.has_header {
        Some(reader.headers().map_err(convert)?.iter().map(str::to_owned).collect())
    } else {
        None
    };

    let mut raw: Vec<Vec<String>> = Vec::new();
    let mut width = header.as_ref().map(Vec::len);
    for record in reader.records() {
        let record = record.map_err(convert)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(parse_err(line, format!("expected {w} fields, found {}", record.len())));
            }
            _ => {}
        }
        raw.push(record.iter().map(str::to_owned).collect());
    }
    let width = width.filter(|_| !raw.is_empty()).ok_or(Error::EmptyInput("file has no records"))?;

    let label_idx = spec
        .label_column
        .as_ref()
        .map(|s| resolve(s, header.as_deref(), width, "label"))
        .transpose()?;
    let id_idx = spec
        .id_column
        .as_ref()
        .map(|s| resolve(s, header.as_deref(), width, "id"))
        .transpose()?;
    if label_idx.is_some() && label_idx == id_idx {
        return Err(Error::config("label column and id column must differ"));
    }

    let mut labels = label_idx.map(|_| Vec::with_capacity(raw.len()));
    let mut ids = id_idx.map(|_| Vec::with_capacity(raw.len()));
    let attributes: Vec<Vec<String>> = raw
        .into_iter()
        .map(|mut row| {
            if let (Some(ids), Some(i)) = (ids.as_mut(), id_idx) {
                ids.push(std::mem::take(&mut row[i]));
            }
            if let (Some(labels), Some(i)) = (labels.as_mut(), label_idx) {
                labels.push(std::mem::take(&mut row[i]));
            }
            row.into_iter()
                .enumerate()
                .filter(|(c, _)| Some(*c) != label_idx && Some(*c) != id_idx)
                .map(|(_, v)| v)
                .collect()
        })
        .collect();

    let mut table = CategoricalTable::encode(&attributes)?;
    if let Some(labels) = labels {
        table = table.with_labels(labels)?;
    }
    if let Some(ids) = ids {
        table = table.with_record_ids(ids)?;
    }
    Ok(table)
}

/// Drops every record holding `missing_token` in any attribute.
pub fn drop_missing(table: &CategoricalTable, missing_token: &str) -> Result<CategoricalTable> {
    let missing: Vec<Option<u32>> = table.dictionaries().iter().map(|d| d.code_of(missing_token)).collect();
    let keep: Vec<usize> = table
        .rows()
        .enumerate()
        .filter(|(_, row)| row.iter().zip(&missing).all(|(&c, m)| Some(c) != *m))
        .map(|(i, _)| i)
        .collect();
    table.select_rows(&keep)
}

/// Keeps `keep` records of `class_label`, chosen uniformly with a seeded
/// partial Fisher–Yates shuffle, plus every record of the other labels.
/// Surviving records stay in their original order.
pub fn downsample_class(
    table: &CategoricalTable,
    class_label: &str,
    keep: usize,
    seed: u64,
) -> Result<CategoricalTable> {
    let labels = table
        .labels()
        .ok_or_else(|| Error::config("table has no labels to downsample by"))?;
    let mut members: Vec<usize> = (0..table.n()).filter(|&i| labels[i] == class_label).collect();
    if members.is_empty() {
        return Err(Error::config(format!("unknown class label {class_label:?}")));
    }
    if keep > members.len() {
        return Err(Error::config(format!(
            "cannot keep {keep} records of class {class_label:?}: only {} present",
            members.len()
        )));
    }
    if keep == members.len() {
        return Ok(table.clone());
    }
    let mut rng = SeededStream::new(seed);
    for i in 0..keep {
        let j = i + rng.uniform((members.len() - i) as u64) as usize;
        members.swap(i, j);
    }
    let kept: HashSet<usize> = members[..keep].iter().copied().collect();
    let survivors: Vec<usize> = (0..table.n())
        .filter(|&i| labels[i] != class_label || kept.contains(&i))
        .collect();
    table.select_rows(&survivors)
}

/// Writes `rank,index[,id][,label],entropy` rows, one per selected record.
pub fn write_result(result: &OutlierResult, table: &CategoricalTable, path: &Path) -> Result<()> {
    if let Some(&bad) = result.selected.iter().find(|&&i| i >= table.n()) {
        return Err(Error::config(format!("result index {bad} out of range for {} records", table.n())));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    let io_err = |e: csv::Error| Error::io(path, std::io::Error::other(e.to_string()));

    let mut header = vec!["rank", "index"];
    if table.record_ids().is_some() {
        header.push("id");
    }
    if table.labels().is_some() {
        header.push("label");
    }
    header.push("entropy");
    writer.write_record(&header).map_err(io_err)?;

    for (rank, &index) in result.selected.iter().enumerate() {
        let mut fields = vec![(rank + 1).to_string(), index.to_string()];
        if let Some(ids) = table.record_ids() {
            fields.push(ids[index].clone());
        }
        if let Some(labels) = table.labels() {
            fields.push(labels[index].clone());
        }
        fields.push(format!("{:.6}", result.entropy_trace[rank + 1]));
        writer.write_record(&fields).map_err(io_err)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Reads back the `index` column of a result file, in rank order.
pub fn read_result(path: &Path) -> Result<Vec<usize>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let bad = |line: u64, message: String| Error::Parse {
        path: path.to_owned(),
        line,
        message,
    };
    let column = reader
        .headers()
        .map_err(|e| bad(1, e.to_string()))?
        .iter()
        .position(|h| h == "index")
        .ok_or_else(|| bad(1, "no index column".into()))?;
    reader
        .records()
        .map(|record| {
            let record = record.map_err(|e| bad(0, e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            record[column]
                .parse()
                .map_err(|e| bad(line, format!("bad index {:?}: {e}", &record[column])))
        })
        .collect()
}

/// Writes the table as headerless delimited text: optional id first, then the
/// attributes, then the label if present.
pub fn write_table(table: &CategoricalTable, path: &Path, delimiter: char) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let mut writer = csv::WriterBuilder::new()
        .delimiter(delimiter as u8)
        .from_writer(&mut out);
    let io_err = |e: csv::Error| Error::io(path, std::io::Error::other(e.to_string()));
    for (i, row) in table.decode().into_iter().enumerate() {
        let mut fields = Vec::with_capacity(row.len() + 2);
        if let Some(ids) = table.record_ids() {
            fields.push(ids[i].clone());
        }
        fields.extend(row);
        if let Some(labels) = table.labels() {
            fields.push(labels[i].clone());
        }
        writer.write_record(&fields).map_err(io_err)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    drop(writer);
    out.flush().map_err(|e| Error::io(path, e))
}
