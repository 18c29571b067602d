use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Categorical samples stored by column, with class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Vec<u32>>,
    labels: Vec<u32>,
    arity: Vec<u32>,
    class_names: Vec<String>,
}

impl Dataset {
    /// `rows[i][j]` is feature `j` of sample `i`; `labels[i]` its class name.
    pub fn from_rows(rows: &[Vec<u32>], labels: &[String]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Domain("dataset has no rows".into()));
        }
        if rows.len() != labels.len() {
            return Err(Error::Domain(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let n = rows[0].len();
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Domain(format!(
                "row {} has {} features, expected {n}",
                i + 1,
                rows[i].len()
            )));
        }
        let columns = (0..n)
            .map(|j| rows.iter().map(|r| r[j]).collect())
            .collect();
        Ok(Self::from_columns(columns, labels))
    }

    fn from_columns(columns: Vec<Vec<u32>>, labels: &[String]) -> Self {
        let names: BTreeMap<&str, u32> = labels.iter().map(|l| (l.as_str(), 0)).collect();
        let class_names: Vec<String> = names.keys().map(|s| s.to_string()).collect();
        let ids: BTreeMap<&str, u32> = class_names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i as u32))
            .collect();
        let labels = labels.iter().map(|l| ids[l.as_str()]).collect();
        let arity = columns
            .iter()
            .map(|c: &Vec<u32>| c.iter().max().map_or(1, |&v| v + 1))
            .collect();
        Self {
            columns,
            labels,
            arity,
            class_names,
        }
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn features(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.columns[j]
    }

    /// Class ids, indexing [`Dataset::class_names`].
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn arity(&self, j: usize) -> u32 {
        self.arity[j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DataFormat {
    /// `label idx:val idx:val ...`, 1-based increasing indices, absent = 0.
    #[default]
    Sparse,
    /// `label,x1,x2,...` with integer categories.
    DenseCsv,
}

impl std::str::FromStr for DataFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sparse" | "libsvm" => Ok(Self::Sparse),
            "csv" | "dense" => Ok(Self::DenseCsv),
            _ => Err(format!("unknown data format {s:?} (sparse, csv)")),
        }
    }
}

pub fn parse_sparse_dataset(path: &Path, format: DataFormat) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    match format {
        DataFormat::Sparse => parse_sparse(&text, None),
        DataFormat::DenseCsv => parse_dense(&text),
    }
}

/// Parses sparse text. With `n_features` the width is fixed and larger
/// indices are errors; otherwise it is the largest index seen.
pub fn parse_sparse(text: &str, n_features: Option<usize>) -> Result<Dataset> {
    let mut labels = Vec::new();
    let mut entries: Vec<Vec<(usize, u32)>> = Vec::new();
    let mut width = 0;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Line { line: i + 1, msg };
        let mut tokens = line.split_whitespace();
        let label = tokens.next().expect("non-empty line");
        let mut row = Vec::new();
        let mut last = 0;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("expected idx:val, got {tok:?}")))?;
            let idx: usize = idx.parse().map_err(|_| err(format!("bad index {idx:?}")))?;
            if idx == 0 {
                return Err(err("indices are 1-based".into()));
            }
            if idx <= last {
                return Err(err(format!("index {idx} does not increase after {last}")));
            }
            if let Some(n) = n_features.filter(|&n| idx > n) {
                return Err(err(format!("index {idx} exceeds {n} features")));
            }
            let val = parse_category(val).ok_or_else(|| err(format!("bad value {val:?}")))?;
            last = idx;
            row.push((idx - 1, val));
        }
        width = width.max(last);
        labels.push(label.to_string());
        entries.push(row);
    }
    if labels.is_empty() {
        return Err(Error::Parse("dataset has no rows".into()));
    }
    let n = n_features.unwrap_or(width);
    let mut columns = vec![vec![0u32; labels.len()]; n];
    for (r, row) in entries.iter().enumerate() {
        for &(j, v) in row {
            columns[j][r] = v;
        }
    }
    Ok(Dataset::from_columns(columns, &labels))
}

pub fn parse_dense(text: &str) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        labels.push(fields.next().expect("non-empty line").to_string());
        let row = fields
            .map(|f| {
                parse_category(f).ok_or_else(|| Error::Line {
                    line: i + 1,
                    msg: format!("bad value {f:?}"),
                })
            })
            .collect::<Result<Vec<u32>>>()?;
        if let Some(first) = rows.first().map(|r: &Vec<u32>| r.len()) {
            if row.len() != first {
                return Err(Error::Line {
                    line: i + 1,
                    msg: format!("{} features, expected {first}", row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("dataset has no rows".into()));
    }
    Dataset::from_rows(&rows, &labels)
}

/// Non-negative integer category; accepts `1.0`-style integral floats.
fn parse_category(s: &str) -> Option<u32> {
    s.parse::<u32>().ok().or_else(|| {
        let x: f64 = s.parse().ok()?;
        (x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64).then_some(x as u32)
    })
}
