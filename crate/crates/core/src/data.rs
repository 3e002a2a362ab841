//! Dataset model, CSV ingestion, numeric encoding and the score-orientation
//! contract shared by every detector and framework.
//!
//! Case ids are 1-based and dense: the g-th row of a [`Dataset`] has id `g`.
//! Every [`ScoreVector`] is oriented so that the lowest score marks the most
//! anomalous case.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnValues {
    Numeric(Vec<f64>),
    /// `classes` is sorted lexically; `codes[g]` indexes into it.
    Categorical {
        classes: Vec<String>,
        codes: Vec<u32>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    name: String,
    values: ColumnValues,
}

impl Column {
    pub fn numeric(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "numeric column `{name}` contains a non-finite value"
            )));
        }
        Ok(Column {
            name,
            values: ColumnValues::Numeric(values),
        })
    }

    pub fn categorical<S: AsRef<str>>(name: impl Into<String>, values: &[S]) -> Self {
        let classes: Vec<String> = values
            .iter()
            .map(|v| v.as_ref().to_string())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<&str, u32> = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i as u32))
            .collect();
        let codes = values.iter().map(|v| index[v.as_ref()]).collect();
        Column {
            name: name.into(),
            values: ColumnValues::Categorical { classes, codes },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ColumnKind {
        match self.values {
            ColumnValues::Numeric(_) => ColumnKind::Numeric,
            ColumnValues::Categorical { .. } => ColumnKind::Categorical,
        }
    }

    pub fn values(&self) -> &ColumnValues {
        &self.values
    }

    pub fn len(&self) -> usize {
        match &self.values {
            ColumnValues::Numeric(v) => v.len(),
            ColumnValues::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_numeric(&self) -> Option<&[f64]> {
        match &self.values {
            ColumnValues::Numeric(v) => Some(v),
            ColumnValues::Categorical { .. } => None,
        }
    }

    /// Class label of case index `row` (0-based), for categorical columns.
    pub fn class_at(&self, row: usize) -> Option<&str> {
        match &self.values {
            ColumnValues::Categorical { classes, codes } => {
                Some(classes[codes[row] as usize].as_str())
            }
            ColumnValues::Numeric(_) => None,
        }
    }

    /// Textual cell value as it would be written back to CSV.
    pub fn cell(&self, row: usize) -> String {
        match &self.values {
            ColumnValues::Numeric(v) => v[row].to_string(),
            ColumnValues::Categorical { classes, codes } => classes[codes[row] as usize].clone(),
        }
    }
}

/// Rectangular mixed-type data with optional ground-truth HDA labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_cases: usize,
    columns: Vec<Column>,
    labels: Option<Vec<bool>>,
}

impl Dataset {
    pub fn new(columns: Vec<Column>, labels: Option<Vec<bool>>) -> Result<Self> {
        let n_cases = columns.first().map(Column::len).unwrap_or(0);
        if n_cases == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::DuplicateColumn(c.name.clone()));
            }
            if c.len() != n_cases {
                return Err(Error::ColumnLength {
                    column: c.name.clone(),
                    expected: n_cases,
                    found: c.len(),
                });
            }
        }
        if let Some(l) = &labels {
            if l.len() != n_cases {
                return Err(Error::LengthMismatch {
                    left: n_cases,
                    right: l.len(),
                });
            }
        }
        Ok(Dataset {
            n_cases,
            columns,
            labels,
        })
    }

    pub fn n_cases(&self) -> usize {
        self.n_cases
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn labels(&self) -> Option<&[bool]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<bool>) -> Result<Self> {
        if labels.len() != self.n_cases {
            return Err(Error::LengthMismatch {
                left: self.n_cases,
                right: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn numeric_columns(&self) -> impl Iterator<Item = &Column> {
        self.columns
            .iter()
            .filter(|c| c.kind() == ColumnKind::Numeric)
    }

    pub fn categorical_columns(&self) -> impl Iterator<Item = &Column> {
        self.columns
            .iter()
            .filter(|c| c.kind() == ColumnKind::Categorical)
    }

    pub fn n_numeric(&self) -> usize {
        self.numeric_columns().count()
    }

    pub fn n_categorical(&self) -> usize {
        self.categorical_columns().count()
    }

    /// Per-case class combination over all categorical columns, as an index
    /// into the returned list of distinct combinations (sorted lexically).
    pub fn class_combinations(&self) -> (Vec<Vec<String>>, Vec<usize>) {
        let cats: Vec<&Column> = self.categorical_columns().collect();
        let tuples: Vec<Vec<String>> = (0..self.n_cases)
            .map(|g| {
                cats.iter()
                    .map(|c| c.class_at(g).unwrap_or_default().to_string())
                    .collect()
            })
            .collect();
        let distinct: Vec<Vec<String>> = tuples
            .iter()
            .cloned()
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<&Vec<String>, usize> =
            distinct.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let ids = tuples.iter().map(|t| index[t]).collect();
        (distinct, ids)
    }

    pub fn continuous_view(&self) -> Result<ContinuousView<'_>> {
        let columns: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind() == ColumnKind::Numeric)
            .map(|(i, _)| i)
            .collect();
        if columns.is_empty() {
            return Err(Error::NoNumericColumns);
        }
        Ok(ContinuousView {
            parent: self,
            columns,
        })
    }

    /// Dummy-encodes categorical columns (one column per class) and min-max
    /// normalizes every encoded column to [0, 1]. Constant columns map to 0.
    pub fn encode(&self, include_categoricals: bool) -> EncodedMatrix {
        let mut cols: Vec<(EncodedColumn, Vec<f64>)> = Vec::new();
        for (source, c) in self.columns.iter().enumerate() {
            match &c.values {
                ColumnValues::Numeric(v) => cols.push((
                    EncodedColumn {
                        source,
                        class: None,
                    },
                    min_max(v),
                )),
                ColumnValues::Categorical { classes, codes } if include_categoricals => {
                    for (k, class) in classes.iter().enumerate() {
                        let dummy: Vec<f64> = codes
                            .iter()
                            .map(|&code| if code as usize == k { 1.0 } else { 0.0 })
                            .collect();
                        cols.push((
                            EncodedColumn {
                                source,
                                class: Some(class.clone()),
                            },
                            min_max(&dummy),
                        ));
                    }
                }
                ColumnValues::Categorical { .. } => {}
            }
        }
        let n = self.n_cases;
        let m = cols.len();
        let mut data = vec![0.0; n * m];
        for (j, (_, v)) in cols.iter().enumerate() {
            for (g, x) in v.iter().enumerate() {
                data[g * m + j] = *x;
            }
        }
        EncodedMatrix {
            n,
            m,
            data,
            columns: cols.into_iter().map(|(c, _)| c).collect(),
        }
    }
}

fn min_max(v: &[f64]) -> Vec<f64> {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if span > 0.0 {
        v.iter().map(|x| ((x - lo) / span).clamp(0.0, 1.0)).collect()
    } else {
        vec![0.0; v.len()]
    }
}

/// The numeric ("dentribute") columns of a dataset.
#[derive(Debug, Clone)]
pub struct ContinuousView<'a> {
    parent: &'a Dataset,
    columns: Vec<usize>,
}

impl<'a> ContinuousView<'a> {
    pub fn parent(&self) -> &'a Dataset {
        self.parent
    }

    /// Number of numeric columns (p_c).
    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> impl Iterator<Item = &'a Column> + '_ {
        self.columns.iter().map(|&i| &self.parent.columns[i])
    }

    /// Standalone dataset holding only the numeric columns (labels dropped).
    pub fn to_dataset(&self) -> Dataset {
        Dataset {
            n_cases: self.parent.n_cases,
            columns: self.columns().cloned().collect(),
            labels: None,
        }
    }

    pub fn encode(&self) -> EncodedMatrix {
        self.parent.encode(false)
    }
}

/// Source of one encoded matrix column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedColumn {
    /// Index of the source column in the dataset.
    pub source: usize,
    /// Class represented by this dummy column; `None` for numeric columns.
    pub class: Option<String>,
}

/// Row-major n x m matrix with every entry in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedMatrix {
    n: usize,
    m: usize,
    data: Vec<f64>,
    columns: Vec<EncodedColumn>,
}

impl EncodedMatrix {
    /// Builds a matrix from raw rows without any normalization. Intended for
    /// detectors run directly on prepared coordinates.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let m = rows[0].len();
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            if r.len() != m {
                return Err(Error::LengthMismatch {
                    left: m,
                    right: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(EncodedMatrix {
            n,
            m,
            data,
            columns: (0..m)
                .map(|source| EncodedColumn {
                    source,
                    class: None,
                })
                .collect(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.m
    }

    pub fn row(&self, g: usize) -> &[f64] {
        &self.data[g * self.m..(g + 1) * self.m]
    }

    pub fn column_sources(&self) -> &[EncodedColumn] {
        &self.columns
    }

    pub fn get(&self, g: usize, j: usize) -> f64 {
        self.data[g * self.m + j]
    }
}

/// Per-case anomaly scores; the lowest score is the most anomalous case.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    values: Vec<f64>,
}

impl ScoreVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(g) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteScore(g + 1));
        }
        Ok(ScoreVector { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// Score of case `id` (1-based).
    pub fn score(&self, id: usize) -> Result<f64> {
        id.checked_sub(1)
            .and_then(|g| self.values.get(g).copied())
            .ok_or(Error::UnknownCase(id))
    }

    /// Case indices (0-based) from most to least anomalous; ties broken by
    /// ascending id.
    pub fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        idx.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]).then(a.cmp(&b)));
        idx
    }

    /// 1-based rank of every case under [`ScoreVector::order`].
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.values.len()];
        for (r, g) in self.order().into_iter().enumerate() {
            ranks[g] = r + 1;
        }
        ranks
    }

    /// 1-based rank of case `id` under ascending score, ties by ascending id.
    pub fn rank_of(&self, id: usize) -> Result<usize> {
        let s = self.score(id)?;
        let g = id - 1;
        Ok(1 + self
            .values
            .iter()
            .enumerate()
            .filter(|&(h, &v)| v < s || (v == s && h < g))
            .count())
    }

    /// Negated copy; turns "largest = most anomalous" raw scores into the
    /// canonical orientation.
    pub(crate) fn from_raw_descending(raw: Vec<f64>) -> Result<Self> {
        ScoreVector::new(raw.into_iter().map(|v| -v).collect())
    }
}

/// Declared kinds for CSV columns; undeclared columns are inferred (numeric
/// when every cell parses as a finite number, categorical otherwise).
#[derive(Debug, Clone, Default)]
pub struct Schema {
    kinds: BTreeMap<String, ColumnKind>,
}

impl Schema {
    pub fn infer() -> Self {
        Schema::default()
    }

    pub fn numeric(mut self, name: &str) -> Self {
        self.kinds.insert(name.to_string(), ColumnKind::Numeric);
        self
    }

    pub fn categorical(mut self, name: &str) -> Self {
        self.kinds.insert(name.to_string(), ColumnKind::Categorical);
        self
    }

    pub fn kind_of(&self, name: &str) -> Option<ColumnKind> {
        self.kinds.get(name).copied()
    }
}

fn parse_label(raw: &str, row: u64) -> Result<bool> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "1" | "true" => Ok(true),
        "0" | "false" => Ok(false),
        _ => Err(Error::BadLabel {
            row,
            value: raw.to_string(),
        }),
    }
}

fn parse_finite(raw: &str) -> Option<f64> {
    raw.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads a headered CSV file. Row numbers in errors are file line numbers
/// (the header is line 1).
pub fn load_dataset(path: &Path, schema: &Schema, label_column: Option<&str>) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }
    let mut seen = HashSet::new();
    for h in &headers {
        if !seen.insert(h.as_str()) {
            return Err(Error::DuplicateColumn(h.clone()));
        }
    }
    let label_idx = match label_column {
        Some(name) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::UnknownColumn(name.to_string()))?,
        ),
        None => None,
    };

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    let mut lines: Vec<u64> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        for (j, field) in record.iter().enumerate() {
            if field.trim().is_empty() {
                return Err(Error::MissingValue {
                    row: line,
                    column: headers[j].clone(),
                });
            }
            cells[j].push(field.to_string());
        }
        lines.push(line);
    }
    if lines.is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }

    let mut labels = None;
    let mut columns = Vec::new();
    for (j, (name, raw)) in headers.iter().zip(cells).enumerate() {
        if Some(j) == label_idx {
            let parsed = raw
                .iter()
                .zip(&lines)
                .map(|(v, &row)| parse_label(v, row))
                .collect::<Result<Vec<bool>>>()?;
            labels = Some(parsed);
            continue;
        }
        let kind = schema.kind_of(name).unwrap_or_else(|| {
            if raw.iter().all(|v| parse_finite(v).is_some()) {
                ColumnKind::Numeric
            } else {
                ColumnKind::Categorical
            }
        });
        let column = match kind {
            ColumnKind::Numeric => {
                let values = raw
                    .iter()
                    .zip(&lines)
                    .map(|(v, &row)| {
                        parse_finite(v).ok_or_else(|| Error::NotNumeric {
                            row,
                            column: name.clone(),
                            value: v.clone(),
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Column::numeric(name.clone(), values)?
            }
            ColumnKind::Categorical => Column::categorical(name.clone(), &raw),
        };
        columns.push(column);
    }
    for name in schema.kinds.keys() {
        if !headers.contains(name) {
            return Err(Error::UnknownColumn(name.clone()));
        }
    }
    Dataset::new(columns, labels)
}

/// Writes the dataset (and its labels, as 0/1, under `label_name`) to CSV.
pub fn write_dataset<W: std::io::Write>(
    ds: &Dataset,
    label_name: &str,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = ds.columns.iter().map(|c| c.name.as_str()).collect();
    if ds.labels.is_some() {
        header.push(label_name);
    }
    w.write_record(&header)?;
    for g in 0..ds.n_cases {
        let mut rec: Vec<String> = ds.columns.iter().map(|c| c.cell(g)).collect();
        if let Some(l) = &ds.labels {
            rec.push(if l[g] { "1" } else { "0" }.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<output>".into(),
        source,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(cols: Vec<Column>) -> Dataset {
        Dataset::new(cols, None).unwrap()
    }

    #[test]
    fn minmax_numeric() {
        let m = ds(vec![Column::numeric("x", vec![2.0, 4.0, 6.0]).unwrap()]).encode(true);
        assert_eq!((0..3).map(|g| m.get(g, 0)).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn one_hot_categorical() {
        let m = ds(vec![
            Column::numeric("x", vec![1.0, 2.0, 3.0]).unwrap(),
            Column::categorical("c", &["A", "B", "A"]),
        ])
        .encode(true);
        assert_eq!(m.n_cols(), 3);
        let col = |j: usize| (0..3).map(|g| m.get(g, j)).collect::<Vec<_>>();
        assert_eq!(col(1), vec![1.0, 0.0, 1.0]);
        assert_eq!(col(2), vec![0.0, 1.0, 0.0]);
        assert_eq!(m.column_sources().len(), 3);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let m = ds(vec![Column::numeric("x", vec![5.0, 5.0, 5.0]).unwrap()]).encode(true);
        assert!((0..3).all(|g| m.get(g, 0) == 0.0));
    }

    #[test]
    fn continuous_encoding_drops_categoricals() {
        let d = ds(vec![
            Column::numeric("x", vec![1.0, 2.0]).unwrap(),
            Column::categorical("c", &["A", "B"]),
        ]);
        assert_eq!(d.encode(false).n_cols(), 1);
    }

    #[test]
    fn continuous_view_counts() {
        let num = |name: &str| Column::numeric(name, vec![1.0, 2.0]).unwrap();
        let cat = |name: &str| Column::categorical(name, &["a", "b"]);
        let d = ds(vec![num("x1"), num("x2"), num("x3"), cat("c")]);
        assert_eq!(d.continuous_view().unwrap().n_columns(), 3);
        let d = ds(vec![num("x1"), cat("c1"), num("x2"), cat("c2"), num("x3")]);
        let view = d.continuous_view().unwrap();
        assert_eq!(view.n_columns(), 3);
        assert!(view.columns().all(|c| c.kind() == ColumnKind::Numeric));
        let d = ds(vec![cat("c1"), cat("c2")]);
        assert!(matches!(d.continuous_view(), Err(Error::NoNumericColumns)));
    }

    #[test]
    fn rank_examples() {
        let s = ScoreVector::new(vec![0.5, 0.1, 0.9]).unwrap();
        assert_eq!(s.rank_of(2).unwrap(), 1);
        let t = ScoreVector::new(vec![0.1, 0.1]).unwrap();
        assert_eq!((t.rank_of(1).unwrap(), t.rank_of(2).unwrap()), (1, 2));
        let u = ScoreVector::new(vec![3.0, 2.0, 1.0]).unwrap();
        assert_eq!(u.rank_of(1).unwrap(), 3);
        assert!(matches!(u.rank_of(4), Err(Error::UnknownCase(4))));
    }

    #[test]
    fn rejects_malformed_datasets() {
        assert!(Column::numeric("x", vec![1.0, f64::NAN]).is_err());
        assert!(ScoreVector::new(vec![f64::INFINITY]).is_err());
        let a = Column::numeric("x", vec![1.0, 2.0]).unwrap();
        let b = Column::numeric("x", vec![3.0, 4.0]).unwrap();
        assert!(matches!(
            Dataset::new(vec![a.clone(), b], None),
            Err(Error::DuplicateColumn(_))
        ));
        let short = Column::numeric("y", vec![1.0]).unwrap();
        assert!(Dataset::new(vec![a.clone(), short], None).is_err());
        assert!(Dataset::new(vec![a], Some(vec![true])).is_err());
    }
}
