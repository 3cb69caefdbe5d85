//! Columnar relations with typed, dictionary-encoded columns.

mod ingest;
mod value;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ingest::{ingest_csv, ingest_reader, IngestOptions, Schema};
pub use value::{Key, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Datetime,
}

impl ColumnKind {
    /// Whether `<`, `<=`, `>` and `>=` may be applied to this kind.
    pub fn is_ordered(self) -> bool {
        !matches!(self, ColumnKind::Categorical)
    }
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnKind::Numeric => "numeric",
            ColumnKind::Categorical => "categorical",
            ColumnKind::Datetime => "datetime",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnMeta {
    pub name: String,
    pub kind: ColumnKind,
    pub nullable: bool,
}

#[derive(Error, Debug)]
pub enum RelationError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow { line: u64, expected: usize, found: usize },
    #[error("input has no header row")]
    MissingHeader,
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("column `{column}` has {found} values, expected {expected}")]
    LengthMismatch {
        column: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("column `{column}`, line {line}: cannot read `{value}` as {kind}")]
    BadValue {
        column: String,
        line: u64,
        value: String,
        kind: ColumnKind,
    },
    #[error("invalid schema: {0}")]
    Schema(String),
}

#[derive(Clone, Debug)]
struct Column {
    meta: ColumnMeta,
    values: Vec<Value>,
    dict: Vec<String>,
    // Position of each dictionary entry in the sorted union of all dictionaries.
    rank: Vec<u32>,
}

/// Summary statistics for one column.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnStats {
    pub distinct: usize,
    pub nulls: usize,
    pub min: Option<Key>,
    pub max: Option<Key>,
}

#[derive(Clone, Debug)]
pub struct Relation {
    name: String,
    columns: Vec<Column>,
    rows: usize,
}

impl Relation {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, col: usize) -> &ColumnMeta {
        &self.columns[col].meta
    }

    pub fn columns(&self) -> impl Iterator<Item = &ColumnMeta> {
        self.columns.iter().map(|c| &c.meta)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.meta.name == name)
    }

    pub fn value(&self, col: usize, row: usize) -> Value {
        self.columns[col].values[row]
    }

    pub fn is_null(&self, col: usize, row: usize) -> bool {
        self.columns[col].values[row].is_null()
    }

    /// Ordered coordinate of a cell, `None` for NULL. Categorical cells map to
    /// their lexicographic rank across every dictionary in the relation, so
    /// codes from different columns compare consistently.
    pub fn key(&self, col: usize, row: usize) -> Option<Key> {
        let c = &self.columns[col];
        match c.values[row] {
            Value::Int(v) => Some(Key::Int(v)),
            Value::Float(v) => Some(Key::Float(v)),
            Value::Code(code) => Some(Key::Int(c.rank[code as usize] as i64)),
            Value::Null => None,
        }
    }

    /// Hashable identity of a cell within its column, `None` for NULL.
    pub fn eq_code(&self, col: usize, row: usize) -> Option<u64> {
        match self.columns[col].values[row] {
            Value::Int(v) => Some(v as u64),
            Value::Float(v) => Some(v.to_bits()),
            Value::Code(code) => Some(code as u64),
            Value::Null => None,
        }
    }

    /// Dictionary string for a categorical code.
    pub fn category(&self, col: usize, code: u32) -> &str {
        &self.columns[col].dict[code as usize]
    }

    /// Cell rendered as text; NULL renders as the empty string.
    pub fn text(&self, col: usize, row: usize) -> String {
        match self.columns[col].values[row] {
            Value::Int(v) if self.columns[col].meta.kind == ColumnKind::Datetime => {
                match chrono::DateTime::from_timestamp(v, 0) {
                    Some(dt) => dt.naive_utc().to_string(),
                    None => v.to_string(),
                }
            }
            Value::Int(v) => v.to_string(),
            Value::Float(v) => v.to_string(),
            Value::Code(code) => self.category(col, code).to_string(),
            Value::Null => String::new(),
        }
    }

    /// Values of one row restricted to `cols`.
    pub fn project(&self, row: usize, cols: &[usize]) -> Vec<Value> {
        cols.iter().map(|&c| self.value(c, row)).collect()
    }

    pub fn stats(&self, col: usize) -> ColumnStats {
        let mut nulls = 0;
        let mut min: Option<Key> = None;
        let mut max: Option<Key> = None;
        let mut seen = HashSet::new();
        for row in 0..self.rows {
            match self.key(col, row) {
                None => nulls += 1,
                Some(k) => {
                    seen.insert(self.eq_code(col, row));
                    if min.is_none_or(|m| k < m) {
                        min = Some(k);
                    }
                    if max.is_none_or(|m| k > m) {
                        max = Some(k);
                    }
                }
            }
        }
        ColumnStats {
            distinct: seen.len(),
            nulls,
            min,
            max,
        }
    }

    /// New relation keeping only `cols`, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Relation {
        Relation {
            name: self.name.clone(),
            columns: cols.iter().map(|&c| self.columns[c].clone()).collect(),
            rows: self.rows,
        }
    }

    /// New relation keeping only `rows`, in the given order.
    pub fn take_rows(&self, rows: &[usize]) -> Relation {
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                meta: ColumnMeta {
                    nullable: rows.iter().any(|&r| c.values[r].is_null()),
                    ..c.meta.clone()
                },
                values: rows.iter().map(|&r| c.values[r]).collect(),
                dict: c.dict.clone(),
                rank: c.rank.clone(),
            })
            .collect();
        Relation {
            name: self.name.clone(),
            columns,
            rows: rows.len(),
        }
    }
}

/// `|dom(A) ∩ dom(B)| / min(|dom(A)|, |dom(B)|)` over non-null values.
/// Columns of different kinds, or an empty domain, give 0.
pub fn domain_overlap(relation: &Relation, a: usize, b: usize) -> f64 {
    let (ka, kb) = (relation.column(a).kind, relation.column(b).kind);
    if ka != kb {
        return 0.0;
    }
    let n = relation.row_count();
    let (inter, da, db) = if ka == ColumnKind::Categorical {
        let dom = |col: usize| -> HashSet<&str> {
            (0..n)
                .filter_map(|r| match relation.value(col, r) {
                    Value::Code(code) => Some(relation.category(col, code)),
                    _ => None,
                })
                .collect()
        };
        let (x, y) = (dom(a), dom(b));
        (x.intersection(&y).count(), x.len(), y.len())
    } else {
        let dom = |col: usize| -> BTreeSet<Key> { (0..n).filter_map(|r| relation.key(col, r)).collect() };
        let (x, y) = (dom(a), dom(b));
        (x.intersection(&y).count(), x.len(), y.len())
    };
    let denom = da.min(db);
    if denom == 0 {
        0.0
    } else {
        inter as f64 / denom as f64
    }
}

/// Column-at-a-time constructor for relations built in code.
#[derive(Default)]
pub struct RelationBuilder {
    name: String,
    columns: Vec<Column>,
    error: Option<RelationError>,
}

impl RelationBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        RelationBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn int(self, name: &str, values: impl IntoIterator<Item = i64>) -> Self {
        self.nullable_int(name, values.into_iter().map(Some))
    }

    pub fn nullable_int(self, name: &str, values: impl IntoIterator<Item = Option<i64>>) -> Self {
        let values = values.into_iter().map(|v| v.map_or(Value::Null, Value::Int)).collect();
        self.push(name, ColumnKind::Numeric, values, Vec::new())
    }

    pub fn float(self, name: &str, values: impl IntoIterator<Item = f64>) -> Self {
        self.nullable_float(name, values.into_iter().map(Some))
    }

    pub fn nullable_float(self, name: &str, values: impl IntoIterator<Item = Option<f64>>) -> Self {
        let values = values
            .into_iter()
            .map(|v| match v {
                Some(f) if f.is_finite() => Value::Float(value::normalize_float(f)),
                _ => Value::Null,
            })
            .collect();
        self.push(name, ColumnKind::Numeric, values, Vec::new())
    }

    /// Datetime column given as seconds since the Unix epoch.
    pub fn datetime(self, name: &str, values: impl IntoIterator<Item = i64>) -> Self {
        let values = values.into_iter().map(Value::Int).collect();
        self.push(name, ColumnKind::Datetime, values, Vec::new())
    }

    pub fn text<S: AsRef<str>>(self, name: &str, values: impl IntoIterator<Item = S>) -> Self {
        self.nullable_text(name, values.into_iter().map(Some))
    }

    pub fn nullable_text<S: AsRef<str>>(self, name: &str, values: impl IntoIterator<Item = Option<S>>) -> Self {
        let mut dict = Vec::new();
        let mut codes: HashMap<String, u32> = HashMap::new();
        let values = values
            .into_iter()
            .map(|v| match v {
                None => Value::Null,
                Some(s) => {
                    let s = s.as_ref();
                    let code = *codes.entry(s.to_string()).or_insert_with(|| {
                        dict.push(s.to_string());
                        (dict.len() - 1) as u32
                    });
                    Value::Code(code)
                }
            })
            .collect();
        self.push(name, ColumnKind::Categorical, values, dict)
    }

    fn push(mut self, name: &str, kind: ColumnKind, values: Vec<Value>, dict: Vec<String>) -> Self {
        if self.error.is_none() && self.columns.iter().any(|c| c.meta.name == name) {
            self.error = Some(RelationError::DuplicateColumn(name.to_string()));
        }
        self.columns.push(Column {
            meta: ColumnMeta {
                name: name.to_string(),
                kind,
                nullable: values.iter().any(Value::is_null),
            },
            values,
            dict,
            rank: Vec::new(),
        });
        self
    }

    pub fn build(self) -> Result<Relation, RelationError> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let rows = self.columns.first().map_or(0, |c| c.values.len());
        for c in &self.columns {
            if c.values.len() != rows {
                return Err(RelationError::LengthMismatch {
                    column: c.meta.name.clone(),
                    expected: rows,
                    found: c.values.len(),
                });
            }
        }
        let mut columns = self.columns;
        assign_ranks(&mut columns);
        Ok(Relation {
            name: self.name,
            columns,
            rows,
        })
    }
}

fn assign_ranks(columns: &mut [Column]) {
    let all: BTreeSet<&str> = columns.iter().flat_map(|c| c.dict.iter().map(String::as_str)).collect();
    let index: HashMap<&str, u32> = all.into_iter().enumerate().map(|(i, s)| (s, i as u32)).collect();
    let ranks: Vec<Vec<u32>> = columns
        .iter()
        .map(|c| c.dict.iter().map(|s| index[s.as_str()]).collect())
        .collect();
    for (c, r) in columns.iter_mut().zip(ranks) {
        c.rank = r;
    }
}
