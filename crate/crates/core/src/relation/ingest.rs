use std::collections::HashMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::Deserialize;

use super::value::normalize_float;
use super::{assign_ranks, Column, ColumnKind, ColumnMeta, Relation, RelationError, Value};

/// Column kinds forced by the caller instead of inferred, e.g. to keep an
/// identifier column categorical even though every value parses as a number.
///
/// Read from JSON shaped like `{"columns": {"SSN": "categorical"}}`.
#[derive(Clone, Debug, Default, Deserialize)]
pub struct Schema {
    pub columns: HashMap<String, ColumnKind>,
}

impl Schema {
    pub fn from_json(text: &str) -> Result<Schema, RelationError> {
        serde_json::from_str(text).map_err(|e| RelationError::Schema(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Schema, RelationError> {
        Schema::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug)]
pub struct IngestOptions {
    pub name: Option<String>,
    pub null_tokens: Vec<String>,
    pub schema: Option<Schema>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            name: None,
            null_tokens: vec![String::new(), "NULL".into(), "null".into()],
            schema: None,
        }
    }
}

pub fn ingest_csv(path: impl AsRef<Path>, options: &IngestOptions) -> Result<Relation, RelationError> {
    let path = path.as_ref();
    let mut options = options.clone();
    if options.name.is_none() {
        options.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    }
    ingest_reader(File::open(path)?, &options)
}

/// Reads CSV with a header row. Kinds are inferred per column in the order
/// integer, float, datetime, categorical unless the schema says otherwise.
pub fn ingest_reader<R: Read>(reader: R, options: &IngestOptions) -> Result<Relation, RelationError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(RelationError::MissingHeader);
    }
    for (i, h) in headers.iter().enumerate() {
        if headers[..i].contains(h) {
            return Err(RelationError::DuplicateColumn(h.clone()));
        }
    }
    if let Some(schema) = &options.schema {
        if let Some(unknown) = schema.columns.keys().find(|k| !headers.contains(k)) {
            return Err(RelationError::UnknownColumn(unknown.clone()));
        }
    }

    let mut raw: Vec<Vec<Option<String>>> = vec![Vec::new(); headers.len()];
    let mut lines = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(RelationError::RaggedRow {
                line,
                expected: headers.len(),
                found: record.len(),
            });
        }
        for (col, field) in record.iter().enumerate() {
            let cell = if options.null_tokens.iter().any(|t| t == field) {
                None
            } else {
                Some(field.to_string())
            };
            raw[col].push(cell);
        }
        lines.push(line);
    }

    let mut columns = Vec::with_capacity(headers.len());
    for (name, cells) in headers.into_iter().zip(raw) {
        let forced = options.schema.as_ref().and_then(|s| s.columns.get(&name).copied());
        columns.push(build_column(name, cells, forced, &lines)?);
    }
    assign_ranks(&mut columns);
    Ok(Relation {
        name: options.name.clone().unwrap_or_else(|| "relation".into()),
        rows: lines.len(),
        columns,
    })
}

fn build_column(
    name: String,
    cells: Vec<Option<String>>,
    forced: Option<ColumnKind>,
    lines: &[u64],
) -> Result<Column, RelationError> {
    let present = || cells.iter().flatten();
    let (kind, values) = match forced {
        Some(ColumnKind::Categorical) => (ColumnKind::Categorical, None),
        Some(kind) => {
            let parse: fn(&str) -> Option<Value> = match kind {
                ColumnKind::Numeric => parse_number,
                _ => parse_datetime,
            };
            let mut values = Vec::with_capacity(cells.len());
            for (cell, &line) in cells.iter().zip(lines) {
                values.push(match cell {
                    None => Value::Null,
                    Some(s) => parse(s).ok_or_else(|| RelationError::BadValue {
                        column: name.clone(),
                        line,
                        value: s.clone(),
                        kind,
                    })?,
                });
            }
            (kind, Some(values))
        }
        None if present().next().is_none() => (ColumnKind::Categorical, None),
        None if present().all(|s| s.parse::<i64>().is_ok()) => (
            ColumnKind::Numeric,
            Some(parse_all(&cells, |s| Value::Int(s.parse().unwrap()))),
        ),
        None if present().all(|s| parse_float(s).is_some()) => (
            ColumnKind::Numeric,
            Some(parse_all(&cells, |s| Value::Float(parse_float(s).unwrap()))),
        ),
        None if present().all(|s| parse_datetime(s).is_some()) => (
            ColumnKind::Datetime,
            Some(parse_all(&cells, |s| parse_datetime(s).unwrap())),
        ),
        None => (ColumnKind::Categorical, None),
    };

    let nullable = cells.iter().any(Option::is_none);
    let mut dict = Vec::new();
    let values = match values {
        Some(v) => v,
        None => {
            let mut codes: HashMap<String, u32> = HashMap::new();
            cells
                .into_iter()
                .map(|c| match c {
                    None => Value::Null,
                    Some(s) => {
                        let next = codes.len() as u32;
                        let code = *codes.entry(s.clone()).or_insert(next);
                        if code == next {
                            dict.push(s);
                        }
                        Value::Code(code)
                    }
                })
                .collect()
        }
    };
    Ok(Column {
        meta: ColumnMeta { name, kind, nullable },
        values,
        dict,
        rank: Vec::new(),
    })
}

fn parse_all(cells: &[Option<String>], f: impl Fn(&str) -> Value) -> Vec<Value> {
    cells.iter().map(|c| c.as_deref().map_or(Value::Null, &f)).collect()
}

fn parse_float(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|f| f.is_finite()).map(normalize_float)
}

fn parse_number(s: &str) -> Option<Value> {
    match s.parse::<i64>() {
        Ok(i) => Some(Value::Int(i)),
        Err(_) => parse_float(s).map(Value::Float),
    }
}

fn parse_datetime(s: &str) -> Option<Value> {
    let secs = if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        d.and_hms_opt(0, 0, 0)?.and_utc().timestamp()
    } else if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        dt.timestamp()
    } else if let Ok(dt) = NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S") {
        dt.and_utc().timestamp()
    } else if let Ok(dt) = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S") {
        dt.and_utc().timestamp()
    } else {
        return None;
    };
    Some(Value::Int(secs))
}
