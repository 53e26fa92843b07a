//! Mixed-type table with an explicit per-cell missing mask, schema sidecar
//! parsing, CSV I/O, missingness accounting, and list-wise deletion.
//!
//! CSV convention: UTF-8, comma-separated, first row is the header, the empty
//! string encodes a missing cell. The schema sidecar is plain text, one column
//! per line, `name|kind|levels-or-range|role` with levels written `a;b;c` and
//! ranges written `min..max` (empty third field = range derived from data).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnKind {
    Categorical { levels: Vec<String> },
    Numerical { min: Option<f64>, max: Option<f64> },
}

impl ColumnKind {
    pub fn is_categorical(&self) -> bool {
        matches!(self, ColumnKind::Categorical { .. })
    }

    pub fn is_numerical(&self) -> bool {
        matches!(self, ColumnKind::Numerical { .. })
    }

    /// Width of the numerical range, when both ends are known.
    pub fn range(&self) -> Option<f64> {
        match self {
            ColumnKind::Numerical {
                min: Some(lo),
                max: Some(hi),
            } => Some(hi - lo),
            _ => None,
        }
    }

    pub fn levels(&self) -> &[String] {
        match self {
            ColumnKind::Categorical { levels } => levels,
            ColumnKind::Numerical { .. } => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnRole {
    Feature,
    Label,
    Identifier,
}

impl ColumnRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            ColumnRole::Feature => "feature",
            ColumnRole::Label => "label",
            ColumnRole::Identifier => "identifier",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    pub role: ColumnRole,
}

impl ColumnSchema {
    pub fn categorical(name: &str, levels: &[&str], role: ColumnRole) -> Self {
        ColumnSchema {
            name: name.to_string(),
            kind: ColumnKind::Categorical {
                levels: levels.iter().map(|s| s.to_string()).collect(),
            },
            role,
        }
    }

    pub fn numerical(name: &str, role: ColumnRole) -> Self {
        ColumnSchema {
            name: name.to_string(),
            kind: ColumnKind::Numerical {
                min: None,
                max: None,
            },
            role,
        }
    }
}

/// A single cell value; categorical cells hold a level index into the
/// column's schema level list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Num(f64),
    Cat(u32),
}

#[derive(Debug, Clone, PartialEq)]
enum ColumnData {
    Num(Vec<f64>),
    Cat(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq)]
struct Column {
    data: ColumnData,
    /// true = observed
    mask: Vec<bool>,
}

/// Rectangular mixed-type table. Masked-missing cells store a canonical zero
/// so that structural equality compares schemas, masks, and observed values.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    schema: Vec<ColumnSchema>,
    columns: Vec<Column>,
    n_rows: usize,
}

fn validate_schema(schema: &[ColumnSchema]) -> Result<()> {
    let mut seen = HashMap::new();
    for (i, col) in schema.iter().enumerate() {
        if col.name.is_empty() {
            return Err(Error::SchemaInvalid(format!("column {i} has empty name")));
        }
        if let Some(prev) = seen.insert(col.name.clone(), i) {
            return Err(Error::SchemaInvalid(format!(
                "duplicate column name {:?} (columns {prev} and {i})",
                col.name
            )));
        }
        match &col.kind {
            ColumnKind::Categorical { levels } => {
                if levels.is_empty() {
                    return Err(Error::SchemaInvalid(format!(
                        "categorical column {:?} has no levels",
                        col.name
                    )));
                }
                let mut level_seen = HashMap::new();
                for (j, level) in levels.iter().enumerate() {
                    if level.is_empty() {
                        return Err(Error::SchemaInvalid(format!(
                            "column {:?}: empty level name",
                            col.name
                        )));
                    }
                    if level.contains(';') || level.contains('|') || level.contains('\n') {
                        return Err(Error::SchemaInvalid(format!(
                            "column {:?}: level {level:?} contains a reserved character",
                            col.name
                        )));
                    }
                    if level_seen.insert(level.clone(), j).is_some() {
                        return Err(Error::SchemaInvalid(format!(
                            "column {:?}: duplicate level {level:?}",
                            col.name
                        )));
                    }
                }
            }
            ColumnKind::Numerical { min, max } => {
                if let (Some(lo), Some(hi)) = (min, max) {
                    if lo > hi {
                        return Err(Error::SchemaInvalid(format!(
                            "column {:?}: range min {lo} exceeds max {hi}",
                            col.name
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

impl DataTable {
    /// Empty table (zero rows) over a validated schema.
    pub fn new(schema: Vec<ColumnSchema>) -> Result<Self> {
        validate_schema(&schema)?;
        let columns = schema
            .iter()
            .map(|c| Column {
                data: match c.kind {
                    ColumnKind::Categorical { .. } => ColumnData::Cat(Vec::new()),
                    ColumnKind::Numerical { .. } => ColumnData::Num(Vec::new()),
                },
                mask: Vec::new(),
            })
            .collect();
        Ok(DataTable {
            schema,
            columns,
            n_rows: 0,
        })
    }

    /// Table of `n_rows` all-missing rows.
    pub fn with_rows(schema: Vec<ColumnSchema>, n_rows: usize) -> Result<Self> {
        let mut t = DataTable::new(schema)?;
        t.n_rows = n_rows;
        for col in &mut t.columns {
            match &mut col.data {
                ColumnData::Num(v) => v.resize(n_rows, 0.0),
                ColumnData::Cat(v) => v.resize(n_rows, 0),
            }
            col.mask.resize(n_rows, false);
        }
        Ok(t)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.schema.len()
    }

    pub fn schema(&self) -> &[ColumnSchema] {
        &self.schema
    }

    pub(crate) fn schema_mut(&mut self) -> &mut [ColumnSchema] {
        &mut self.schema
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|c| c.name == name)
    }

    /// Indices of feature-role columns, in schema order.
    pub fn feature_cols(&self) -> Vec<usize> {
        (0..self.n_cols())
            .filter(|&c| self.schema[c].role == ColumnRole::Feature)
            .collect()
    }

    /// Index of the unique label column.
    pub fn label_col(&self) -> Result<usize> {
        let labels: Vec<usize> = (0..self.n_cols())
            .filter(|&c| self.schema[c].role == ColumnRole::Label)
            .collect();
        match labels.as_slice() {
            [c] => Ok(*c),
            [] => Err(Error::SchemaInvalid("no label column".into())),
            _ => Err(Error::SchemaInvalid("multiple label columns".into())),
        }
    }

    pub fn is_observed(&self, row: usize, col: usize) -> bool {
        self.columns[col].mask[row]
    }

    /// Observed value at (row, col); `None` when the cell is missing.
    pub fn value(&self, row: usize, col: usize) -> Option<Value> {
        if !self.columns[col].mask[row] {
            return None;
        }
        Some(match &self.columns[col].data {
            ColumnData::Num(v) => Value::Num(v[row]),
            ColumnData::Cat(v) => Value::Cat(v[row]),
        })
    }

    pub fn num(&self, row: usize, col: usize) -> Option<f64> {
        match self.value(row, col) {
            Some(Value::Num(x)) => Some(x),
            Some(Value::Cat(_)) => panic!("column {col} is categorical"),
            None => None,
        }
    }

    pub fn cat(&self, row: usize, col: usize) -> Option<u32> {
        match self.value(row, col) {
            Some(Value::Cat(x)) => Some(x),
            Some(Value::Num(_)) => panic!("column {col} is numerical"),
            None => None,
        }
    }

    pub fn set(&mut self, row: usize, col: usize, value: Value) {
        match (&mut self.columns[col].data, value) {
            (ColumnData::Num(v), Value::Num(x)) => {
                assert!(x.is_finite(), "non-finite value in column {col}");
                v[row] = x;
            }
            (ColumnData::Cat(v), Value::Cat(x)) => {
                let n_levels = self.schema[col].kind.levels().len();
                assert!((x as usize) < n_levels, "level {x} out of range");
                v[row] = x;
            }
            _ => panic!("value kind does not match column {col}"),
        }
        self.columns[col].mask[row] = true;
    }

    /// Mask a cell as missing; the stored value is reset to a canonical zero
    /// so structural equality never sees stale payloads.
    pub fn set_missing(&mut self, row: usize, col: usize) {
        match &mut self.columns[col].data {
            ColumnData::Num(v) => v[row] = 0.0,
            ColumnData::Cat(v) => v[row] = 0,
        }
        self.columns[col].mask[row] = false;
    }

    /// Append a row given one optional value per column.
    pub fn push_row(&mut self, cells: Vec<Option<Value>>) {
        assert_eq!(cells.len(), self.n_cols(), "row width mismatch");
        let row = self.n_rows;
        self.n_rows += 1;
        for col in &mut self.columns {
            match &mut col.data {
                ColumnData::Num(v) => v.push(0.0),
                ColumnData::Cat(v) => v.push(0),
            }
            col.mask.push(false);
        }
        for (c, cell) in cells.into_iter().enumerate() {
            if let Some(v) = cell {
                self.set(row, c, v);
            }
        }
    }

    pub fn level_name(&self, col: usize, level: u32) -> &str {
        &self.schema[col].kind.levels()[level as usize]
    }

    pub fn observed_count(&self, col: usize) -> usize {
        self.columns[col].mask.iter().filter(|&&m| m).count()
    }

    /// Number of missing cells across feature-role columns.
    pub fn missing_feature_cells(&self) -> usize {
        self.feature_cols()
            .iter()
            .map(|&c| self.n_rows - self.observed_count(c))
            .sum()
    }

    /// New table over a column subset (in the given order), same rows.
    pub fn select_columns(&self, cols: &[usize]) -> DataTable {
        let schema: Vec<ColumnSchema> = cols.iter().map(|&c| self.schema[c].clone()).collect();
        let mut out =
            DataTable::with_rows(schema, self.n_rows).expect("subset of a valid schema");
        for (new_c, &old_c) in cols.iter().enumerate() {
            for r in 0..self.n_rows {
                if let Some(v) = self.value(r, old_c) {
                    out.set(r, new_c, v);
                }
            }
        }
        out
    }

    /// New table holding the given rows (in the given order), same schema.
    pub fn select_rows(&self, rows: &[usize]) -> DataTable {
        let mut out = DataTable::with_rows(self.schema.clone(), rows.len())
            .expect("schema already validated");
        for (new_r, &old_r) in rows.iter().enumerate() {
            for c in 0..self.n_cols() {
                if let Some(v) = self.value(old_r, c) {
                    out.set(new_r, c, v);
                }
            }
        }
        out
    }

    /// Fill open numerical ranges from observed data. Ranges already present
    /// in the schema are left untouched.
    pub fn derive_open_ranges(&mut self) {
        for c in 0..self.n_cols() {
            if let ColumnKind::Numerical { min, max } = &self.schema[c].kind {
                if min.is_some() && max.is_some() {
                    continue;
                }
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                let mut any = false;
                if let ColumnData::Num(v) = &self.columns[c].data {
                    for (r, &x) in v.iter().enumerate() {
                        if self.columns[c].mask[r] {
                            lo = lo.min(x);
                            hi = hi.max(x);
                            any = true;
                        }
                    }
                }
                if any {
                    self.schema[c].kind = ColumnKind::Numerical {
                        min: Some(lo),
                        max: Some(hi),
                    };
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Schema sidecar
// ---------------------------------------------------------------------------

fn format_f64(x: f64) -> String {
    // shortest representation that round-trips through FromStr
    format!("{x}")
}

pub fn render_schema(schema: &[ColumnSchema]) -> String {
    let mut out = String::new();
    for col in schema {
        let (kind, detail) = match &col.kind {
            ColumnKind::Categorical { levels } => ("categorical", levels.join(";")),
            ColumnKind::Numerical { min, max } => {
                let detail = match (min, max) {
                    (Some(lo), Some(hi)) => format!("{}..{}", format_f64(*lo), format_f64(*hi)),
                    _ => String::new(),
                };
                ("numerical", detail)
            }
        };
        writeln!(out, "{}|{}|{}|{}", col.name, kind, detail, col.role.as_str()).unwrap();
    }
    out
}

pub fn parse_schema(text: &str, path: &Path) -> Result<Vec<ColumnSchema>> {
    let mut schema = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('|').collect();
        if fields.len() != 4 {
            return Err(Error::SchemaParse {
                path: path.to_path_buf(),
                line: lineno,
                msg: format!("expected 4 '|'-separated fields, found {}", fields.len()),
            });
        }
        let name = fields[0].to_string();
        let kind = match fields[1] {
            "categorical" => ColumnKind::Categorical {
                levels: fields[2].split(';').map(|s| s.to_string()).collect(),
            },
            "numerical" => {
                if fields[2].is_empty() {
                    ColumnKind::Numerical {
                        min: None,
                        max: None,
                    }
                } else {
                    let parse = |s: &str| -> Result<f64> {
                        s.parse::<f64>().map_err(|_| Error::SchemaParse {
                            path: path.to_path_buf(),
                            line: lineno,
                            msg: format!("bad range endpoint {s:?}"),
                        })
                    };
                    // split on the first ".." that is not part of a leading sign
                    let Some(pos) = find_range_separator(fields[2]) else {
                        return Err(Error::SchemaParse {
                            path: path.to_path_buf(),
                            line: lineno,
                            msg: format!("range {:?} is not of the form min..max", fields[2]),
                        });
                    };
                    ColumnKind::Numerical {
                        min: Some(parse(&fields[2][..pos])?),
                        max: Some(parse(&fields[2][pos + 2..])?),
                    }
                }
            }
            other => {
                return Err(Error::SchemaParse {
                    path: path.to_path_buf(),
                    line: lineno,
                    msg: format!("unknown kind {other:?}"),
                })
            }
        };
        let role = match fields[3] {
            "feature" => ColumnRole::Feature,
            "label" => ColumnRole::Label,
            "identifier" => ColumnRole::Identifier,
            other => {
                return Err(Error::SchemaParse {
                    path: path.to_path_buf(),
                    line: lineno,
                    msg: format!("unknown role {other:?}"),
                })
            }
        };
        schema.push(ColumnSchema { name, kind, role });
    }
    validate_schema(&schema)?;
    Ok(schema)
}

/// Position of the `..` separating min from max. The min endpoint may itself
/// start with `-` and contain `e-`; the separator is the first `..` whose left
/// side parses as a float.
fn find_range_separator(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    for pos in 0..bytes.len().saturating_sub(1) {
        if bytes[pos] == b'.' && bytes[pos + 1] == b'.' && s[..pos].parse::<f64>().is_ok() {
            return Some(pos);
        }
    }
    None
}

pub fn read_schema(path: &Path) -> Result<Vec<ColumnSchema>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_schema(&text, path)
}

pub fn write_schema(schema: &[ColumnSchema], path: &Path) -> Result<()> {
    std::fs::write(path, render_schema(schema)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

/// Load a CSV against its schema sidecar. Empty cells become missing,
/// categorical strings map to level indices, and open numerical ranges are
/// back-filled from the observed data.
pub fn load_csv(path: &Path, schema_path: &Path) -> Result<DataTable> {
    let schema = read_schema(schema_path)?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(false)
        .from_path(path)
        .map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;

    let headers = reader
        .headers()
        .map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?
        .clone();

    // Map table columns onto CSV positions by name.
    let mut header_pos = HashMap::new();
    for (i, h) in headers.iter().enumerate() {
        header_pos.insert(h.to_string(), i);
    }
    let mut perm = Vec::with_capacity(schema.len());
    for col in &schema {
        match header_pos.get(&col.name) {
            Some(&i) => perm.push(i),
            None => return Err(Error::UnknownColumn(col.name.clone())),
        }
    }
    for h in headers.iter() {
        if !schema.iter().any(|c| c.name == h) {
            return Err(Error::UnknownColumn(h.to_string()));
        }
    }

    // Per-column level lookup.
    let level_maps: Vec<Option<HashMap<String, u32>>> = schema
        .iter()
        .map(|c| match &c.kind {
            ColumnKind::Categorical { levels } => Some(
                levels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| (l.clone(), i as u32))
                    .collect(),
            ),
            ColumnKind::Numerical { .. } => None,
        })
        .collect();

    let mut table = DataTable::new(schema)?;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1; // 1-based data row for error messages
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::RaggedRow {
                row,
                expected: *expected_len as usize,
                found: *len as usize,
            },
            _ => Error::Csv {
                path: path.to_path_buf(),
                msg: e.to_string(),
            },
        })?;
        let mut cells = Vec::with_capacity(table.n_cols());
        for (c, &pos) in perm.iter().enumerate() {
            let raw = &record[pos];
            if raw.is_empty() {
                cells.push(None);
                continue;
            }
            let value = match &level_maps[c] {
                Some(map) => match map.get(raw) {
                    Some(&idx) => Value::Cat(idx),
                    None => {
                        return Err(Error::UnknownLevel {
                            row,
                            column: table.schema()[c].name.clone(),
                            value: raw.to_string(),
                        })
                    }
                },
                None => match raw.parse::<f64>() {
                    Ok(x) if x.is_finite() => Value::Num(x),
                    _ => {
                        return Err(Error::NonNumeric {
                            row,
                            column: table.schema()[c].name.clone(),
                            value: raw.to_string(),
                        })
                    }
                },
            };
            cells.push(Some(value));
        }
        table.push_row(cells);
    }
    table.derive_open_ranges();
    Ok(table)
}

/// Write the table as CSV; missing cells become empty strings.
pub fn save_csv(table: &DataTable, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Csv {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    let names: Vec<&str> = table.schema().iter().map(|c| c.name.as_str()).collect();
    writer.write_record(&names).map_err(|e| Error::Csv {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    for r in 0..table.n_rows() {
        let mut record = Vec::with_capacity(table.n_cols());
        for c in 0..table.n_cols() {
            record.push(match table.value(r, c) {
                None => String::new(),
                Some(Value::Num(x)) => format_f64(x),
                Some(Value::Cat(l)) => table.level_name(c, l).to_string(),
            });
        }
        writer.write_record(&record).map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Write the CSV and its schema sidecar together so the pair round-trips
/// through `load_csv`.
pub fn save_with_schema(table: &DataTable, csv_path: &Path, schema_path: &Path) -> Result<()> {
    save_csv(table, csv_path)?;
    write_schema(table.schema(), schema_path)
}

// ---------------------------------------------------------------------------
// Missingness accounting
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnCounts {
    pub name: String,
    pub observed: usize,
    pub missing: usize,
}

/// Per-track accounting. `single_*` counts only the cells of features with at
/// least one observation inside the track; `union_*` counts all feature
/// columns of the union schema.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackCounts {
    pub track: usize,
    pub rows: usize,
    pub observed_features: usize,
    pub single_missing: usize,
    pub single_fraction: f64,
    pub union_missing: usize,
    pub union_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissingnessReport {
    pub per_column: Vec<ColumnCounts>,
    pub total_observed: usize,
    pub total_missing: usize,
    pub missing_fraction: f64,
    pub per_track: Option<Vec<TrackCounts>>,
}

impl MissingnessReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "column,observed,missing").unwrap();
        for c in &self.per_column {
            writeln!(out, "{},{},{}", c.name, c.observed, c.missing).unwrap();
        }
        writeln!(
            out,
            "total observed {} missing {} fraction {:.4}",
            self.total_observed, self.total_missing, self.missing_fraction
        )
        .unwrap();
        if let Some(tracks) = &self.per_track {
            for t in tracks {
                writeln!(
                    out,
                    "track {} rows {} observed_features {} single {:.4} union {:.4}",
                    t.track, t.rows, t.observed_features, t.single_fraction, t.union_fraction
                )
                .unwrap();
            }
        }
        out
    }
}

/// Missingness over feature-role columns only.
pub fn missingness_stats(table: &DataTable) -> MissingnessReport {
    let mut per_column = Vec::new();
    let mut total_observed = 0;
    let mut total_missing = 0;
    for c in table.feature_cols() {
        let observed = table.observed_count(c);
        let missing = table.n_rows() - observed;
        total_observed += observed;
        total_missing += missing;
        per_column.push(ColumnCounts {
            name: table.schema()[c].name.clone(),
            observed,
            missing,
        });
    }
    let cells = total_observed + total_missing;
    MissingnessReport {
        per_column,
        total_observed,
        total_missing,
        missing_fraction: if cells == 0 {
            0.0
        } else {
            total_missing as f64 / cells as f64
        },
        per_track: None,
    }
}

// ---------------------------------------------------------------------------
// List-wise deletion
// ---------------------------------------------------------------------------

/// Rows with zero missing feature cells (and an observed label when a label
/// column exists), in their original order.
pub fn listwise_delete(table: &DataTable) -> Result<DataTable> {
    let features = table.feature_cols();
    let label = table.label_col().ok();
    let mut keep = Vec::new();
    'rows: for r in 0..table.n_rows() {
        if let Some(l) = label {
            if !table.is_observed(r, l) {
                continue;
            }
        }
        for &c in &features {
            if !table.is_observed(r, c) {
                continue 'rows;
            }
        }
        keep.push(r);
    }
    let distinct_labels = match label {
        Some(l) => {
            let mut seen = std::collections::BTreeSet::new();
            for &r in &keep {
                if let Some(Value::Cat(v)) = table.value(r, l) {
                    seen.insert(v);
                }
            }
            seen.len()
        }
        // without a label the class-count requirement is vacuous
        None => 2,
    };
    if keep.len() < 2 || distinct_labels < 2 {
        return Err(Error::DeletionEmpty {
            rows: keep.len(),
            labels: distinct_labels,
        });
    }
    Ok(table.select_rows(&keep))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_schema() -> Vec<ColumnSchema> {
        vec![
            ColumnSchema::numerical("x", ColumnRole::Feature),
            ColumnSchema::categorical("c", &["no", "yes"], ColumnRole::Feature),
            ColumnSchema::categorical("y", &["0", "1"], ColumnRole::Label),
        ]
    }

    fn tmpdir() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn schema_rejects_duplicates_and_bad_ranges() {
        let dup = vec![
            ColumnSchema::numerical("a", ColumnRole::Feature),
            ColumnSchema::numerical("a", ColumnRole::Feature),
        ];
        assert!(DataTable::new(dup).is_err());
        let bad = vec![ColumnSchema {
            name: "a".into(),
            kind: ColumnKind::Numerical {
                min: Some(2.0),
                max: Some(1.0),
            },
            role: ColumnRole::Feature,
        }];
        assert!(DataTable::new(bad).is_err());
        let empty_levels = vec![ColumnSchema {
            name: "a".into(),
            kind: ColumnKind::Categorical { levels: vec![] },
            role: ColumnRole::Feature,
        }];
        assert!(DataTable::new(empty_levels).is_err());
    }

    #[test]
    fn load_csv_maps_empty_to_missing_and_levels_to_indices() {
        let dir = tmpdir();
        let csv_path = dir.path().join("t.csv");
        let schema_path = dir.path().join("t.schema");
        std::fs::write(&csv_path, "x,c,y\n1.5,yes,0\n,no,1\n2.5,yes,0\n").unwrap();
        std::fs::write(
            &schema_path,
            "x|numerical||feature\nc|categorical|no;yes|feature\ny|categorical|0;1|label\n",
        )
        .unwrap();
        let t = load_csv(&csv_path, &schema_path).unwrap();
        assert_eq!(t.n_rows(), 3);
        assert_eq!(t.value(0, 0), Some(Value::Num(1.5)));
        assert_eq!(t.value(1, 0), None); // the one missing cell
        assert_eq!(t.value(0, 1), Some(Value::Cat(1))); // "yes" -> level 1
        assert_eq!(missingness_stats(&t).total_missing, 1);
        // ranges were derived from data
        assert_eq!(t.schema()[0].kind.range(), Some(1.0));
    }

    #[test]
    fn load_csv_errors_name_row_and_column() {
        let dir = tmpdir();
        let csv_path = dir.path().join("t.csv");
        let schema_path = dir.path().join("t.schema");
        std::fs::write(
            &schema_path,
            "x|numerical||feature\nc|categorical|no;yes|feature\ny|categorical|0;1|label\n",
        )
        .unwrap();

        std::fs::write(&csv_path, "x,c,y\n1.0,maybe,0\n").unwrap();
        match load_csv(&csv_path, &schema_path) {
            Err(Error::UnknownLevel { row, column, value }) => {
                assert_eq!((row, column.as_str(), value.as_str()), (1, "c", "maybe"));
            }
            other => panic!("expected UnknownLevel, got {other:?}"),
        }

        std::fs::write(&csv_path, "x,c,y\nabc,no,0\n").unwrap();
        assert!(matches!(
            load_csv(&csv_path, &schema_path),
            Err(Error::NonNumeric { row: 1, .. })
        ));

        std::fs::write(&csv_path, "x,c,y\n1.0,no\n").unwrap();
        assert!(matches!(
            load_csv(&csv_path, &schema_path),
            Err(Error::RaggedRow { row: 1, .. })
        ));

        // NaN text is not an observable numerical value
        std::fs::write(&csv_path, "x,c,y\nNaN,no,0\n").unwrap();
        assert!(matches!(
            load_csv(&csv_path, &schema_path),
            Err(Error::NonNumeric { .. })
        ));
    }

    #[test]
    fn save_csv_writes_empty_fields_only_for_missing() {
        let dir = tmpdir();
        let mut t = DataTable::with_rows(small_schema(), 2).unwrap();
        t.set(0, 0, Value::Num(1.0));
        t.set(0, 1, Value::Cat(0));
        t.set(0, 2, Value::Cat(1));
        t.set(1, 0, Value::Num(-2.5));
        t.set(1, 1, Value::Cat(1));
        t.set(1, 2, Value::Cat(0));
        let p = dir.path().join("full.csv");
        save_csv(&t, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(!text.contains(",,"), "no empty fields expected: {text}");

        t.set_missing(1, 0);
        save_csv(&t, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.lines().nth(2).unwrap().starts_with(','));
    }

    #[test]
    fn csv_round_trip_preserves_cells_mask_and_schema() {
        let dir = tmpdir();
        let mut schema = small_schema();
        schema.push(ColumnSchema::numerical("id", ColumnRole::Identifier));
        let mut t = DataTable::with_rows(schema, 10).unwrap();
        for r in 0..10 {
            if r % 3 != 0 {
                t.set(r, 0, Value::Num(r as f64 * 0.7 - 2.0));
            }
            if r % 4 != 0 {
                t.set(r, 1, Value::Cat((r % 2) as u32));
            }
            t.set(r, 2, Value::Cat((r % 2) as u32));
            t.set(r, 3, Value::Num(r as f64));
        }
        t.derive_open_ranges();
        let csv_path = dir.path().join("t.csv");
        let schema_path = dir.path().join("t.schema");
        save_with_schema(&t, &csv_path, &schema_path).unwrap();
        let back = load_csv(&csv_path, &schema_path).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn schema_sidecar_round_trips_ranges_and_negative_endpoints() {
        let schema = vec![
            ColumnSchema {
                name: "a".into(),
                kind: ColumnKind::Numerical {
                    min: Some(-1.5e-3),
                    max: Some(2.25),
                },
                role: ColumnRole::Feature,
            },
            ColumnSchema::categorical("b", &["x", "y", "z"], ColumnRole::Feature),
        ];
        let text = render_schema(&schema);
        let back = parse_schema(&text, Path::new("inline")).unwrap();
        assert_eq!(schema, back);
    }

    #[test]
    fn missingness_stats_counts_features_only() {
        let mut schema = small_schema();
        schema.push(ColumnSchema::numerical("id", ColumnRole::Identifier));
        let mut t = DataTable::with_rows(schema, 4).unwrap();
        for r in 0..4 {
            t.set(r, 2, Value::Cat(0));
            // id column left missing entirely; must not count
        }
        t.set(0, 0, Value::Num(1.0));
        t.set(0, 1, Value::Cat(0));
        let rep = missingness_stats(&t);
        assert_eq!(rep.per_column.len(), 2);
        assert_eq!(rep.total_observed, 2);
        assert_eq!(rep.total_missing, 6);
        assert_eq!(rep.total_observed + rep.total_missing, 4 * 2);
        assert!((rep.missing_fraction - 0.75).abs() < 1e-12);
    }

    #[test]
    fn fully_observed_table_has_zero_missing_fraction() {
        let mut t = DataTable::with_rows(small_schema(), 3).unwrap();
        for r in 0..3 {
            t.set(r, 0, Value::Num(r as f64));
            t.set(r, 1, Value::Cat(0));
            t.set(r, 2, Value::Cat((r % 2) as u32));
        }
        assert_eq!(missingness_stats(&t).missing_fraction, 0.0);
    }

    #[test]
    fn listwise_delete_keeps_complete_rows_in_order() {
        let mut t = DataTable::with_rows(small_schema(), 4).unwrap();
        for r in 0..4 {
            t.set(r, 0, Value::Num(r as f64));
            t.set(r, 1, Value::Cat(0));
            t.set(r, 2, Value::Cat((r % 2) as u32));
        }
        // complete table -> identity
        let kept = listwise_delete(&t).unwrap();
        assert_eq!(kept, t);

        // rows 1 and 2 each missing one cell -> rows 0 and 3 remain
        t.set_missing(1, 0);
        t.set_missing(2, 1);
        let kept = listwise_delete(&t).unwrap();
        assert_eq!(kept.n_rows(), 2);
        assert_eq!(kept.num(0, 0), Some(0.0));
        assert_eq!(kept.num(1, 0), Some(3.0));
    }

    #[test]
    fn listwise_delete_reports_deletion_empty() {
        let mut t = DataTable::with_rows(small_schema(), 3).unwrap();
        for r in 0..3 {
            t.set(r, 0, Value::Num(r as f64));
            t.set(r, 1, Value::Cat(0));
            t.set(r, 2, Value::Cat(0));
            t.set_missing(r, r % 2); // every row misses one feature cell
        }
        assert!(matches!(
            listwise_delete(&t),
            Err(Error::DeletionEmpty { rows: 0, .. })
        ));
    }

    #[test]
    fn listwise_delete_requires_observed_label_and_two_classes() {
        let mut t = DataTable::with_rows(small_schema(), 4).unwrap();
        for r in 0..4 {
            t.set(r, 0, Value::Num(r as f64));
            t.set(r, 1, Value::Cat(0));
            t.set(r, 2, Value::Cat(0)); // single class
        }
        assert!(matches!(
            listwise_delete(&t),
            Err(Error::DeletionEmpty { rows: 4, labels: 1 })
        ));
        t.set(0, 2, Value::Cat(1));
        assert!(listwise_delete(&t).is_ok());
        t.set_missing(0, 2); // label missing drops the row, back to one class
        assert!(listwise_delete(&t).is_err());
    }
}
