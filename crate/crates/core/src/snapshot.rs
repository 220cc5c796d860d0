//! Immutable in-memory image of a set of tables loaded from CSV files and a
//! JSON manifest.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::csvtext::{self, RawField};
use crate::error::{AnalysisError, SnapshotError};
use crate::principal::TaskCategories;

/// A single cell. Nulls compare equal to each other.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum CellValue {
    Null,
    Text(String),
}

impl CellValue {
    /// Canonicalizes a raw CSV field: surrounding whitespace is trimmed and an
    /// empty unquoted field becomes null.
    pub fn from_raw(raw: &str, quoted: bool) -> Self {
        let trimmed = raw.trim();
        if trimmed.is_empty() && !quoted {
            CellValue::Null
        } else {
            CellValue::Text(trimmed.to_string())
        }
    }

    pub fn text(value: impl AsRef<str>) -> Self {
        CellValue::Text(value.as_ref().trim().to_string())
    }

    pub fn is_null(&self) -> bool {
        matches!(self, CellValue::Null)
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            CellValue::Null => None,
            CellValue::Text(s) => Some(s),
        }
    }
}

impl fmt::Display for CellValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellValue::Null => f.write_str("NULL"),
            CellValue::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnKind {
    Integer,
    Decimal,
    Text,
    Boolean,
    DateLike,
}

impl ColumnKind {
    pub fn is_numeric(self) -> bool {
        matches!(self, ColumnKind::Integer | ColumnKind::Decimal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnMeta {
    pub name: String,
    pub inferred_kind: ColumnKind,
    pub nullable: bool,
}

/// A set of column indices within one table, kept sorted and deduplicated.
///
/// Ordered by size first, then lexicographically, which is the canonical
/// order used for candidate enumeration and reporting.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttributeSet(Vec<usize>);

impl AttributeSet {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        AttributeSet(set.into_iter().collect())
    }

    pub fn single(index: usize) -> Self {
        AttributeSet(vec![index])
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    pub fn is_subset(&self, other: &AttributeSet) -> bool {
        self.0.iter().all(|i| other.contains(*i))
    }

    pub fn is_proper_subset(&self, other: &AttributeSet) -> bool {
        self.len() < other.len() && self.is_subset(other)
    }

    pub fn union(&self, other: &AttributeSet) -> AttributeSet {
        AttributeSet::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn difference(&self, other: &AttributeSet) -> AttributeSet {
        AttributeSet(self.0.iter().copied().filter(|i| !other.contains(*i)).collect())
    }

    pub fn is_disjoint(&self, other: &AttributeSet) -> bool {
        self.0.iter().all(|i| !other.contains(*i))
    }

    /// Checks every index against the arity of the owning table.
    pub fn validate(&self, arity: usize) -> Result<(), AnalysisError> {
        match self.0.iter().find(|&&i| i >= arity) {
            Some(&index) => Err(AnalysisError::InvalidAttributeIndex { index, arity }),
            None => Ok(()),
        }
    }

    /// All columns of a table with `arity` columns.
    pub fn all(arity: usize) -> Self {
        AttributeSet((0..arity).collect())
    }
}

impl Ord for AttributeSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for AttributeSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForeignKeyRef {
    pub local_columns: AttributeSet,
    pub referenced_table: String,
}

/// Values injected from the manifest in place of measured ones.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size_mb: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rdi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task_categories: Option<TaskCategories>,
}

/// Schema metadata declared alongside a table's data, by column name.
#[derive(Debug, Clone, Default)]
pub struct TableMetadata {
    pub primary_key: Option<Vec<String>>,
    pub indexes: Vec<Vec<String>>,
    pub foreign_keys: Vec<(Vec<String>, String)>,
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableSnapshot {
    name: String,
    columns: Vec<ColumnMeta>,
    rows: Vec<Vec<CellValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    declared_primary_key: Option<AttributeSet>,
    declared_indexes: Vec<AttributeSet>,
    declared_foreign_keys: Vec<ForeignKeyRef>,
    overrides: Overrides,
    #[serde(skip)]
    encoded: Encoded,
}

/// Per-column dictionary codes, assigned in first-occurrence order.
#[derive(Debug, Clone, Default)]
pub(crate) struct Encoded {
    pub codes: Vec<Vec<u32>>,
    pub cardinality: Vec<u32>,
    pub has_null: Vec<bool>,
}

impl Encoded {
    fn build(arity: usize, rows: &[Vec<CellValue>]) -> Self {
        let mut codes = vec![Vec::with_capacity(rows.len()); arity];
        let mut cardinality = vec![0u32; arity];
        let mut has_null = vec![false; arity];
        for col in 0..arity {
            let mut dict: HashMap<&CellValue, u32> = HashMap::new();
            for row in rows {
                let cell = &row[col];
                has_null[col] |= cell.is_null();
                let next = dict.len() as u32;
                codes[col].push(*dict.entry(cell).or_insert(next));
            }
            cardinality[col] = dict.len() as u32;
        }
        Encoded {
            codes,
            cardinality,
            has_null,
        }
    }
}

impl TableSnapshot {
    /// Builds a table from column names and canonical rows, inferring column
    /// kinds. Every row must have one cell per column.
    pub fn new(
        name: impl Into<String>,
        column_names: Vec<String>,
        rows: Vec<Vec<CellValue>>,
    ) -> Result<Self, SnapshotError> {
        Self::with_metadata(name, column_names, rows, TableMetadata::default())
    }

    pub fn with_metadata(
        name: impl Into<String>,
        column_names: Vec<String>,
        rows: Vec<Vec<CellValue>>,
        metadata: TableMetadata,
    ) -> Result<Self, SnapshotError> {
        let name = name.into();
        let mut seen = BTreeSet::new();
        for c in &column_names {
            if !seen.insert(c.as_str()) {
                return Err(SnapshotError::DuplicateColumnName {
                    table: name,
                    column: c.clone(),
                });
            }
        }
        let arity = column_names.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != arity {
                return Err(SnapshotError::DataFile {
                    file: PathBuf::from(&name),
                    line: i + 2,
                    message: format!("expected {arity} fields, found {}", row.len()),
                });
            }
        }
        let columns = column_names
            .into_iter()
            .enumerate()
            .map(|(i, name)| {
                let values: Vec<&str> = rows.iter().filter_map(|r| r[i].as_str()).collect();
                ColumnMeta {
                    name,
                    inferred_kind: infer_column_kind(values.iter().copied()),
                    nullable: rows.iter().any(|r| r[i].is_null()),
                }
            })
            .collect::<Vec<_>>();

        let resolve = |names: &[String]| -> Result<AttributeSet, SnapshotError> {
            let mut idx = Vec::with_capacity(names.len());
            for n in names {
                match columns.iter().position(|c| &c.name == n) {
                    Some(i) => idx.push(i),
                    None => {
                        return Err(SnapshotError::UnknownColumn {
                            table: name.clone(),
                            column: n.clone(),
                        })
                    }
                }
            }
            Ok(AttributeSet::new(idx))
        };

        let declared_primary_key = match &metadata.primary_key {
            Some(pk) if !pk.is_empty() => Some(resolve(pk)?),
            _ => None,
        };
        let declared_indexes = metadata
            .indexes
            .iter()
            .map(|ix| resolve(ix))
            .collect::<Result<Vec<_>, _>>()?;
        let declared_foreign_keys = metadata
            .foreign_keys
            .iter()
            .map(|(cols, target)| {
                Ok(ForeignKeyRef {
                    local_columns: resolve(cols)?,
                    referenced_table: target.clone(),
                })
            })
            .collect::<Result<Vec<_>, SnapshotError>>()?;

        let encoded = Encoded::build(arity, &rows);
        let table = TableSnapshot {
            name,
            columns,
            rows,
            declared_primary_key,
            declared_indexes,
            declared_foreign_keys,
            overrides: metadata.overrides,
            encoded,
        };
        table.validate_primary_key()?;
        Ok(table)
    }

    /// Convenience constructor: empty strings become nulls, everything else
    /// is trimmed text.
    pub fn from_text_rows(
        name: impl Into<String>,
        column_names: &[&str],
        rows: &[&[&str]],
    ) -> Result<Self, SnapshotError> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|v| CellValue::from_raw(v, false)).collect())
            .collect();
        Self::new(
            name,
            column_names.iter().map(|s| s.to_string()).collect(),
            rows,
        )
    }

    /// Parses CSV text with a header row.
    pub fn from_csv_text(
        name: impl Into<String>,
        text: &str,
        metadata: TableMetadata,
    ) -> Result<Self, SnapshotError> {
        let name = name.into();
        let file = PathBuf::from(format!("{name}.csv"));
        Self::parse_csv(name, &file, text, metadata)
    }

    fn parse_csv(
        name: String,
        file: &Path,
        text: &str,
        metadata: TableMetadata,
    ) -> Result<Self, SnapshotError> {
        let records = csvtext::parse_records(text).map_err(|e| SnapshotError::DataFile {
            file: file.to_path_buf(),
            line: e.line,
            message: e.message,
        })?;
        let mut records = records.into_iter();
        let header = match records.next() {
            Some(h) => h,
            None => {
                return Err(SnapshotError::DataFile {
                    file: file.to_path_buf(),
                    line: 1,
                    message: "missing header row".to_string(),
                })
            }
        };
        let column_names: Vec<String> = header
            .fields
            .iter()
            .map(|f: &RawField| f.text.trim().to_string())
            .collect();
        let arity = column_names.len();
        let mut rows = Vec::new();
        for rec in records {
            if rec.fields.len() != arity {
                return Err(SnapshotError::DataFile {
                    file: file.to_path_buf(),
                    line: rec.line,
                    message: format!("expected {arity} fields, found {}", rec.fields.len()),
                });
            }
            rows.push(
                rec.fields
                    .iter()
                    .map(|f| CellValue::from_raw(&f.text, f.quoted))
                    .collect(),
            );
        }
        Self::with_metadata(name, column_names, rows, metadata)
    }

    fn validate_primary_key(&self) -> Result<(), SnapshotError> {
        let Some(pk) = &self.declared_primary_key else {
            return Ok(());
        };
        let columns = self.names(pk);
        if let Some(c) = pk.indices().iter().find(|&&c| self.encoded.has_null[c]) {
            return Err(SnapshotError::PrimaryKeyViolation {
                table: self.name.clone(),
                columns,
                reason: format!("contains null values in column `{}`", self.columns[*c].name),
            });
        }
        if crate::partition::distinct_count(self, pk.indices()) != self.row_count() {
            return Err(SnapshotError::PrimaryKeyViolation {
                table: self.name.clone(),
                columns,
                reason: "has repeated values".to_string(),
            });
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[ColumnMeta] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<CellValue>] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Resolves column names to an attribute set.
    pub fn attrs(&self, names: &[&str]) -> Result<AttributeSet, SnapshotError> {
        names
            .iter()
            .map(|n| {
                self.column_index(n).ok_or_else(|| SnapshotError::UnknownColumn {
                    table: self.name.clone(),
                    column: n.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(AttributeSet::new)
    }

    /// Column names of an attribute set, comma separated.
    pub fn names(&self, attrs: &AttributeSet) -> String {
        self.name_list(attrs).join(", ")
    }

    pub fn name_list(&self, attrs: &AttributeSet) -> Vec<String> {
        attrs
            .indices()
            .iter()
            .map(|&i| {
                self.columns
                    .get(i)
                    .map(|c| c.name.clone())
                    .unwrap_or_else(|| format!("#{i}"))
            })
            .collect()
    }

    pub fn declared_primary_key(&self) -> Option<&AttributeSet> {
        self.declared_primary_key.as_ref()
    }

    pub fn declared_indexes(&self) -> &[AttributeSet] {
        &self.declared_indexes
    }

    pub fn declared_foreign_keys(&self) -> &[ForeignKeyRef] {
        &self.declared_foreign_keys
    }

    pub fn overrides(&self) -> &Overrides {
        &self.overrides
    }

    pub(crate) fn encoded(&self) -> &Encoded {
        &self.encoded
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceValues {
    /// Externally published conventional-approach total, compared against
    /// the computed one in report footnotes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conventional_total: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatabaseSnapshot {
    pub name: String,
    tables: Vec<TableSnapshot>,
    #[serde(skip_serializing_if = "is_default_reference")]
    pub reference: ReferenceValues,
}

fn is_default_reference(r: &ReferenceValues) -> bool {
    r == &ReferenceValues::default()
}

impl DatabaseSnapshot {
    /// Sorts tables by name and rejects duplicates.
    pub fn new(name: impl Into<String>, mut tables: Vec<TableSnapshot>) -> Result<Self, SnapshotError> {
        tables.sort_by(|a, b| a.name.cmp(&b.name));
        if let Some(w) = tables.windows(2).find(|w| w[0].name == w[1].name) {
            return Err(SnapshotError::DuplicateTableName(w[0].name.clone()));
        }
        Ok(DatabaseSnapshot {
            name: name.into(),
            tables,
            reference: ReferenceValues::default(),
        })
    }

    pub fn tables(&self) -> &[TableSnapshot] {
        &self.tables
    }

    pub fn table(&self, name: &str) -> Option<&TableSnapshot> {
        self.tables
            .binary_search_by(|t| t.name.as_str().cmp(name))
            .ok()
            .map(|i| &self.tables[i])
    }

    /// Foreign keys whose referenced table is not part of the snapshot, as
    /// `(table, referenced_table)` pairs.
    pub fn dangling_foreign_keys(&self) -> Vec<(String, String)> {
        self.tables
            .iter()
            .flat_map(|t| {
                t.declared_foreign_keys
                    .iter()
                    .filter(|fk| self.table(&fk.referenced_table).is_none())
                    .map(|fk| (t.name.clone(), fk.referenced_table.clone()))
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("snapshot serializes")
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    name: String,
    #[serde(default)]
    tables: Vec<ManifestTable>,
    #[serde(default)]
    reference: ReferenceValues,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestTable {
    name: String,
    file: PathBuf,
    #[serde(default)]
    primary_key: Vec<String>,
    #[serde(default)]
    indexes: Vec<Vec<String>>,
    #[serde(default)]
    foreign_keys: Vec<ManifestForeignKey>,
    #[serde(default)]
    size_mb: Option<f64>,
    #[serde(default)]
    task_count: Option<u64>,
    #[serde(default)]
    rdi: Option<f64>,
    #[serde(default)]
    weight: Option<u64>,
    #[serde(default)]
    task_categories: Option<TaskCategories>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestForeignKey {
    columns: Vec<String>,
    references: String,
}

/// Loads and validates a snapshot. Data file paths are resolved relative to
/// the manifest's directory.
pub fn load_snapshot(manifest_path: impl AsRef<Path>) -> Result<DatabaseSnapshot, SnapshotError> {
    let manifest_path = manifest_path.as_ref();
    let text = std::fs::read_to_string(manifest_path).map_err(|source| SnapshotError::Io {
        path: manifest_path.to_path_buf(),
        source,
    })?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| SnapshotError::ManifestParse {
            path: manifest_path.to_path_buf(),
            message: e.to_string(),
        })?;
    for t in &manifest.tables {
        let bad = [t.size_mb, t.rdi]
            .iter()
            .flatten()
            .any(|v| !v.is_finite() || *v < 0.0);
        if bad {
            return Err(SnapshotError::ManifestParse {
                path: manifest_path.to_path_buf(),
                message: format!("table `{}`: overrides must be nonnegative numbers", t.name),
            });
        }
    }
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));

    let mut tables = Vec::with_capacity(manifest.tables.len());
    for t in manifest.tables {
        let file = base.join(&t.file);
        let data = std::fs::read_to_string(&file).map_err(|source| SnapshotError::Io {
            path: file.clone(),
            source,
        })?;
        let metadata = TableMetadata {
            primary_key: Some(t.primary_key).filter(|pk| !pk.is_empty()),
            indexes: t.indexes,
            foreign_keys: t
                .foreign_keys
                .into_iter()
                .map(|fk| (fk.columns, fk.references))
                .collect(),
            overrides: Overrides {
                size_mb: t.size_mb,
                task_count: t.task_count,
                rdi: t.rdi,
                weight: t.weight,
                task_categories: t.task_categories,
            },
        };
        tables.push(TableSnapshot::parse_csv(t.name, &file, &data, metadata)?);
    }
    let mut snapshot = DatabaseSnapshot::new(manifest.name, tables)?;
    snapshot.reference = manifest.reference;
    Ok(snapshot)
}

/// Most specific kind matched by every non-null value; empty input is text.
pub fn infer_column_kind<'a>(raw_values: impl IntoIterator<Item = &'a str>) -> ColumnKind {
    let mut integer = true;
    let mut decimal = true;
    let mut boolean = true;
    let mut date = true;
    let mut any = false;
    for v in raw_values {
        let v = v.trim();
        if v.is_empty() {
            continue;
        }
        any = true;
        integer &= is_integer(v);
        decimal &= is_decimal(v);
        boolean &= v.eq_ignore_ascii_case("true") || v.eq_ignore_ascii_case("false");
        date &= is_date_like(v);
        if !(integer || decimal || boolean || date) {
            return ColumnKind::Text;
        }
    }
    match () {
        _ if !any => ColumnKind::Text,
        _ if integer => ColumnKind::Integer,
        _ if decimal => ColumnKind::Decimal,
        _ if boolean => ColumnKind::Boolean,
        _ if date => ColumnKind::DateLike,
        _ => ColumnKind::Text,
    }
}

fn digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn is_integer(s: &str) -> bool {
    digits(s.strip_prefix(['+', '-']).unwrap_or(s))
}

pub(crate) fn is_decimal(s: &str) -> bool {
    let s = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    let mantissa_ok = match mantissa.split_once('.') {
        Some((a, b)) => (digits(a) || a.is_empty()) && (digits(b) || b.is_empty()) && !(a.is_empty() && b.is_empty()),
        None => digits(mantissa),
    };
    let exponent_ok = exponent.is_none_or(is_integer);
    mantissa_ok && exponent_ok
}

fn is_date_like(s: &str) -> bool {
    let b = s.as_bytes();
    if b.len() < 10 {
        return false;
    }
    let date_ok = digits(&s[0..4]) && b[4] == b'-' && digits(&s[5..7]) && b[7] == b'-' && digits(&s[8..10]);
    if !date_ok {
        return false;
    }
    let rest = &s[10..];
    if rest.is_empty() {
        return true;
    }
    let Some(time) = rest.strip_prefix(['T', ' ']) else {
        return false;
    };
    let time = time.trim_end_matches('Z');
    let (hms, frac) = match time.split_once('.') {
        Some((a, f)) => (a, Some(f)),
        None => (time, None),
    };
    let parts: Vec<&str> = hms.split(':').collect();
    (parts.len() == 2 || parts.len() == 3)
        && parts.iter().all(|p| p.len() == 2 && digits(p))
        && frac.is_none_or(digits)
}
