//! Debt interest: risk of data inconsistency, table complexity and size.

use serde::{Deserialize, Serialize};

use crate::error::{AnalysisError, Result};
use crate::keydisc::CandidateKeySet;
use crate::partition::{self, Grouping};
use crate::snapshot::{AttributeSet, TableSnapshot};

pub const DEFAULT_RDI_K_MAX: usize = 12;

const BYTES_PER_MB: f64 = 1_048_576.0;

/// Rows minus distinct projected tuples onto `attrs`.
pub fn duplicate_count(table: &TableSnapshot, attrs: &AttributeSet) -> Result<u64> {
    if attrs.is_empty() {
        return Err(AnalysisError::EmptyAttributeSet);
    }
    attrs.validate(table.column_count())?;
    Ok((table.row_count() - partition::distinct_count(table, attrs.indices())) as u64)
}

/// `X = A / B` where `A` sums duplicate counts over attribute subsets and
/// `B` is rows × columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InconsistencyRisk {
    pub duplicates: u64,
    pub cells: u64,
    pub value: f64,
    pub k_max: usize,
    /// Every subset size was enumerated.
    pub exact: bool,
}

/// Sums duplicates over all non-empty subsets of at most `k_max` columns.
///
/// Subsets are enumerated depth-first with incremental refinement; once a
/// projection is duplicate-free, its extensions are too and are skipped.
pub fn inconsistency_risk(table: &TableSnapshot, k_max: usize) -> Result<InconsistencyRisk> {
    if table.row_count() == 0 || table.column_count() == 0 {
        return Err(AnalysisError::EmptyTable(table.name().to_string()));
    }
    if k_max == 0 {
        return Err(AnalysisError::InvalidParameter("k_max must be at least 1".into()));
    }
    let n = table.column_count();
    let rows = table.row_count();
    let depth = k_max.min(n);
    let enc = table.encoded();

    struct Walk<'a> {
        depth: usize,
        rows: usize,
        enc: &'a crate::snapshot::Encoded,
        total: u64,
    }

    impl Walk<'_> {
        fn visit(&mut self, start: usize, level: usize, parent: &Grouping) {
            for c in start..self.enc.codes.len() {
                let g = parent.refine(&self.enc.codes[c], self.enc.cardinality[c]);
                let dup = self.rows - g.groups;
                self.total += dup as u64;
                if dup > 0 && level < self.depth {
                    self.visit(c + 1, level + 1, &g);
                }
            }
        }
    }

    let mut walk = Walk {
        depth,
        rows,
        enc,
        total: 0,
    };
    walk.visit(0, 1, &Grouping::whole(rows));
    let duplicates = walk.total;
    let cells = (rows * n) as u64;
    Ok(InconsistencyRisk {
        duplicates,
        cells,
        value: duplicates as f64 / cells as f64,
        k_max: depth,
        exact: k_max >= n,
    })
}

/// Attributes + declared indexes + declared foreign keys + keys.
pub fn complexity_weight(table: &TableSnapshot, keys: &CandidateKeySet) -> u64 {
    let mut key_count = keys.keys.len();
    if let Some(pk) = table.declared_primary_key() {
        if !keys.keys.contains(pk) {
            key_count += 1;
        }
    }
    (table.column_count() + table.declared_indexes().len() + table.declared_foreign_keys().len() + key_count) as u64
}

/// Manifest override if present, else UTF-8 bytes of all non-null cells in
/// MiB.
pub fn table_size_mb(table: &TableSnapshot) -> f64 {
    if let Some(size) = table.overrides().size_mb {
        return size;
    }
    let bytes: usize = table
        .rows()
        .iter()
        .flat_map(|r| r.iter().filter_map(|c| c.as_str()))
        .map(str::len)
        .sum();
    bytes as f64 / BYTES_PER_MB
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityMetrics {
    pub table: String,
    pub rdi: f64,
    /// `A` and `B` of the measured risk; absent when the value was injected.
    pub rdi_duplicates: Option<u64>,
    pub rdi_cells: Option<u64>,
    pub rdi_k_max: usize,
    pub rdi_exact: bool,
    pub complexity_weight: u64,
    pub size_mb: f64,
    pub overridden: Vec<String>,
}

/// Measures all three interest metrics, honoring manifest overrides.
pub fn measure(table: &TableSnapshot, keys: &CandidateKeySet, k_max: usize) -> Result<QualityMetrics> {
    let ov = table.overrides();
    let mut overridden = Vec::new();
    let (rdi, dup, cells, k, exact) = match ov.rdi {
        Some(v) => {
            overridden.push("rdi".to_string());
            (v, None, None, k_max, true)
        }
        None => {
            let r = inconsistency_risk(table, k_max)?;
            (r.value, Some(r.duplicates), Some(r.cells), r.k_max, r.exact)
        }
    };
    let weight = match ov.weight {
        Some(w) => {
            overridden.push("weight".to_string());
            w
        }
        None => complexity_weight(table, keys),
    };
    if ov.size_mb.is_some() {
        overridden.push("size_mb".to_string());
    }
    Ok(QualityMetrics {
        table: table.name().to_string(),
        rdi,
        rdi_duplicates: dup,
        rdi_cells: cells,
        rdi_k_max: k,
        rdi_exact: exact,
        complexity_weight: weight,
        size_mb: table_size_mb(table),
        overridden,
    })
}
