//! Candidate key discovery by levelwise uniqueness search.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{AnalysisError, Result};
use crate::partition;
use crate::snapshot::{AttributeSet, TableSnapshot};

pub const DEFAULT_MAX_KEY_ARITY: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateKeySet {
    pub table: String,
    /// Minimal keys in canonical order.
    pub keys: Vec<AttributeSet>,
    pub max_arity_searched: usize,
}

impl CandidateKeySet {
    pub fn has_composite(&self) -> bool {
        self.keys.iter().any(|k| k.len() > 1)
    }

    /// Whether `index` belongs to some candidate key.
    pub fn is_prime(&self, index: usize) -> bool {
        self.keys.iter().any(|k| k.contains(index))
    }

    pub fn prime_attributes(&self) -> AttributeSet {
        AttributeSet::new(self.keys.iter().flat_map(|k| k.indices().iter().copied()))
    }

    pub fn contains_key(&self, attrs: &AttributeSet) -> bool {
        self.keys.iter().any(|k| k.is_subset(attrs))
    }
}

/// True iff no projected cell is null and every projected tuple is distinct.
pub fn is_unique_and_nonnull(table: &TableSnapshot, attrs: &AttributeSet) -> Result<bool> {
    if attrs.is_empty() {
        return Err(AnalysisError::EmptyAttributeSet);
    }
    attrs.validate(table.column_count())?;
    let enc = table.encoded();
    if attrs.indices().iter().any(|&c| enc.has_null[c]) {
        return Ok(false);
    }
    Ok(partition::distinct_count(table, attrs.indices()) == table.row_count())
}

/// All minimal unique, null-free attribute sets of size at most `max_arity`.
///
/// The declared primary key is kept unless a discovered key is a proper
/// subset of it. A table without rows yields only its declared key.
pub fn find_candidate_keys(table: &TableSnapshot, max_arity: usize) -> CandidateKeySet {
    let max_arity = max_arity.max(1);
    let n = table.column_count();
    let mut keys: Vec<AttributeSet> = Vec::new();

    if table.row_count() > 0 {
        for size in 1..=max_arity.min(n) {
            for combo in (0..n).combinations(size) {
                let attrs = AttributeSet::new(combo);
                if keys.iter().any(|k| k.is_subset(&attrs)) {
                    continue;
                }
                if is_unique_and_nonnull(table, &attrs).unwrap_or(false) {
                    keys.push(attrs);
                }
            }
        }
    }
    if let Some(pk) = table.declared_primary_key() {
        if !keys.iter().any(|k| k.is_subset(pk)) {
            keys.push(pk.clone());
        }
    }
    keys.sort();
    CandidateKeySet {
        table: table.name().to_string(),
        keys,
        max_arity_searched: max_arity,
    }
}
