//! Row grouping over dictionary-encoded columns.
//!
//! A grouping assigns each row the id of its projection onto an attribute
//! set; ids are dense and handed out in first-occurrence order, so group 0
//! always contains row 0.

use std::collections::HashMap;

use crate::snapshot::TableSnapshot;

const DENSE_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone)]
pub(crate) struct Grouping {
    pub ids: Vec<u32>,
    pub groups: usize,
}

impl Grouping {
    /// Every row in one group (the projection onto the empty set).
    pub fn whole(rows: usize) -> Self {
        Grouping {
            ids: vec![0; rows],
            groups: usize::from(rows > 0),
        }
    }

    /// Splits each group by the codes of one more column.
    pub fn refine(&self, codes: &[u32], cardinality: u32) -> Grouping {
        let width = u64::from(cardinality.max(1));
        let mut ids = Vec::with_capacity(self.ids.len());
        let mut next = 0u32;
        if self.groups as u64 * width <= DENSE_LIMIT {
            let mut table = vec![u32::MAX; self.groups * width as usize];
            for (&g, &c) in self.ids.iter().zip(codes) {
                let slot = &mut table[g as usize * width as usize + c as usize];
                if *slot == u32::MAX {
                    *slot = next;
                    next += 1;
                }
                ids.push(*slot);
            }
        } else {
            let mut table: HashMap<u64, u32> = HashMap::with_capacity(self.ids.len());
            for (&g, &c) in self.ids.iter().zip(codes) {
                let id = *table.entry(u64::from(g) * width + u64::from(c)).or_insert_with(|| {
                    next += 1;
                    next - 1
                });
                ids.push(id);
            }
        }
        Grouping {
            ids,
            groups: next as usize,
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.groups];
        for &g in &self.ids {
            sizes[g as usize] += 1;
        }
        sizes
    }
}

/// Groups the rows of `table` by their projection onto `columns`.
pub(crate) fn group_by(table: &TableSnapshot, columns: &[usize]) -> Grouping {
    let enc = table.encoded();
    columns
        .iter()
        .fold(Grouping::whole(table.row_count()), |g, &c| {
            g.refine(&enc.codes[c], enc.cardinality[c])
        })
}

/// Number of distinct projected tuples.
pub(crate) fn distinct_count(table: &TableSnapshot, columns: &[usize]) -> usize {
    group_by(table, columns).groups
}

/// For a grouping `fine` that refines `coarse`, the coarse group of each fine
/// group.
pub(crate) fn parent_of(fine: &Grouping, coarse: &Grouping) -> Vec<u32> {
    let mut parent = vec![0u32; fine.groups];
    for (&f, &c) in fine.ids.iter().zip(&coarse.ids) {
        parent[f as usize] = c;
    }
    parent
}
