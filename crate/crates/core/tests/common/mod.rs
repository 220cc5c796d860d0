#![allow(dead_code)]

use std::collections::HashSet;

use normdebt_core::snapshot::{AttributeSet, CellValue, TableSnapshot};
use proptest::prelude::*;

/// Rows of small integer codes, each rendered as `v<code>`.
pub type Grid = Vec<Vec<u8>>;

pub fn table(name: &str, cols: usize, grid: &Grid) -> TableSnapshot {
    let names = (0..cols).map(|c| format!("c{c}")).collect();
    let rows = grid
        .iter()
        .map(|r| r.iter().map(|v| CellValue::text(format!("v{v}"))).collect())
        .collect();
    TableSnapshot::new(name, names, rows).unwrap()
}

pub fn grid(max_cols: usize, max_rows: usize, alphabet: u8) -> impl Strategy<Value = (usize, Grid)> {
    (1..=max_cols).prop_flat_map(move |c| {
        (
            Just(c),
            proptest::collection::vec(proptest::collection::vec(0..alphabet, c), 0..=max_rows),
        )
    })
}

/// Distinct projected tuples, by hashing the projections.
pub fn distinct(grid: &Grid, cols: &[usize]) -> usize {
    grid.iter()
        .map(|r| cols.iter().map(|&c| r[c]).collect::<Vec<_>>())
        .collect::<HashSet<_>>()
        .len()
}

/// All non-empty subsets of `0..n` with at most `max` members.
pub fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n))
        .filter(|m| m.count_ones() as usize <= max)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

pub fn set(cols: &[usize]) -> AttributeSet {
    AttributeSet::new(cols.iter().copied())
}
