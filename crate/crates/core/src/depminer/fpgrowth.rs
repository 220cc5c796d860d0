//! FP-growth frequent itemset mining and rule generation over table rows.
//!
//! Each row is a transaction whose items are `(column, value)` pairs for the
//! selected columns.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{AnalysisError, Result};
use crate::snapshot::{AttributeSet, CellValue, TableSnapshot};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Item {
    pub column: usize,
    pub value: CellValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociationRule {
    pub antecedent: Vec<Item>,
    pub consequent: Vec<Item>,
    /// Fraction of rows containing antecedent and consequent.
    pub support: f64,
    pub confidence: f64,
    pub itemset_count: u64,
    pub antecedent_count: u64,
}

impl AssociationRule {
    pub fn render(&self, table: &TableSnapshot) -> (String, String) {
        let side = |items: &[Item]| {
            items
                .iter()
                .map(|i| format!("{}={}", table.columns()[i.column].name, i.value))
                .collect::<Vec<_>>()
                .join(", ")
        };
        (side(&self.antecedent), side(&self.consequent))
    }
}

#[derive(Debug)]
struct Node {
    item: u32,
    count: u64,
    parent: usize,
    children: Vec<usize>,
}

const ROOT: usize = 0;

/// Prefix tree of transactions whose items are sorted by descending
/// frequency, with a header list of node positions per item.
#[derive(Debug)]
struct FpTree {
    nodes: Vec<Node>,
    header: BTreeMap<u32, Vec<usize>>,
    item_counts: HashMap<u32, u64>,
}

impl FpTree {
    fn build(transactions: &[(Vec<u32>, u64)], min_count: u64) -> FpTree {
        let mut item_counts: HashMap<u32, u64> = HashMap::new();
        for (items, count) in transactions {
            for &i in items {
                *item_counts.entry(i).or_insert(0) += count;
            }
        }
        item_counts.retain(|_, c| *c >= min_count);

        let mut tree = FpTree {
            nodes: vec![Node {
                item: u32::MAX,
                count: 0,
                parent: ROOT,
                children: Vec::new(),
            }],
            header: BTreeMap::new(),
            item_counts,
        };
        let mut path = Vec::new();
        for (items, count) in transactions {
            path.clear();
            path.extend(items.iter().copied().filter(|i| tree.item_counts.contains_key(i)));
            path.sort_by(|a, b| tree.item_counts[b].cmp(&tree.item_counts[a]).then(a.cmp(b)));
            tree.insert(&path, *count);
        }
        tree
    }

    fn insert(&mut self, items: &[u32], count: u64) {
        let mut cur = ROOT;
        for &item in items {
            let existing = self.nodes[cur]
                .children
                .iter()
                .copied()
                .find(|&c| self.nodes[c].item == item);
            cur = match existing {
                Some(c) => c,
                None => {
                    let idx = self.nodes.len();
                    self.nodes.push(Node {
                        item,
                        count: 0,
                        parent: cur,
                        children: Vec::new(),
                    });
                    self.nodes[cur].children.push(idx);
                    self.header.entry(item).or_default().push(idx);
                    idx
                }
            };
            self.nodes[cur].count += count;
        }
    }

    /// Prefix paths ending just above each node holding `item`.
    fn conditional_base(&self, item: u32) -> Vec<(Vec<u32>, u64)> {
        self.header[&item]
            .iter()
            .map(|&n| {
                let mut path = Vec::new();
                let mut cur = self.nodes[n].parent;
                while cur != ROOT {
                    path.push(self.nodes[cur].item);
                    cur = self.nodes[cur].parent;
                }
                (path, self.nodes[n].count)
            })
            .collect()
    }

    fn mine(&self, suffix: &mut Vec<u32>, min_count: u64, max_size: usize, out: &mut HashMap<Vec<u32>, u64>) {
        for &item in self.header.keys() {
            let support = self.item_counts[&item];
            suffix.push(item);
            let mut key = suffix.clone();
            key.sort_unstable();
            out.insert(key, support);
            if suffix.len() < max_size {
                let base = self.conditional_base(item);
                let cond = FpTree::build(&base, min_count);
                if !cond.header.is_empty() {
                    cond.mine(suffix, min_count, max_size, out);
                }
            }
            suffix.pop();
        }
    }
}

/// Frequent itemsets over the given columns with their absolute counts.
/// Items are identified by their rank in `(column, value)` order.
pub(crate) struct FrequentItemsets {
    pub items: Vec<Item>,
    pub counts: HashMap<Vec<u32>, u64>,
    pub rows: u64,
}

pub(crate) fn frequent_itemsets(
    table: &TableSnapshot,
    columns: &AttributeSet,
    min_count: u64,
    max_itemset_size: usize,
) -> FrequentItemsets {
    let mut items: Vec<Item> = columns
        .indices()
        .iter()
        .flat_map(|&c| {
            table.rows().iter().map(move |r| Item {
                column: c,
                value: r[c].clone(),
            })
        })
        .collect();
    items.sort();
    items.dedup();
    let ids: HashMap<&Item, u32> = items.iter().enumerate().map(|(i, it)| (it, i as u32)).collect();

    let mut transactions: HashMap<Vec<u32>, u64> = HashMap::new();
    for row in table.rows() {
        let t: Vec<u32> = columns
            .indices()
            .iter()
            .map(|&c| {
                ids[&Item {
                    column: c,
                    value: row[c].clone(),
                }]
            })
            .collect();
        *transactions.entry(t).or_insert(0) += 1;
    }
    let mut transactions: Vec<(Vec<u32>, u64)> = transactions.into_iter().collect();
    transactions.sort();

    let tree = FpTree::build(&transactions, min_count);
    let mut counts = HashMap::new();
    if max_itemset_size > 0 {
        tree.mine(&mut Vec::new(), min_count, max_itemset_size, &mut counts);
    }
    FrequentItemsets {
        items,
        counts,
        rows: table.row_count() as u64,
    }
}

/// Smallest absolute count meeting a fractional support threshold.
pub(crate) fn min_count_for(min_support: f64, rows: usize) -> u64 {
    let raw = min_support * rows as f64;
    let c = (raw - 1e-9).ceil();
    (c.max(1.0)) as u64
}

/// All association rules over frequent itemsets restricted to `columns`,
/// sorted by antecedent then consequent.
pub fn mine_rules(
    table: &TableSnapshot,
    columns: &AttributeSet,
    min_support: f64,
    max_itemset_size: usize,
) -> Result<Vec<AssociationRule>> {
    if columns.is_empty() {
        return Err(AnalysisError::EmptyAttributeSet);
    }
    columns.validate(table.column_count())?;
    if !(min_support > 0.0 && min_support <= 1.0) {
        return Err(AnalysisError::InvalidParameter(format!(
            "min_support must be in (0, 1], got {min_support}"
        )));
    }
    if table.row_count() == 0 {
        return Err(AnalysisError::EmptyTable(table.name().to_string()));
    }
    let max_size = max_itemset_size.min(columns.len()).min(20);
    let fi = frequent_itemsets(table, columns, min_count_for(min_support, table.row_count()), max_size);

    let mut keyed: Vec<(Vec<u32>, Vec<u32>, u64, u64)> = Vec::new();
    for (itemset, &count) in &fi.counts {
        let k = itemset.len();
        if k < 2 {
            continue;
        }
        for mask in 1u32..(1u32 << k) - 1 {
            let in_ante = |i: &usize| mask & (1 << i) != 0;
            let ante: Vec<u32> = (0..k).filter(in_ante).map(|i| itemset[i]).collect();
            let cons: Vec<u32> = (0..k).filter(|i| !in_ante(i)).map(|i| itemset[i]).collect();
            let ante_count = fi.counts[&ante];
            keyed.push((ante, cons, count, ante_count));
        }
    }
    keyed.sort();
    let rows = fi.rows as f64;
    Ok(keyed
        .into_iter()
        .map(|(a, c, count, ante_count)| AssociationRule {
            antecedent: a.iter().map(|&i| fi.items[i as usize].clone()).collect(),
            consequent: c.iter().map(|&i| fi.items[i as usize].clone()).collect(),
            support: count as f64 / rows,
            confidence: count as f64 / ante_count as f64,
            itemset_count: count,
            antecedent_count: ante_count,
        })
        .collect())
}
