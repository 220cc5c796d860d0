mod common;

use common::{distinct, grid, set, subsets, table, Grid};
use normdebt_core::debtmetrics::{duplicate_count, inconsistency_risk};
use normdebt_core::keydisc::{find_candidate_keys, is_unique_and_nonnull};
use normdebt_core::snapshot::{AttributeSet, CellValue, TableSnapshot};
use proptest::prelude::*;

/// (sum of rows − distinct over every subset, rows × columns).
fn rdi_oracle(g: &Grid, cols: usize, k_max: usize) -> (u64, u64) {
    let a: usize = subsets(cols, k_max).iter().map(|s| g.len() - distinct(g, s)).sum();
    (a as u64, (g.len() * cols) as u64)
}

fn keys_oracle(g: &Grid, cols: usize, max_arity: usize) -> Vec<AttributeSet> {
    let unique: Vec<Vec<usize>> = subsets(cols, max_arity)
        .into_iter()
        .filter(|s| distinct(g, s) == g.len())
        .collect();
    let mut keys: Vec<AttributeSet> = unique
        .iter()
        .filter(|s| !unique.iter().any(|o| o.len() < s.len() && o.iter().all(|c| s.contains(c))))
        .map(|s| set(s))
        .collect();
    keys.sort();
    keys
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn rdi_equals_subset_enumeration((cols, g) in grid(8, 40, 4)) {
        prop_assume!(!g.is_empty());
        let t = table("t", cols, &g);
        let r = inconsistency_risk(&t, cols).unwrap();
        prop_assert_eq!((r.duplicates, r.cells), rdi_oracle(&g, cols, cols));
        prop_assert!(r.exact);
    }

    #[test]
    fn capped_rdi_equals_capped_enumeration((cols, g) in grid(7, 30, 3), k in 1usize..7) {
        prop_assume!(!g.is_empty());
        let t = table("t", cols, &g);
        let r = inconsistency_risk(&t, k).unwrap();
        prop_assert_eq!(r.duplicates, rdi_oracle(&g, cols, k).0);
        prop_assert_eq!(r.exact, k >= cols);
    }

    #[test]
    fn copying_a_row_adds_one_duplicate_per_subset((cols, g) in grid(6, 20, 3), pick in any::<prop::sample::Index>()) {
        prop_assume!(!g.is_empty());
        let before = inconsistency_risk(&table("t", cols, &g), cols).unwrap().duplicates;
        let mut more = g.clone();
        more.push(g[pick.index(g.len())].clone());
        let after = inconsistency_risk(&table("t", cols, &more), cols).unwrap().duplicates;
        prop_assert_eq!(after, before + (1u64 << cols) - 1);
    }

    #[test]
    fn duplicates_shrink_as_attributes_are_added((cols, g) in grid(6, 30, 3)) {
        let t = table("t", cols, &g);
        for s in subsets(cols, cols) {
            for extra in 0..cols {
                let base = set(&s);
                let wider = base.union(&AttributeSet::single(extra));
                prop_assert!(duplicate_count(&t, &wider).unwrap() <= duplicate_count(&t, &base).unwrap());
            }
        }
    }

    #[test]
    fn keys_match_brute_force((cols, g) in grid(6, 25, 3), arity in 1usize..4) {
        let t = table("t", cols, &g);
        let found = find_candidate_keys(&t, arity);
        if g.is_empty() {
            prop_assert!(found.keys.is_empty());
        } else {
            prop_assert_eq!(found.keys, keys_oracle(&g, cols, arity));
        }
    }

    #[test]
    fn supersets_of_keys_are_unique((cols, g) in grid(5, 25, 3)) {
        let t = table("t", cols, &g);
        for key in find_candidate_keys(&t, 3).keys {
            for s in subsets(cols, cols) {
                let s = set(&s);
                if key.is_subset(&s) {
                    prop_assert!(is_unique_and_nonnull(&t, &s).unwrap());
                }
            }
        }
    }
}

#[test]
fn worked_two_column_fixture_is_one_third() {
    let t = TableSnapshot::from_text_rows("t", &["A", "B"], &[&["1", "x"], &["1", "y"], &["2", "x"]]).unwrap();
    let r = inconsistency_risk(&t, 12).unwrap();
    assert_eq!((r.duplicates, r.cells), (2, 6));
}

#[test]
fn nulls_disqualify_keys() {
    let rows = vec![
        vec![CellValue::text("1"), CellValue::Null],
        vec![CellValue::text("2"), CellValue::text("b")],
    ];
    let t = TableSnapshot::new("t", vec!["id".into(), "n".into()], rows).unwrap();
    let keys = find_candidate_keys(&t, 2);
    assert_eq!(keys.keys, vec![AttributeSet::single(0)]);
}
