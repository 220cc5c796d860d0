mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{distinct, grid, set, subsets, table, Grid};
use normdebt_core::depminer::{holds_fd, holds_mvd, mine_rules};
use normdebt_core::snapshot::{AttributeSet, TableSnapshot};
use proptest::prelude::*;

fn fd_oracle(g: &Grid, lhs: &[usize], rhs: &[usize]) -> bool {
    let both: BTreeSet<usize> = lhs.iter().chain(rhs).copied().collect();
    distinct(g, lhs) == distinct(g, &both.into_iter().collect::<Vec<_>>())
}

/// Smallest share of the dominant rhs value over lhs-groups.
fn confidence_oracle(g: &Grid, lhs: &[usize], rhs: &[usize]) -> f64 {
    let mut groups: BTreeMap<Vec<u8>, BTreeMap<Vec<u8>, usize>> = BTreeMap::new();
    for r in g {
        let k = lhs.iter().map(|&c| r[c]).collect();
        let v = rhs.iter().map(|&c| r[c]).collect();
        *groups.entry(k).or_default().entry(v).or_default() += 1;
    }
    groups
        .values()
        .map(|m| *m.values().max().unwrap() as f64 / m.values().sum::<usize>() as f64)
        .fold(1.0, f64::min)
}

/// Within every lhs-group, each (y, z) pair drawn from the group is present.
fn mvd_oracle(g: &Grid, cols: usize, lhs: &[usize], rhs: &[usize]) -> bool {
    let rest: Vec<usize> = (0..cols).filter(|c| !lhs.contains(c) && !rhs.contains(c)).collect();
    let proj = |r: &Vec<u8>, cs: &[usize]| cs.iter().map(|&c| r[c]).collect::<Vec<u8>>();
    type Pairs = BTreeSet<(Vec<u8>, Vec<u8>)>;
    let mut groups: BTreeMap<Vec<u8>, Pairs> = BTreeMap::new();
    for r in g {
        groups.entry(proj(r, lhs)).or_default().insert((proj(r, rhs), proj(r, &rest)));
    }
    groups.values().all(|pairs| {
        let ys: BTreeSet<_> = pairs.iter().map(|p| p.0.clone()).collect();
        let zs: BTreeSet<_> = pairs.iter().map(|p| p.1.clone()).collect();
        ys.iter().all(|y| zs.iter().all(|z| pairs.contains(&(y.clone(), z.clone()))))
    })
}

fn pairs(cols: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for lhs in subsets(cols, 2) {
        for r in 0..cols {
            if !lhs.contains(&r) {
                out.push((lhs.clone(), vec![r]));
            }
        }
    }
    out
}

fn rule_side(items: &[normdebt_core::depminer::Item]) -> AttributeSet {
    AttributeSet::new(items.iter().map(|i| i.column))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn exact_fd_matches_distinct_count_oracle((cols, g) in grid(6, 50, 5)) {
        let t = table("t", cols, &g);
        for (lhs, rhs) in pairs(cols) {
            let fd = holds_fd(&t, &set(&lhs), &set(&rhs), 1.0).unwrap();
            prop_assert_eq!(fd.holds, fd_oracle(&g, &lhs, &rhs), "{:?} -> {:?}", lhs, rhs);
            let expected = confidence_oracle(&g, &lhs, &rhs);
            prop_assert!((fd.min_confidence_observed - expected).abs() < 1e-12);
            match fd.witness {
                Some((a, b)) => {
                    prop_assert!(!fd.holds);
                    prop_assert!(lhs.iter().all(|&c| g[a][c] == g[b][c]));
                    prop_assert!(rhs.iter().any(|&c| g[a][c] != g[b][c]));
                }
                None => prop_assert!(fd.holds),
            }
        }
    }

    #[test]
    fn approximate_verdict_follows_threshold((cols, g) in grid(4, 30, 3), tau in 0.05f64..1.0) {
        let t = table("t", cols, &g);
        for (lhs, rhs) in pairs(cols) {
            let fd = holds_fd(&t, &set(&lhs), &set(&rhs), tau).unwrap();
            prop_assert_eq!(fd.holds, confidence_oracle(&g, &lhs, &rhs) >= tau);
        }
    }

    #[test]
    fn miner_rules_agree_with_fd_check((cols, g) in grid(5, 40, 4)) {
        prop_assume!(!g.is_empty());
        let t = table("t", cols, &g);
        let all = AttributeSet::all(cols);
        let rules = mine_rules(&t, &all, 1.0 / g.len() as f64, 3).unwrap();
        for (lhs, rhs) in pairs(cols) {
            let (l, r) = (set(&lhs), set(&rhs));
            let relevant: Vec<_> = rules
                .iter()
                .filter(|x| rule_side(&x.antecedent) == l && rule_side(&x.consequent) == r)
                .collect();
            prop_assert!(!relevant.is_empty());
            let all_exact = relevant.iter().all(|x| x.confidence == 1.0);
            prop_assert_eq!(all_exact, holds_fd(&t, &l, &r, 1.0).unwrap().holds);
        }
    }

    #[test]
    fn rule_counts_match_direct_counting((cols, g) in grid(4, 30, 3)) {
        prop_assume!(!g.is_empty());
        let t = table("t", cols, &g);
        for rule in mine_rules(&t, &AttributeSet::all(cols), 0.1, 3).unwrap() {
            let matches = |items: &[normdebt_core::depminer::Item], row: &Vec<u8>| {
                items.iter().all(|i| i.value.as_str() == Some(format!("v{}", row[i.column]).as_str()))
            };
            let ante = g.iter().filter(|r| matches(&rule.antecedent, r)).count() as u64;
            let both = g.iter().filter(|r| matches(&rule.antecedent, r) && matches(&rule.consequent, r)).count() as u64;
            prop_assert_eq!((rule.antecedent_count, rule.itemset_count), (ante, both));
            prop_assert!(both as f64 >= 0.1 * g.len() as f64 - 1e-9);
            prop_assert!((rule.confidence - both as f64 / ante as f64).abs() < 1e-12);
            prop_assert!((rule.support - both as f64 / g.len() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn fd_transitivity_and_augmentation((cols, g) in grid(5, 30, 3)) {
        let t = table("t", cols, &g);
        let fd = |l: &[usize], r: &[usize]| holds_fd(&t, &set(l), &set(r), 1.0).unwrap().holds;
        for x in 0..cols {
            for y in 0..cols {
                for z in 0..cols {
                    if fd(&[x], &[y]) && fd(&[y], &[z]) {
                        prop_assert!(fd(&[x], &[z]));
                    }
                    if fd(&[x], &[y]) {
                        prop_assert!(fd(&[x, z], &[y]));
                    }
                }
            }
        }
    }

    #[test]
    fn mvd_matches_product_oracle_and_is_symmetric((cols, g) in grid(5, 30, 3)) {
        prop_assume!(cols >= 2);
        let t = table("t", cols, &g);
        for lhs in subsets(cols, 2) {
            for rhs in subsets(cols, cols) {
                if rhs.iter().any(|c| lhs.contains(c)) {
                    continue;
                }
                let m = holds_mvd(&t, &set(&lhs), &set(&rhs)).unwrap();
                prop_assert_eq!(m.holds, mvd_oracle(&g, cols, &lhs, &rhs));
                let comp = set(&lhs).union(&set(&rhs));
                let rest: Vec<usize> = (0..cols).filter(|c| !comp.contains(*c)).collect();
                if !rest.is_empty() {
                    prop_assert_eq!(m.holds, holds_mvd(&t, &set(&lhs), &set(&rest)).unwrap().holds);
                }
            }
        }
    }

    #[test]
    fn fd_implies_mvd((cols, g) in grid(6, 50, 5)) {
        let t = table("t", cols, &g);
        for (lhs, rhs) in pairs(cols) {
            if holds_fd(&t, &set(&lhs), &set(&rhs), 1.0).unwrap().holds {
                prop_assert!(holds_mvd(&t, &set(&lhs), &set(&rhs)).unwrap().holds);
            }
        }
    }

    #[test]
    fn verdicts_ignore_row_order((cols, g) in grid(4, 30, 3), seed in any::<u64>()) {
        let mut shuffled = g.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            shuffled.swap(i, (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) % (i as u64 + 1)) as usize);
        }
        let (a, b) = (table("t", cols, &g), table("t", cols, &shuffled));
        for (lhs, rhs) in pairs(cols) {
            let (l, r) = (set(&lhs), set(&rhs));
            let (fa, fb) = (holds_fd(&a, &l, &r, 1.0).unwrap(), holds_fd(&b, &l, &r, 1.0).unwrap());
            prop_assert_eq!(fa.holds, fb.holds);
            prop_assert!((fa.min_confidence_observed - fb.min_confidence_observed).abs() < 1e-12);
            prop_assert_eq!(holds_mvd(&a, &l, &r).unwrap().holds, holds_mvd(&b, &l, &r).unwrap().holds);
        }
    }
}

fn text_table(name: &str, cols: &[&str], rows: &[Vec<String>]) -> TableSnapshot {
    let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
    let refs: Vec<&[&str]> = rows.iter().map(Vec::as_slice).collect();
    TableSnapshot::from_text_rows(name, cols, &refs).unwrap()
}

#[test]
fn market_basket_rule_at_five_percent_support() {
    // 20 baskets; bread and butter co-occur once, always together.
    let mut rows = vec![vec!["bread".to_string(), "butter".to_string()]];
    for i in 0..19 {
        rows.push(vec![format!("item{i}"), format!("side{}", i % 4)]);
    }
    let t = text_table("baskets", &["a", "b"], &rows);
    let rules = mine_rules(&t, &AttributeSet::all(2), 0.05, 2).unwrap();
    let r = rules
        .iter()
        .find(|r| r.render(&t) == ("a=bread".to_string(), "b=butter".to_string()))
        .unwrap();
    assert_eq!(r.support, 0.05);
    assert_eq!(r.confidence, 1.0);
}

#[test]
fn postal_code_rule_confidence_below_one() {
    // Richmond spans two states; seventeen one-state cities share the code.
    let mut rows = Vec::new();
    for s in ["7", "79"] {
        for pc in ["V63P7", "23220"] {
            rows.push(vec!["Richmond".to_string(), s.to_string(), pc.to_string()]);
        }
    }
    for i in 0..17 {
        rows.push(vec![format!("City{i}"), "7".to_string(), "V63P7".to_string()]);
    }
    let t = text_table("Address", &["City", "StateID", "PostalCode"], &rows);
    let cols = t.attrs(&["City", "PostalCode"]).unwrap();
    let rules = mine_rules(&t, &cols, 1.0 / rows.len() as f64, 2).unwrap();
    let r = rules
        .iter()
        .find(|r| r.render(&t) == ("PostalCode=V63P7".to_string(), "City=Richmond".to_string()))
        .unwrap();
    assert_eq!((r.itemset_count, r.antecedent_count), (2, 19));
    assert_eq!(format!("{:.3}", r.confidence), "0.105");

    let city = t.attrs(&["City"]).unwrap();
    let state = t.attrs(&["StateID"]).unwrap();
    assert!(!holds_fd(&t, &city, &state, 1.0).unwrap().holds);
    assert!(holds_mvd(&t, &city, &state).unwrap().holds);
}

#[test]
fn planted_product_groups_hold_and_break_on_removal() {
    // x -> {y1, y2} × {z1, z2, z3}
    let mut rows = Vec::new();
    for y in ["y1", "y2"] {
        for z in ["z1", "z2", "z3"] {
            rows.push(vec!["x".to_string(), y.to_string(), z.to_string()]);
        }
    }
    let full = text_table("t", &["X", "Y", "Z"], &rows);
    let (x, y) = (AttributeSet::single(0), AttributeSet::single(1));
    assert!(holds_mvd(&full, &x, &y).unwrap().holds);
    for skip in 0..rows.len() {
        let mut fewer = rows.clone();
        fewer.remove(skip);
        let t = text_table("t", &["X", "Y", "Z"], &fewer);
        let m = holds_mvd(&t, &x, &y).unwrap();
        assert!(!m.holds, "removing row {skip} should break the product");
        let (a, b) = m.witness.unwrap();
        assert_eq!(fewer[a][0], fewer[b][0]);
    }
}
