use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::keydisc::CandidateKeySet;
use crate::partition;
use crate::snapshot::{AttributeSet, TableSnapshot};

/// The normal form whose violating dependencies are being looked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum NfStage {
    #[serde(rename = "2NF")]
    Second,
    #[serde(rename = "3NF")]
    Third,
    #[serde(rename = "BCNF")]
    Boyce,
    #[serde(rename = "4NF")]
    Fourth,
}

impl fmt::Display for NfStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NfStage::Second => "2NF",
            NfStage::Third => "3NF",
            NfStage::Boyce => "BCNF",
            NfStage::Fourth => "4NF",
        })
    }
}

/// A dependency to test: an FD for stages up to BCNF, an MVD for 4NF.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CandidateDependency {
    pub lhs: AttributeSet,
    pub rhs: AttributeSet,
}

/// Contains a candidate key, or projects to distinct tuples on a non-empty
/// table.
pub fn is_superkey(table: &TableSnapshot, keys: &CandidateKeySet, attrs: &AttributeSet) -> bool {
    keys.contains_key(attrs)
        || (table.row_count() > 0 && partition::distinct_count(table, attrs.indices()) == table.row_count())
}

fn sets_up_to(pool: &[usize], max_size: usize) -> impl Iterator<Item = AttributeSet> + '_ {
    (1..=max_size.min(pool.len())).flat_map(move |k| pool.iter().copied().combinations(k).map(AttributeSet::new))
}

/// Dependencies whose presence would violate `stage`, in canonical order.
pub fn candidate_violating_fds(
    table: &TableSnapshot,
    stage: NfStage,
    keys: &CandidateKeySet,
    max_lhs: usize,
) -> Vec<CandidateDependency> {
    let n = table.column_count();
    let all: Vec<usize> = (0..n).collect();
    let non_prime: Vec<usize> = all.iter().copied().filter(|&c| !keys.is_prime(c)).collect();
    let mut out = Vec::new();

    match stage {
        NfStage::Second => {
            for key in keys.keys.iter().filter(|k| k.len() > 1) {
                for part in sets_up_to(key.indices(), key.len() - 1) {
                    for &a in &non_prime {
                        out.push(CandidateDependency {
                            lhs: part.clone(),
                            rhs: AttributeSet::single(a),
                        });
                    }
                }
            }
        }
        NfStage::Third | NfStage::Boyce => {
            let (pool, targets) = match stage {
                NfStage::Third => (&non_prime, &non_prime),
                _ => (&all, &all),
            };
            for lhs in sets_up_to(pool, max_lhs) {
                if is_superkey(table, keys, &lhs) {
                    continue;
                }
                for &a in targets.iter().filter(|&&a| !lhs.contains(a)) {
                    out.push(CandidateDependency {
                        lhs: lhs.clone(),
                        rhs: AttributeSet::single(a),
                    });
                }
            }
        }
        NfStage::Fourth => {
            for lhs in sets_up_to(&all, max_lhs) {
                if is_superkey(table, keys, &lhs) {
                    continue;
                }
                let rest: Vec<usize> = all.iter().copied().filter(|&c| !lhs.contains(c)).collect();
                if rest.len() < 2 {
                    continue;
                }
                for rhs in sets_up_to(&rest, max_lhs.min(rest.len() - 1)) {
                    let complement = AttributeSet::new(rest.iter().copied()).difference(&rhs);
                    // X ->> Y and X ->> Z are the same constraint; keep one.
                    if complement.len() <= max_lhs && complement < rhs {
                        continue;
                    }
                    out.push(CandidateDependency { lhs: lhs.clone(), rhs });
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keydisc::find_candidate_keys;

    fn pairs(t: &TableSnapshot, c: &[CandidateDependency]) -> Vec<String> {
        c.iter()
            .map(|d| format!("{}->{}", t.names(&d.lhs), t.names(&d.rhs)))
            .collect()
    }

    #[test]
    fn no_composite_key_means_no_partial_candidates() {
        let t = TableSnapshot::from_text_rows("t", &["K", "A"], &[&["1", "x"], &["2", "x"]]).unwrap();
        let keys = find_candidate_keys(&t, 3);
        assert!(candidate_violating_fds(&t, NfStage::Second, &keys, 2).is_empty());
    }

    #[test]
    fn third_nf_pairs_over_non_prime_attributes() {
        let t = TableSnapshot::from_text_rows(
            "t",
            &["K", "A", "B", "C"],
            &[&["1", "a", "b", "c"], &["2", "a", "b", "c"], &["3", "a", "b", "c"]],
        )
        .unwrap();
        let keys = find_candidate_keys(&t, 3);
        let got = pairs(&t, &candidate_violating_fds(&t, NfStage::Third, &keys, 1));
        let mut got_sorted = got.clone();
        got_sorted.sort();
        assert_eq!(got_sorted, vec!["A->B", "A->C", "B->A", "B->C", "C->A", "C->B"]);
    }

    #[test]
    fn boyce_pairs_from_non_superkey_determinants() {
        let t = TableSnapshot::from_text_rows(
            "t",
            &["K", "A", "B"],
            &[&["1", "a", "b"], &["2", "a", "b"], &["3", "a", "c"]],
        )
        .unwrap();
        let keys = find_candidate_keys(&t, 3);
        let got = pairs(&t, &candidate_violating_fds(&t, NfStage::Boyce, &keys, 1));
        assert_eq!(got, vec!["A->K", "A->B", "B->K", "B->A"]);
    }

    #[test]
    fn partial_candidates_from_composite_key() {
        let t = TableSnapshot::from_text_rows(
            "t",
            &["A", "B", "C"],
            &[&["1", "x", "p"], &["1", "y", "p"], &["2", "x", "q"], &["3", "x", "q"]],
        )
        .unwrap();
        let keys = find_candidate_keys(&t, 3);
        assert_eq!(keys.keys, vec![AttributeSet::new([0, 1])]);
        let got = pairs(&t, &candidate_violating_fds(&t, NfStage::Second, &keys, 2));
        assert_eq!(got, vec!["A->C", "B->C"]);
    }

    #[test]
    fn fourth_nf_candidates_skip_mirrored_pairs() {
        let t = TableSnapshot::from_text_rows(
            "t",
            &["X", "Y", "Z"],
            &[&["1", "a", "p"], &["1", "a", "q"], &["1", "b", "p"], &["1", "b", "q"]],
        )
        .unwrap();
        let keys = find_candidate_keys(&t, 3);
        let got = pairs(&t, &candidate_violating_fds(&t, NfStage::Fourth, &keys, 2));
        assert_eq!(got, vec!["X->Y", "Y->X", "Z->X"]);
    }
}
