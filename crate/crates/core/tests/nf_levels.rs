use normdebt_core::depminer::{candidate_violating_fds, holds_fd, NfStage};
use normdebt_core::keydisc::find_candidate_keys;
use normdebt_core::nfclassifier::{classify, ClassifyOptions, NormalForm, NormalFormAssessment};
use normdebt_core::snapshot::TableSnapshot;
use normdebt_core::synth::{planted, Generated, Planted};
use proptest::prelude::*;

fn assess(t: &TableSnapshot) -> NormalFormAssessment {
    classify(t, &find_candidate_keys(t, 3), &ClassifyOptions::default())
}

/// FD stages that must be clean for a table reported at `level`.
fn stages_below(level: NormalForm) -> &'static [NfStage] {
    match level {
        NormalForm::Unnormalized | NormalForm::First => &[],
        NormalForm::Second => &[NfStage::Second],
        NormalForm::Third => &[NfStage::Second, NfStage::Third],
        NormalForm::Boyce | NormalForm::Fourth => &[NfStage::Second, NfStage::Third, NfStage::Boyce],
    }
}

fn without_rows(g: &Generated, drop: &[usize]) -> Generated {
    Generated {
        columns: g.columns.clone(),
        rows: g.rows.iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, r)| r.clone()).collect(),
    }
}

fn check_kind(kind: Planted, seed: u64) -> Result<(), TestCaseError> {
    let g = planted(kind, seed, 1);
    let t = g.to_table("t");
    let a = assess(&t);
    prop_assert_eq!(a.level, kind.expected_level(), "{:?} seed {}: {:?}", kind, seed, a.violation);
    prop_assert_eq!(a.violation.is_some(), kind != Planted::Clean);

    let keys = find_candidate_keys(&t, 3);
    for &stage in stages_below(a.level) {
        if stage == NfStage::Second && !keys.has_composite() {
            continue;
        }
        for c in candidate_violating_fds(&t, stage, &keys, 2) {
            prop_assert!(!holds_fd(&t, &c.lhs, &c.rhs, 1.0).unwrap().holds, "{} held below {}", stage, a.level);
        }
    }

    if let Some(v) = &a.violation {
        prop_assert!(!v.evidence_rows.is_empty());
        let smaller = without_rows(&g, &v.evidence_rows);
        if smaller.rows.len() >= 2 {
            let again = assess(&smaller.to_table("t"));
            prop_assert!(again.level >= a.level, "{:?}: {} after removal, was {}", kind, again.level, a.level);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn list_cell_is_unnormalized(seed in any::<u64>()) { check_kind(Planted::ListCell, seed)?; }

    #[test]
    fn partial_dependency_is_first(seed in any::<u64>()) { check_kind(Planted::PartialFd, seed)?; }

    #[test]
    fn transitive_dependency_is_second(seed in any::<u64>()) { check_kind(Planted::TransitiveFd, seed)?; }

    #[test]
    fn non_superkey_determinant_is_third(seed in any::<u64>()) { check_kind(Planted::NonSuperkeyFd, seed)?; }

    #[test]
    fn non_fd_mvd_is_boyce(seed in any::<u64>()) { check_kind(Planted::NonFdMvd, seed)?; }

    #[test]
    fn clean_table_is_fourth(seed in any::<u64>()) { check_kind(Planted::Clean, seed)?; }

    #[test]
    fn classification_ignores_row_order(kind in prop::sample::select(Planted::ALL.to_vec()), seed in any::<u64>()) {
        let g = planted(kind, seed, 1);
        let mut rev = g.clone();
        rev.rows.reverse();
        let (a, b) = (assess(&g.to_table("t")), assess(&rev.to_table("t")));
        prop_assert_eq!(a.level, b.level);
        let shape = |a: NormalFormAssessment| a.violation.map(|v| (v.stage, v.kind, v.lhs, v.rhs));
        prop_assert_eq!(shape(a), shape(b));
    }
}

#[test]
fn same_input_same_violation() {
    for kind in Planted::ALL {
        let t = planted(kind, 11, 2).to_table("t");
        assert_eq!(assess(&t), assess(&t));
    }
}
