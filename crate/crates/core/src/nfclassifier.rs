//! Normal-form classification: checks each normal form in turn and stops at
//! the first one whose violating dependency holds in the data.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::depminer::{
    candidate_violating_fds, holds_fd, holds_mvd, is_superkey, CandidateDependency, NfStage,
    DEFAULT_MAX_LHS, DEFAULT_TAU,
};
use crate::error::SnapshotError;
use crate::keydisc::CandidateKeySet;
use crate::partition;
use crate::snapshot::{is_decimal, AttributeSet, DatabaseSnapshot, TableSnapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NormalForm {
    #[serde(rename = "UNNORMALIZED")]
    Unnormalized,
    #[serde(rename = "1NF")]
    First,
    #[serde(rename = "2NF")]
    Second,
    #[serde(rename = "3NF")]
    Third,
    #[serde(rename = "BCNF")]
    Boyce,
    #[serde(rename = "4NF")]
    Fourth,
}

impl NormalForm {
    pub fn is_debt(self) -> bool {
        self < NormalForm::Fourth
    }

    pub fn label(self) -> &'static str {
        match self {
            NormalForm::Unnormalized => "UNNORMALIZED",
            NormalForm::First => "1NF",
            NormalForm::Second => "2NF",
            NormalForm::Third => "3NF",
            NormalForm::Boyce => "BCNF",
            NormalForm::Fourth => "4NF",
        }
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    MultiValuedCell,
    RepeatingGroup,
    PartialDependency,
    TransitiveDependency,
    NonSuperkeyDeterminant,
    MultivaluedDependency,
}

/// The dependency (or 1NF rule) that stopped the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// The normal form that is not met.
    pub stage: NormalForm,
    pub kind: ViolationKind,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    pub evidence_rows: Vec<usize>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFormAssessment {
    pub table: String,
    pub level: NormalForm,
    pub violation: Option<Violation>,
    pub keys_used: CandidateKeySet,
    pub approximate: bool,
    pub insufficient_data: bool,
    pub warnings: Vec<String>,
}

impl NormalFormAssessment {
    pub fn is_debt(&self) -> bool {
        !self.insufficient_data && self.level.is_debt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneNfOptions {
    pub delimiters: Vec<char>,
    pub width_threshold: usize,
}

impl Default for OneNfOptions {
    fn default() -> Self {
        OneNfOptions {
            delimiters: vec![';', ',', '|'],
            width_threshold: 40,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OneNfReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl OneNfReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

fn looks_numeric(cell: &str) -> bool {
    if is_decimal(cell) {
        return true;
    }
    // thousands grouping such as 1,250,000.50
    let body = cell.strip_prefix(['+', '-']).unwrap_or(cell);
    let int_part = body.split_once('.').map_or(body, |(a, _)| a);
    let groups: Vec<&str> = int_part.split(',').collect();
    groups.len() > 1
        && (1..=3).contains(&groups[0].len())
        && groups[1..].iter().all(|g| g.len() == 3)
        && is_decimal(&body.replace(',', ""))
}

fn list_delimiter_at(cell: &str, delimiters: &[char]) -> bool {
    let chars: Vec<char> = cell.chars().collect();
    chars.windows(3).any(|w| {
        delimiters.contains(&w[1]) && !w[0].is_whitespace() && !w[2].is_whitespace() && !delimiters.contains(&w[0])
    })
}

fn numeric_stem(name: &str) -> Option<&str> {
    let stem = name.trim_end_matches(|c: char| c.is_ascii_digit());
    (stem.len() < name.len() && !stem.is_empty()).then_some(stem)
}

/// First-normal-form detection: multi-valued cells and repeating column
/// groups are violations; an overly wide table only warns.
pub fn check_1nf(table: &TableSnapshot, options: &OneNfOptions) -> OneNfReport {
    let mut report = OneNfReport::default();

    let mut stems: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for c in table.columns() {
        if let Some(stem) = numeric_stem(&c.name) {
            stems.entry(stem).or_default().push(c.name.clone());
        }
    }
    for (stem, columns) in stems {
        if columns.len() >= 3 {
            report.violations.push(Violation {
                stage: NormalForm::First,
                kind: ViolationKind::RepeatingGroup,
                lhs: Vec::new(),
                description: format!("repeating group {stem}* ({})", columns.join(", ")),
                rhs: columns,
                evidence_rows: Vec::new(),
            });
        }
    }

    for (ci, col) in table.columns().iter().enumerate() {
        if col.inferred_kind.is_numeric() {
            continue;
        }
        let hit = table.rows().iter().enumerate().find_map(|(ri, row)| {
            let cell = row[ci].as_str()?;
            (!looks_numeric(cell) && list_delimiter_at(cell, &options.delimiters)).then_some((ri, cell))
        });
        if let Some((ri, cell)) = hit {
            report.violations.push(Violation {
                stage: NormalForm::First,
                kind: ViolationKind::MultiValuedCell,
                lhs: Vec::new(),
                rhs: vec![col.name.clone()],
                evidence_rows: vec![ri],
                description: format!("multi-valued cell \"{cell}\" in column {} (row {ri})", col.name),
            });
        }
    }

    if table.column_count() > options.width_threshold {
        report.warnings.push(format!(
            "{} columns exceeds width threshold {}; table may store several entities",
            table.column_count(),
            options.width_threshold
        ));
    }
    report
}

/// Domain-suggested dependencies, by table name and column names.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DependencyHints {
    pub tables: BTreeMap<String, Vec<HintPair>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HintPair {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

impl DependencyHints {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Hints for one table resolved to column indices; `None` when the table
    /// has no hints.
    pub fn resolve(&self, table: &TableSnapshot) -> Result<Option<Vec<CandidateDependency>>, SnapshotError> {
        let Some(pairs) = self.tables.get(table.name()) else {
            return Ok(None);
        };
        let resolve = |names: &[String]| {
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            table.attrs(&names)
        };
        pairs
            .iter()
            .map(|p| {
                Ok(CandidateDependency {
                    lhs: resolve(&p.lhs)?,
                    rhs: resolve(&p.rhs)?,
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyOptions {
    pub tau: f64,
    pub max_lhs: usize,
    pub one_nf: OneNfOptions,
    /// When present, only candidates matching one of these are tested.
    pub hints: Option<Vec<CandidateDependency>>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            tau: DEFAULT_TAU,
            max_lhs: DEFAULT_MAX_LHS,
            one_nf: OneNfOptions::default(),
            hints: None,
        }
    }
}

fn allowed_by_hints(hints: &Option<Vec<CandidateDependency>>, cand: &CandidateDependency) -> bool {
    match hints {
        None => true,
        Some(h) => h.iter().any(|p| p.lhs == cand.lhs && cand.rhs.is_subset(&p.rhs)),
    }
}

/// First two rows sharing a projection onto `attrs`.
fn repeated_rows(table: &TableSnapshot, attrs: &AttributeSet) -> Vec<usize> {
    let g = partition::group_by(table, attrs.indices());
    let mut first: HashMap<u32, usize> = HashMap::new();
    for (row, &id) in g.ids.iter().enumerate() {
        if let Some(&r0) = first.get(&id) {
            return vec![r0, row];
        }
        first.insert(id, row);
    }
    Vec::new()
}

fn stage_form(stage: NfStage) -> NormalForm {
    match stage {
        NfStage::Second => NormalForm::Second,
        NfStage::Third => NormalForm::Third,
        NfStage::Boyce => NormalForm::Boyce,
        NfStage::Fourth => NormalForm::Fourth,
    }
}

/// First FD candidate of `stage` that holds, as a violation.
fn first_fd_violation(
    table: &TableSnapshot,
    keys: &CandidateKeySet,
    stage: NfStage,
    options: &ClassifyOptions,
) -> Option<Violation> {
    let (kind, label) = match stage {
        NfStage::Second => (ViolationKind::PartialDependency, "partial dependency"),
        NfStage::Third => (ViolationKind::TransitiveDependency, "transitive dependency"),
        _ => (ViolationKind::NonSuperkeyDeterminant, "non-superkey determinant"),
    };
    candidate_violating_fds(table, stage, keys, options.max_lhs)
        .into_iter()
        .filter(|c| allowed_by_hints(&options.hints, c))
        .find_map(|c| {
            let fd = holds_fd(table, &c.lhs, &c.rhs, options.tau).ok()?;
            fd.holds.then(|| {
                let approx = if fd.is_approximate() {
                    format!(" (approximate, confidence {:.3})", fd.min_confidence_observed)
                } else {
                    String::new()
                };
                Violation {
                    stage: stage_form(stage),
                    kind,
                    lhs: table.name_list(&c.lhs),
                    rhs: table.name_list(&c.rhs),
                    evidence_rows: repeated_rows(table, &c.lhs),
                    description: format!("{label} {} → {}{approx}", table.names(&c.lhs), table.names(&c.rhs)),
                }
            })
        })
}

fn first_mvd_violation(table: &TableSnapshot, keys: &CandidateKeySet, options: &ClassifyOptions) -> Option<Violation> {
    candidate_violating_fds(table, NfStage::Fourth, keys, options.max_lhs)
        .into_iter()
        .filter(|c| allowed_by_hints(&options.hints, c))
        .find_map(|c| {
            let mvd = holds_mvd(table, &c.lhs, &c.rhs).ok()?;
            if !mvd.holds || mvd.complement.is_empty() {
                return None;
            }
            let implied = [&mvd.rhs, &mvd.complement].iter().any(|side| {
                holds_fd(table, &c.lhs, side, 1.0).map(|fd| fd.holds).unwrap_or(false)
            });
            if implied || is_superkey(table, keys, &c.lhs) {
                return None;
            }
            let evidence = {
                let by_lhs = partition::group_by(table, c.lhs.indices());
                let by_rhs = partition::group_by(table, c.lhs.union(&c.rhs).indices());
                let mut first: HashMap<u32, (usize, u32)> = HashMap::new();
                let mut rows = Vec::new();
                for row in 0..table.row_count() {
                    match first.get(&by_lhs.ids[row]) {
                        Some(&(r0, y0)) if y0 != by_rhs.ids[row] => {
                            rows = vec![r0, row];
                            break;
                        }
                        Some(_) => {}
                        None => {
                            first.insert(by_lhs.ids[row], (row, by_rhs.ids[row]));
                        }
                    }
                }
                rows
            };
            Some(Violation {
                stage: NormalForm::Fourth,
                kind: ViolationKind::MultivaluedDependency,
                lhs: table.name_list(&c.lhs),
                rhs: table.name_list(&c.rhs),
                evidence_rows: evidence,
                description: format!("MVD {} →→ {}", table.names(&c.lhs), table.names(&c.rhs)),
            })
        })
}

/// Classifies a table's current normal form.
///
/// Tables with fewer than two rows are returned with `insufficient_data`
/// set and level 4NF; they are not debt items.
pub fn classify(table: &TableSnapshot, keys: &CandidateKeySet, options: &ClassifyOptions) -> NormalFormAssessment {
    let mut assessment = NormalFormAssessment {
        table: table.name().to_string(),
        level: NormalForm::Fourth,
        violation: None,
        keys_used: keys.clone(),
        approximate: options.tau < 1.0,
        insufficient_data: false,
        warnings: Vec::new(),
    };
    if table.row_count() < 2 {
        assessment.insufficient_data = true;
        assessment
            .warnings
            .push(format!("{} row(s): no evidence for dependency inference", table.row_count()));
        return assessment;
    }

    let one_nf = check_1nf(table, &options.one_nf);
    assessment.warnings.extend(one_nf.warnings);
    if let Some(v) = one_nf.violations.into_iter().next() {
        assessment.level = NormalForm::Unnormalized;
        assessment.violation = Some(v);
        return assessment;
    }

    let fd_stages = [
        (NfStage::Second, NormalForm::First),
        (NfStage::Third, NormalForm::Second),
        (NfStage::Boyce, NormalForm::Third),
    ];
    for (stage, level_if_violated) in fd_stages {
        // Without a composite key there is no partial dependency to find.
        if stage == NfStage::Second && !keys.has_composite() {
            continue;
        }
        if let Some(v) = first_fd_violation(table, keys, stage, options) {
            assessment.level = level_if_violated;
            assessment.violation = Some(v);
            return assessment;
        }
    }
    if let Some(v) = first_mvd_violation(table, keys, options) {
        assessment.level = NormalForm::Boyce;
        assessment.violation = Some(v);
    }
    assessment
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DebtItems {
    pub debt: Vec<String>,
    pub insufficient_data: Vec<String>,
}

/// Tables below 4NF in name order; tables without enough data are listed
/// separately.
pub fn debt_items(snapshot: &DatabaseSnapshot, assessments: &[NormalFormAssessment]) -> DebtItems {
    let by_name: HashMap<&str, &NormalFormAssessment> =
        assessments.iter().map(|a| (a.table.as_str(), a)).collect();
    let mut out = DebtItems::default();
    for t in snapshot.tables() {
        let Some(a) = by_name.get(t.name()) else { continue };
        if a.insufficient_data {
            out.insufficient_data.push(a.table.clone());
        } else if a.level.is_debt() {
            out.debt.push(a.table.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keydisc::find_candidate_keys;

    fn classify_rows(cols: &[&str], rows: &[&[&str]]) -> NormalFormAssessment {
        let t = TableSnapshot::from_text_rows("t", cols, rows).unwrap();
        let keys = find_candidate_keys(&t, 3);
        classify(&t, &keys, &ClassifyOptions::default())
    }

    #[test]
    fn list_cell_is_a_1nf_violation() {
        let t = TableSnapshot::from_text_rows("t", &["id", "color"], &[&["1", "red;blue"], &["2", "red"]]).unwrap();
        let r = check_1nf(&t, &OneNfOptions::default());
        assert!(!r.passes());
        assert_eq!(r.violations[0].kind, ViolationKind::MultiValuedCell);
        assert!(r.violations[0].description.contains("red;blue"));
    }

    #[test]
    fn prose_and_numbers_are_not_list_cells() {
        let t = TableSnapshot::from_text_rows(
            "t",
            &["note", "amount"],
            &[&["Seattle, WA", "1,250,000.50"], &["a ; b", "12"]],
        )
        .unwrap();
        assert!(check_1nf(&t, &OneNfOptions::default()).passes());
    }

    #[test]
    fn repeating_group_is_a_1nf_violation() {
        let t = TableSnapshot::from_text_rows(
            "t",
            &["id", "phone1", "phone2", "phone3"],
            &[&["1", "a", "b", "c"]],
        )
        .unwrap();
        let r = check_1nf(&t, &OneNfOptions::default());
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ViolationKind::RepeatingGroup);
        assert_eq!(r.violations[0].rhs, vec!["phone1", "phone2", "phone3"]);
    }

    #[test]
    fn two_numbered_columns_are_fine_and_width_only_warns() {
        let mut cols: Vec<String> = (0..41).map(|i| format!("c{}x", i)).collect();
        cols[0] = "AddressLine1".into();
        cols[1] = "AddressLine2".into();
        let names: Vec<&str> = cols.iter().map(String::as_str).collect();
        let row: Vec<&str> = vec!["v"; 41];
        let t = TableSnapshot::from_text_rows("t", &names, &[&row]).unwrap();
        let r = check_1nf(&t, &OneNfOptions::default());
        assert!(r.passes());
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn single_distinct_column_is_4nf() {
        let a = classify_rows(&["A"], &[&["1"], &["2"], &["3"]]);
        assert_eq!(a.level, NormalForm::Fourth);
        assert!(a.violation.is_none());
    }

    #[test]
    fn composite_key_with_partial_dependency_is_1nf() {
        let a = classify_rows(
            &["A", "B", "C"],
            &[&["1", "x", "p"], &["1", "y", "p"], &["2", "x", "q"], &["2", "y", "q"], &["3", "x", "q"]],
        );
        assert_eq!(a.level, NormalForm::First);
        let v = a.violation.unwrap();
        assert_eq!(v.kind, ViolationKind::PartialDependency);
        assert_eq!(v.description, "partial dependency A → C");
        assert_eq!(v.evidence_rows, vec![0, 1]);
    }

    #[test]
    fn too_few_rows_is_insufficient_data() {
        let a = classify_rows(&["A", "B"], &[&["1", "x"]]);
        assert!(a.insufficient_data);
        assert!(!a.is_debt());
    }

    #[test]
    fn hints_restrict_candidates() {
        let t = TableSnapshot::from_text_rows(
            "t",
            &["K", "A", "B", "C"],
            &[&["1", "a", "x", "p"], &["2", "a", "x", "p"], &["3", "b", "y", "q"], &["4", "b", "y", "p"]],
        )
        .unwrap();
        let keys = find_candidate_keys(&t, 3);
        let plain = classify(&t, &keys, &ClassifyOptions::default());
        assert_eq!(plain.level, NormalForm::Second);
        let hints = DependencyHints::from_json(r#"{"tables": {"t": [{"lhs": ["A"], "rhs": ["C"]}]}}"#).unwrap();
        let opts = ClassifyOptions {
            hints: hints.resolve(&t).unwrap(),
            ..Default::default()
        };
        let hinted = classify(&t, &keys, &opts);
        assert_eq!(hinted.level, NormalForm::Fourth);
    }

    #[test]
    fn debt_items_skip_insufficient_tables() {
        let t1 = TableSnapshot::from_text_rows("b", &["A"], &[&["1"]]).unwrap();
        let t2 = TableSnapshot::from_text_rows("a", &["A", "B"], &[&["1", "x"], &["1", "y"], &["2", "x"]]).unwrap();
        let snap = DatabaseSnapshot::new("db", vec![t1, t2]).unwrap();
        let assessments: Vec<_> = snap
            .tables()
            .iter()
            .map(|t| classify(t, &find_candidate_keys(t, 3), &ClassifyOptions::default()))
            .collect();
        let items = debt_items(&snap, &assessments);
        assert_eq!(items.insufficient_data, vec!["b"]);
        assert!(items.debt.is_empty());
    }
}
