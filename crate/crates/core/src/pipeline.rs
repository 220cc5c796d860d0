//! End-to-end analysis: per-table stages and their assembly into one report.

use serde::{Deserialize, Serialize};

use crate::debtmetrics::{measure, QualityMetrics, DEFAULT_RDI_K_MAX};
use crate::depminer::{DEFAULT_MAX_LHS, DEFAULT_TAU};
use crate::error::{AnalysisError, Error, Result};
use crate::keydisc::{find_candidate_keys, CandidateKeySet, DEFAULT_MAX_KEY_ARITY};
use crate::nfclassifier::{
    classify, debt_items, ClassifyOptions, DebtItems, DependencyHints, NormalFormAssessment, OneNfOptions,
};
use crate::principal::{
    estimate_tasks, principal_of, Cents, CostParameters, PrincipalEstimate, RefactoringTaskPlan,
    DEFAULT_DECOMPOSITIONS,
};
use crate::prioritizer::{build_report, PriorityReport};
use crate::snapshot::{DatabaseSnapshot, TableSnapshot};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub tau: f64,
    pub max_key_arity: usize,
    pub max_lhs: usize,
    pub k_max: usize,
    pub cost: CostParameters,
    pub decompositions: u64,
    pub one_nf: OneNfOptions,
    pub hints: Option<DependencyHints>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            tau: DEFAULT_TAU,
            max_key_arity: DEFAULT_MAX_KEY_ARITY,
            max_lhs: DEFAULT_MAX_LHS,
            k_max: DEFAULT_RDI_K_MAX,
            cost: CostParameters::default(),
            decompositions: DEFAULT_DECOMPOSITIONS,
            one_nf: OneNfOptions::default(),
            hints: None,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(AnalysisError::InvalidParameter(format!("tau must lie in (0, 1], got {}", self.tau)));
        }
        for (name, v) in [("max key arity", self.max_key_arity), ("max lhs", self.max_lhs), ("k_max", self.k_max)] {
            if v == 0 {
                return Err(AnalysisError::InvalidParameter(format!("{name} must be at least 1")));
            }
        }
        CostParameters::new(self.cost.hourly_wage, self.cost.minutes_per_task)?;
        Ok(())
    }

    /// Compact one-line rendering of the parameters that affect results.
    pub fn echo(&self) -> String {
        format!(
            "tau={} max_key_arity={} max_lhs={} k_max={} wage={} minutes_per_task={} decompositions={} hints={}",
            self.tau,
            self.max_key_arity,
            self.max_lhs,
            self.k_max,
            self.cost.hourly_wage,
            self.cost.minutes_per_task,
            self.decompositions,
            if self.hints.is_some() { "yes" } else { "no" }
        )
    }
}

/// Every stage result for one table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableAnalysis {
    pub table: String,
    pub keys: CandidateKeySet,
    pub assessment: NormalFormAssessment,
    /// Absent only for tables without rows and without an injected risk.
    pub metrics: Option<QualityMetrics>,
    /// Present only for debt tables.
    pub plan: Option<RefactoringTaskPlan>,
    pub principal: Option<PrincipalEstimate>,
}

pub fn analyze_table(table: &TableSnapshot, config: &AnalysisConfig) -> Result<TableAnalysis, Error> {
    let keys = find_candidate_keys(table, config.max_key_arity);
    let hints = match &config.hints {
        Some(h) => h.resolve(table)?,
        None => None,
    };
    let options = ClassifyOptions {
        tau: config.tau,
        max_lhs: config.max_lhs,
        one_nf: config.one_nf.clone(),
        hints,
    };
    let assessment = classify(table, &keys, &options);
    let metrics = if table.row_count() == 0 && table.overrides().rdi.is_none() {
        None
    } else {
        Some(measure(table, &keys, config.k_max)?)
    };
    let (plan, principal) = if assessment.is_debt() {
        let plan = estimate_tasks(table, &assessment, None, config.decompositions)?;
        let principal = principal_of(&plan, &config.cost);
        (Some(plan), Some(principal))
    } else {
        (None, None)
    };
    Ok(TableAnalysis {
        table: table.name().to_string(),
        keys,
        assessment,
        metrics,
        plan,
        principal,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub snapshot: String,
    pub config: AnalysisConfig,
    /// In snapshot (name) order.
    pub tables: Vec<TableAnalysis>,
    pub debt: DebtItems,
    pub priority: PriorityReport,
}

impl AnalysisReport {
    pub fn assessments(&self) -> Vec<NormalFormAssessment> {
        self.tables.iter().map(|t| t.assessment.clone()).collect()
    }

    pub fn metrics(&self) -> Vec<QualityMetrics> {
        self.tables.iter().filter_map(|t| t.metrics.clone()).collect()
    }

    pub fn principals(&self) -> Vec<PrincipalEstimate> {
        self.tables.iter().filter_map(|t| t.principal.clone()).collect()
    }
}

/// Ranks the debt tables among `analyses` and attaches explanatory notes.
pub fn assemble(
    snapshot: &DatabaseSnapshot,
    config: &AnalysisConfig,
    mut analyses: Vec<TableAnalysis>,
) -> Result<AnalysisReport> {
    analyses.sort_by(|a, b| a.table.cmp(&b.table));
    let assessments: Vec<NormalFormAssessment> = analyses.iter().map(|t| t.assessment.clone()).collect();
    let metrics: Vec<QualityMetrics> = analyses.iter().filter_map(|t| t.metrics.clone()).collect();
    let principals: Vec<PrincipalEstimate> = analyses.iter().filter_map(|t| t.principal.clone()).collect();
    let mut priority = build_report(&assessments, &metrics, &principals)?;
    if let Some(total) = snapshot.reference.conventional_total {
        priority.note_reference_total(Cents::from_decimal(total));
    }

    let debt_metrics: Vec<&QualityMetrics> = priority
        .rows
        .iter()
        .filter_map(|r| metrics.iter().find(|m| m.table == r.ranks.table))
        .collect();
    let measured_size: Vec<&str> = debt_metrics
        .iter()
        .filter(|m| !m.overridden.iter().any(|o| o == "size_mb"))
        .map(|m| m.table.as_str())
        .collect();
    if !measured_size.is_empty() {
        priority.footnotes.push(format!(
            "Size of {} is the UTF-8 byte count of its cell text in MiB, not its on-disk storage.",
            measured_size.join(", ")
        ));
    }
    let capped: Vec<String> = debt_metrics
        .iter()
        .filter(|m| !m.rdi_exact)
        .map(|m| format!("{} (k <= {})", m.table, m.rdi_k_max))
        .collect();
    if !capped.is_empty() {
        priority.footnotes.push(format!(
            "RDI enumerated only attribute subsets up to the size shown for {}.",
            capped.join(", ")
        ));
    }
    if config.tau < 1.0 {
        priority.footnotes.push(format!(
            "Dependencies were accepted at confidence >= {}; classifications are approximate.",
            config.tau
        ));
    }

    let debt = debt_items(snapshot, &assessments);
    Ok(AnalysisReport {
        snapshot: snapshot.name.clone(),
        config: config.clone(),
        tables: analyses,
        debt,
        priority,
    })
}

/// Sequential convenience driver over every table.
pub fn analyze(snapshot: &DatabaseSnapshot, config: &AnalysisConfig) -> Result<AnalysisReport, Error> {
    config.validate()?;
    let analyses = snapshot
        .tables()
        .iter()
        .map(|t| analyze_table(t, config))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(assemble(snapshot, config, analyses)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfclassifier::NormalForm;

    fn snapshot() -> DatabaseSnapshot {
        let clean = TableSnapshot::from_text_rows("Clean", &["id", "x"], &[&["1", "a"], &["2", "b"]]).unwrap();
        let listy =
            TableSnapshot::from_text_rows("Listy", &["id", "tags"], &[&["1", "a;b"], &["2", "c"], &["3", "c"]])
                .unwrap();
        let lonely = TableSnapshot::from_text_rows("Lonely", &["id"], &[&["1"]]).unwrap();
        DatabaseSnapshot::new("db", vec![listy, clean, lonely]).unwrap()
    }

    #[test]
    fn end_to_end_on_small_snapshot() {
        let report = analyze(&snapshot(), &AnalysisConfig::default()).unwrap();
        assert_eq!(report.debt.debt, vec!["Listy"]);
        assert_eq!(report.debt.insufficient_data, vec!["Lonely"]);
        let listy = report.tables.iter().find(|t| t.table == "Listy").unwrap();
        assert_eq!(listy.assessment.level, NormalForm::Unnormalized);
        assert_eq!(listy.principal.as_ref().unwrap().total_cost, Cents(642 * 10));
        assert_eq!(report.priority.rows.len(), 1);
        assert!(report.priority.footnotes.iter().any(|f| f.contains("UTF-8")));
    }

    #[test]
    fn invalid_config_rejected() {
        let config = AnalysisConfig {
            tau: 1.5,
            ..Default::default()
        };
        assert!(matches!(
            analyze(&snapshot(), &config),
            Err(Error::Analysis(AnalysisError::InvalidParameter(_)))
        ));
    }

    #[test]
    fn unknown_hint_column_is_a_snapshot_error() {
        let hints = DependencyHints::from_json(r#"{"tables":{"Clean":[{"lhs":["nope"],"rhs":["x"]}]}}"#).unwrap();
        let config = AnalysisConfig {
            hints: Some(hints),
            ..Default::default()
        };
        assert!(matches!(analyze(&snapshot(), &config), Err(Error::Snapshot(_))));
    }
}
