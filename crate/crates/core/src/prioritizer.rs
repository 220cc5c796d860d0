//! Trade-off ranking of debt tables: cost rank against quality-impact rank,
//! with decisions read off the decision-matrix diagonal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::debtmetrics::QualityMetrics;
use crate::error::{AnalysisError, Result};
use crate::nfclassifier::{NormalForm, NormalFormAssessment};
use crate::principal::{Cents, PrincipalEstimate};

/// Ascending dense ranks: the smallest value gets 1, ties share a rank and
/// the next distinct value gets the next integer.
pub fn dense_rank(values: &[f64]) -> Result<Vec<usize>> {
    if values.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    Ok(values
        .iter()
        .map(|v| distinct.partition_point(|d| d.total_cmp(v).is_lt()) + 1)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum View {
    Aggregate,
    Rdi,
    Tc,
    Tz,
}

impl View {
    pub const ALL: [View; 4] = [View::Aggregate, View::Rdi, View::Tc, View::Tz];

    pub fn slug(self) -> &'static str {
        match self {
            View::Aggregate => "aggregate",
            View::Rdi => "rdi",
            View::Tc => "tc",
            View::Tz => "tz",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            View::Aggregate => "aggregated quality impact",
            View::Rdi => "risk of data inconsistency",
            View::Tc => "table complexity",
            View::Tz => "table size",
        }
    }

    pub fn option_number(self) -> usize {
        self as usize + 1
    }
}

impl std::str::FromStr for View {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        View::ALL
            .into_iter()
            .find(|v| v.slug().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown view `{s}` (expected aggregate, rdi, tc or tz)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Decision {
    Normalize,
    Balanced,
    Defer,
}

impl Decision {
    pub fn label(self) -> &'static str {
        match self {
            Decision::Normalize => "NORMALIZE",
            Decision::Balanced => "BALANCED",
            Decision::Defer => "DEFER",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Above the diagonal (impact outranks cost) means normalize.
pub fn decide(cost_rank: usize, impact_rank: usize) -> Decision {
    match impact_rank.cmp(&cost_rank) {
        std::cmp::Ordering::Greater => Decision::Normalize,
        std::cmp::Ordering::Equal => Decision::Balanced,
        std::cmp::Ordering::Less => Decision::Defer,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImpactRanks {
    pub table: String,
    pub rdi_rank: usize,
    pub tc_rank: usize,
    pub tz_rank: usize,
    pub impact_sum: usize,
    pub impact_rank: usize,
}

/// Ranks each metric ascending (lowest impact = 1) and the sum of the three
/// ranks likewise.
pub fn impact_ranks(metrics: &[QualityMetrics]) -> Result<Vec<ImpactRanks>> {
    for m in metrics {
        for (name, v) in [("rdi", m.rdi), ("size_mb", m.size_mb)] {
            if !v.is_finite() {
                return Err(AnalysisError::MissingMetric {
                    table: m.table.clone(),
                    metric: name,
                });
            }
        }
    }
    let rdi = dense_rank(&metrics.iter().map(|m| m.rdi).collect::<Vec<_>>())?;
    let tc = dense_rank(&metrics.iter().map(|m| m.complexity_weight as f64).collect::<Vec<_>>())?;
    let tz = dense_rank(&metrics.iter().map(|m| m.size_mb).collect::<Vec<_>>())?;
    let sums: Vec<usize> = (0..metrics.len()).map(|i| rdi[i] + tc[i] + tz[i]).collect();
    let overall = dense_rank(&sums.iter().map(|&s| s as f64).collect::<Vec<_>>())?;
    Ok(metrics
        .iter()
        .enumerate()
        .map(|(i, m)| ImpactRanks {
            table: m.table.clone(),
            rdi_rank: rdi[i],
            tc_rank: tc[i],
            tz_rank: tz[i],
            impact_sum: sums[i],
            impact_rank: overall[i],
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankRecord {
    pub table: String,
    pub cost_rank: usize,
    pub rdi_rank: usize,
    pub tc_rank: usize,
    pub tz_rank: usize,
    pub impact_sum: usize,
    pub impact_rank: usize,
}

impl RankRecord {
    /// The rank compared against the cost rank in `view`.
    pub fn criterion_rank(&self, view: View) -> usize {
        match view {
            View::Aggregate => self.impact_rank,
            View::Rdi => self.rdi_rank,
            View::Tc => self.tc_rank,
            View::Tz => self.tz_rank,
        }
    }

    pub fn decision(&self, view: View) -> Decision {
        decide(self.cost_rank, self.criterion_rank(view))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub normal_form: NormalForm,
    pub rdi: f64,
    pub weight: u64,
    pub size_mb: f64,
    pub task_count: u64,
    pub principal: Cents,
    #[serde(flatten)]
    pub ranks: RankRecord,
    pub decisions: BTreeMap<View, Decision>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizationOption {
    pub view: View,
    pub label: String,
    pub tables: Vec<String>,
    pub total_cost: Cents,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConventionalOption {
    pub tables: Vec<String>,
    pub total_cost: Cents,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriorityReport {
    /// Sorted by table name.
    pub rows: Vec<ReportRow>,
    pub options: Vec<NormalizationOption>,
    pub conventional: ConventionalOption,
    pub footnotes: Vec<String>,
}

impl PriorityReport {
    pub fn option(&self, view: View) -> &NormalizationOption {
        &self.options[view as usize]
    }

    pub fn records(&self) -> impl Iterator<Item = &RankRecord> {
        self.rows.iter().map(|r| &r.ranks)
    }

    /// Notes a published conventional total that disagrees with the sum of
    /// the principals.
    pub fn note_reference_total(&mut self, reference: Cents) {
        if reference != self.conventional.total_cost {
            self.footnotes.push(format!(
                "Conventional total is the cent-exact sum of all debt-table principals ({}); the reference figure supplied for comparison is {}, a difference of {}.",
                self.conventional.total_cost,
                reference,
                Cents(self.conventional.total_cost.0 - reference.0),
            ));
        }
    }
}

/// Combines per-table assessments, metrics and principals of the debt tables
/// into ranks, decisions and per-view normalization options.
pub fn build_report(
    assessments: &[NormalFormAssessment],
    metrics: &[QualityMetrics],
    principals: &[PrincipalEstimate],
) -> Result<PriorityReport> {
    let debt: BTreeMap<&str, &NormalFormAssessment> = assessments
        .iter()
        .filter(|a| a.is_debt())
        .map(|a| (a.table.as_str(), a))
        .collect();
    let metric_by: BTreeMap<&str, &QualityMetrics> = metrics.iter().map(|m| (m.table.as_str(), m)).collect();
    let principal_by: BTreeMap<&str, &PrincipalEstimate> =
        principals.iter().map(|p| (p.table.as_str(), p)).collect();

    let missing: Vec<&str> = debt
        .keys()
        .copied()
        .filter(|t| !metric_by.contains_key(t) || !principal_by.contains_key(t))
        .collect();
    if !missing.is_empty() {
        return Err(AnalysisError::InconsistentTableSets(format!(
            "no metrics or principal for debt table(s) {}",
            missing.join(", ")
        )));
    }
    let extra: BTreeSet<&str> = principal_by.keys().copied().filter(|t| !debt.contains_key(t)).collect();
    if !extra.is_empty() {
        return Err(AnalysisError::InconsistentTableSets(format!(
            "principal given for non-debt table(s) {}",
            extra.into_iter().collect::<Vec<_>>().join(", ")
        )));
    }

    if debt.is_empty() {
        return Ok(PriorityReport {
            rows: Vec::new(),
            options: View::ALL
                .into_iter()
                .map(|view| NormalizationOption {
                    view,
                    label: format!("Option {}", view.option_number()),
                    tables: Vec::new(),
                    total_cost: Cents(0),
                })
                .collect(),
            conventional: ConventionalOption {
                tables: Vec::new(),
                total_cost: Cents(0),
            },
            footnotes: Vec::new(),
        });
    }

    let tables: Vec<&str> = debt.keys().copied().collect();
    let debt_metrics: Vec<QualityMetrics> = tables.iter().map(|t| metric_by[t].clone()).collect();
    let impact = impact_ranks(&debt_metrics)?;
    let costs: Vec<f64> = tables.iter().map(|t| principal_by[t].total_cost.0 as f64).collect();
    let cost_ranks = dense_rank(&costs)?;

    let rows: Vec<ReportRow> = tables
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let ranks = RankRecord {
                table: t.to_string(),
                cost_rank: cost_ranks[i],
                rdi_rank: impact[i].rdi_rank,
                tc_rank: impact[i].tc_rank,
                tz_rank: impact[i].tz_rank,
                impact_sum: impact[i].impact_sum,
                impact_rank: impact[i].impact_rank,
            };
            let decisions = View::ALL.into_iter().map(|v| (v, ranks.decision(v))).collect();
            ReportRow {
                normal_form: debt[t].level,
                rdi: debt_metrics[i].rdi,
                weight: debt_metrics[i].complexity_weight,
                size_mb: debt_metrics[i].size_mb,
                task_count: principal_by[t].task_count,
                principal: principal_by[t].total_cost,
                ranks,
                decisions,
            }
        })
        .collect();

    let options = View::ALL
        .into_iter()
        .map(|view| {
            let selected: Vec<&ReportRow> =
                rows.iter().filter(|r| r.decisions[&view] == Decision::Normalize).collect();
            NormalizationOption {
                view,
                label: format!("Option {}", view.option_number()),
                tables: selected.iter().map(|r| r.ranks.table.clone()).collect(),
                total_cost: selected.iter().map(|r| r.principal).sum(),
            }
        })
        .collect();
    let conventional = ConventionalOption {
        tables: rows.iter().map(|r| r.ranks.table.clone()).collect(),
        total_cost: rows.iter().map(|r| r.principal).sum(),
    };
    Ok(PriorityReport {
        rows,
        options,
        conventional,
        footnotes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_rank_examples() {
        let costs = [51.36, 51.36, 57.78, 64.2, 70.62, 77.04, 102.72, 321.00];
        assert_eq!(dense_rank(&costs).unwrap(), vec![1, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(dense_rank(&[4.2]).unwrap(), vec![1]);
        assert_eq!(dense_rank(&[3.0, 1.0, 2.0, 2.0]).unwrap(), vec![3, 1, 2, 2]);
        assert_eq!(dense_rank(&[]), Err(AnalysisError::EmptyInput));
    }

    #[test]
    fn decisions() {
        assert_eq!(decide(1, 5), Decision::Normalize);
        assert_eq!(decide(4, 1), Decision::Defer);
        assert_eq!(decide(3, 3), Decision::Balanced);
    }

    fn metric(table: &str, rdi: f64, weight: u64, size: f64) -> QualityMetrics {
        QualityMetrics {
            table: table.into(),
            rdi,
            rdi_duplicates: None,
            rdi_cells: None,
            rdi_k_max: 12,
            rdi_exact: true,
            complexity_weight: weight,
            size_mb: size,
            overridden: Vec::new(),
        }
    }

    #[test]
    fn single_table_ranks_all_one() {
        let r = impact_ranks(&[metric("a", 1.0, 3, 0.1)]).unwrap();
        assert_eq!((r[0].rdi_rank, r[0].tc_rank, r[0].tz_rank, r[0].impact_sum, r[0].impact_rank), (1, 1, 1, 3, 1));
    }

    #[test]
    fn identical_triples_share_ranks() {
        let r = impact_ranks(&[metric("a", 1.0, 3, 0.1), metric("b", 1.0, 3, 0.1), metric("c", 2.0, 4, 0.2)]).unwrap();
        assert_eq!(
            (r[0].rdi_rank, r[0].tc_rank, r[0].tz_rank, r[0].impact_rank),
            (r[1].rdi_rank, r[1].tc_rank, r[1].tz_rank, r[1].impact_rank)
        );
        assert_eq!(r[2].impact_rank, 2);
    }

    #[test]
    fn nan_metric_is_missing() {
        assert!(matches!(
            impact_ranks(&[metric("a", f64::NAN, 3, 0.1)]),
            Err(AnalysisError::MissingMetric { metric: "rdi", .. })
        ));
    }

    #[test]
    fn empty_debt_set_gives_empty_options() {
        let r = build_report(&[], &[], &[]).unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.options.len(), 4);
        assert!(r.options.iter().all(|o| o.tables.is_empty() && o.total_cost == Cents(0)));
        assert_eq!(r.conventional.total_cost.to_string(), "0.00");
    }

    #[test]
    fn view_parsing() {
        assert_eq!("RDI".parse::<View>().unwrap(), View::Rdi);
        assert!("size".parse::<View>().is_err());
    }
}
