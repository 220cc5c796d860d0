//! Browser demo bindings. Every operation takes and returns plain strings
//! (CSV in, JSON or SVG out) so the same functions run natively in tests.

use normdebt_core::debtmetrics::QualityMetrics;
use normdebt_core::depminer::holds_fd;
use normdebt_core::matrix::emit_matrix_svg;
use normdebt_core::nfclassifier::{NormalForm, NormalFormAssessment};
use normdebt_core::pipeline::{analyze_table, AnalysisConfig};
use normdebt_core::principal::{principal_of, CostParameters, RefactoringTaskPlan, TaskCategories, TaskSource};
use normdebt_core::prioritizer::{build_report, View};
use normdebt_core::snapshot::{TableMetadata, TableSnapshot};
use normdebt_core::synth::{planted, Planted};
use normdebt_core::keydisc::CandidateKeySet;
use serde::Deserialize;
use serde_json::json;

fn parse(csv: &str) -> Result<TableSnapshot, String> {
    TableSnapshot::from_csv_text("input", csv, TableMetadata::default()).map_err(|e| e.to_string())
}

fn columns(table: &TableSnapshot, list: &str) -> Result<normdebt_core::snapshot::AttributeSet, String> {
    let names: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    table.attrs(&names).map_err(|e| e.to_string())
}

/// Keys, normal form and interest metrics of one CSV table, as JSON.
pub fn classify_csv(csv: &str, tau: f64, max_key_arity: usize) -> Result<String, String> {
    let table = parse(csv)?;
    let config = AnalysisConfig {
        tau,
        max_key_arity,
        ..AnalysisConfig::default()
    };
    config.validate().map_err(|e| e.to_string())?;
    let a = analyze_table(&table, &config).map_err(|e| e.to_string())?;
    let violation = a.assessment.violation.as_ref().map(|v| {
        json!({
            "stage": v.stage.label(),
            "lhs": v.lhs,
            "rhs": v.rhs,
            "description": v.description,
        })
    });
    let out = json!({
        "rows": table.row_count(),
        "columns": table.column_count(),
        "keys": a.keys.keys.iter().map(|k| table.name_list(k)).collect::<Vec<_>>(),
        "level": a.assessment.level.label(),
        "violation": violation,
        "approximate": a.assessment.approximate,
        "insufficient_data": a.assessment.insufficient_data,
        "rdi": a.metrics.as_ref().map(|m| m.rdi),
        "weight": a.metrics.as_ref().map(|m| m.complexity_weight),
        "tasks": a.plan.as_ref().map(|p| p.total),
        "principal": a.principal.as_ref().map(|p| p.total_cost.to_string()),
    });
    Ok(out.to_string())
}

/// Verdict of `lhs → rhs` on a CSV table; column lists are comma-separated.
pub fn check_fd(csv: &str, lhs: &str, rhs: &str, tau: f64) -> Result<String, String> {
    let table = parse(csv)?;
    let (l, r) = (columns(&table, lhs)?, columns(&table, rhs)?);
    let fd = holds_fd(&table, &l, &r, tau).map_err(|e| e.to_string())?;
    Ok(json!({
        "holds": fd.holds,
        "approximate": fd.is_approximate(),
        "confidence": fd.min_confidence_observed,
        "witness": fd.witness.map(|(a, b)| [a, b]),
    })
    .to_string())
}

#[derive(Debug, Deserialize)]
struct MetricRow {
    table: String,
    rdi: f64,
    weight: u64,
    size_mb: f64,
    tasks: u64,
}

/// Ranks, decisions, options and a decision-matrix SVG from hand-edited
/// per-table metrics (a JSON array of `{table, rdi, weight, size_mb, tasks}`).
pub fn prioritize(rows_json: &str, wage: f64, minutes_per_task: f64, view: &str) -> Result<String, String> {
    let rows: Vec<MetricRow> = serde_json::from_str(rows_json).map_err(|e| e.to_string())?;
    let params = CostParameters::new(wage, minutes_per_task).map_err(|e| e.to_string())?;
    let view = View::ALL
        .into_iter()
        .find(|v| v.slug() == view)
        .ok_or_else(|| format!("unknown view {view:?}"))?;

    let mut assessments = Vec::new();
    let mut metrics = Vec::new();
    let mut principals = Vec::new();
    for r in &rows {
        assessments.push(NormalFormAssessment {
            table: r.table.clone(),
            level: NormalForm::First,
            violation: None,
            keys_used: CandidateKeySet {
                table: r.table.clone(),
                keys: Vec::new(),
                max_arity_searched: 0,
            },
            approximate: false,
            insufficient_data: false,
            warnings: Vec::new(),
        });
        metrics.push(QualityMetrics {
            table: r.table.clone(),
            rdi: r.rdi,
            rdi_duplicates: None,
            rdi_cells: None,
            rdi_k_max: 0,
            rdi_exact: false,
            complexity_weight: r.weight,
            size_mb: r.size_mb,
            overridden: vec!["rdi".into(), "weight".into(), "size_mb".into()],
        });
        let plan = RefactoringTaskPlan {
            table: r.table.clone(),
            categories: TaskCategories::default(),
            total: r.tasks,
            source: TaskSource::ManifestOverride,
            degenerate: r.tasks == 0,
        };
        principals.push(principal_of(&plan, &params));
    }
    let report = build_report(&assessments, &metrics, &principals).map_err(|e| e.to_string())?;
    let records: Vec<_> = report.records().cloned().collect();
    let svg = emit_matrix_svg(view, &records).map_err(|e| e.to_string())?;
    Ok(json!({
        "rate": params.per_task_rate().to_string(),
        "rows": report.rows.iter().map(|r| json!({
            "table": r.ranks.table,
            "principal": r.principal.to_string(),
            "cost_rank": r.ranks.cost_rank,
            "criterion_rank": r.ranks.criterion_rank(view),
            "decision": r.ranks.decision(view).label(),
        })).collect::<Vec<_>>(),
        "option": {
            "tables": report.option(view).tables,
            "total": report.option(view).total_cost.to_string(),
        },
        "conventional": report.conventional.total_cost.to_string(),
        "svg": svg,
    })
    .to_string())
}

/// CSV text of a generated table with one planted defect.
pub fn planted_csv(kind: &str, seed: u64) -> Result<String, String> {
    let kind = Planted::ALL
        .into_iter()
        .find(|k| k.slug() == kind)
        .ok_or_else(|| format!("unknown defect {kind:?}"))?;
    Ok(planted(kind, seed, 1).to_csv())
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    fn js(r: Result<String, String>) -> Result<String, JsError> {
        r.map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = classifyCsv)]
    pub fn classify_csv(csv: &str, tau: f64, max_key_arity: usize) -> Result<String, JsError> {
        js(super::classify_csv(csv, tau, max_key_arity))
    }

    #[wasm_bindgen(js_name = checkFd)]
    pub fn check_fd(csv: &str, lhs: &str, rhs: &str, tau: f64) -> Result<String, JsError> {
        js(super::check_fd(csv, lhs, rhs, tau))
    }

    #[wasm_bindgen]
    pub fn prioritize(rows_json: &str, wage: f64, minutes_per_task: f64, view: &str) -> Result<String, JsError> {
        js(super::prioritize(rows_json, wage, minutes_per_task, view))
    }

    #[wasm_bindgen(js_name = plantedCsv)]
    pub fn planted_csv(kind: &str, seed: u32) -> Result<String, JsError> {
        js(super::planted_csv(kind, seed as u64))
    }
}
