//! CSV and JSON renderings of stage results. Output depends only on the
//! input values, never on iteration order of hashed containers.

use crate::debtmetrics::QualityMetrics;
use crate::depminer::AssociationRule;
use crate::keydisc::CandidateKeySet;
use crate::nfclassifier::NormalFormAssessment;
use crate::pipeline::AnalysisReport;
use crate::principal::PrincipalEstimate;
use crate::prioritizer::{PriorityReport, View};
use crate::snapshot::{DatabaseSnapshot, TableSnapshot};

fn to_csv<R: AsRef<[u8]>>(comment: Option<&str>, header: &[&str], rows: impl IntoIterator<Item = Vec<R>>) -> String {
    let mut out = Vec::new();
    if let Some(c) = comment {
        out.extend_from_slice(format!("# {c}\n").as_bytes());
    }
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut out);
        w.write_record(header).expect("in-memory write");
        for row in rows {
            w.write_record(&row).expect("in-memory write");
        }
        w.flush().expect("in-memory write");
    }
    String::from_utf8(out).expect("fields are UTF-8")
}

fn flag(b: bool) -> String {
    b.to_string()
}

/// One line per candidate key, columns joined by `+`.
pub fn keys_csv(snapshot: &DatabaseSnapshot, keys: &[CandidateKeySet], comment: Option<&str>) -> String {
    let rows = keys.iter().flat_map(|ks| {
        let table = snapshot.table(&ks.table);
        ks.keys.iter().map(move |k| {
            let names = match table {
                Some(t) => t.name_list(k).join("+"),
                None => format!("{:?}", k.indices()),
            };
            vec![ks.table.clone(), names, k.len().to_string()]
        })
    });
    to_csv(comment, &["table", "key", "arity"], rows)
}

pub fn assessments_csv(assessments: &[NormalFormAssessment], comment: Option<&str>) -> String {
    let rows = assessments.iter().map(|a| {
        let v = a.violation.as_ref();
        vec![
            a.table.clone(),
            a.level.label().to_string(),
            v.map(|v| v.stage.label().to_string()).unwrap_or_default(),
            v.map(|v| v.lhs.join("+")).unwrap_or_default(),
            v.map(|v| v.rhs.join("+")).unwrap_or_default(),
            v.map(|v| v.description.clone()).unwrap_or_default(),
            flag(a.approximate),
            flag(a.insufficient_data),
        ]
    });
    to_csv(
        comment,
        &[
            "table",
            "normal_form",
            "violated_stage",
            "lhs",
            "rhs",
            "violation",
            "approximate",
            "insufficient_data",
        ],
        rows,
    )
}

pub fn metrics_csv(metrics: &[QualityMetrics], comment: Option<&str>) -> String {
    let rows = metrics.iter().map(|m| {
        vec![
            m.table.clone(),
            format!("{:.6}", m.rdi),
            flag(m.rdi_exact),
            m.rdi_k_max.to_string(),
            m.complexity_weight.to_string(),
            format!("{:.3}", m.size_mb),
            m.overridden.join("+"),
        ]
    });
    to_csv(
        comment,
        &["table", "rdi", "rdi_exact", "rdi_k_max", "weight", "size_mb", "overridden"],
        rows,
    )
}

pub fn principal_csv(principals: &[PrincipalEstimate], comment: Option<&str>) -> String {
    let rows = principals.iter().map(|p| {
        vec![
            p.table.clone(),
            p.task_count.to_string(),
            p.per_task_cost.to_string(),
            p.total_cost.to_string(),
        ]
    });
    to_csv(comment, &["table", "task_count", "per_task_usd", "principal_usd"], rows)
}

pub fn rules_csv(table: &TableSnapshot, rules: &[AssociationRule], comment: Option<&str>) -> String {
    let rows = rules.iter().map(|r| {
        let (a, c) = r.render(table);
        vec![
            a,
            c,
            format!("{:.6}", r.support),
            format!("{:.6}", r.confidence),
            r.itemset_count.to_string(),
            r.antecedent_count.to_string(),
        ]
    });
    to_csv(
        comment,
        &["antecedent", "consequent", "support", "confidence", "itemset_count", "antecedent_count"],
        rows,
    )
}

pub const REPORT_COLUMNS: [&str; 17] = [
    "table",
    "normal_form",
    "rdi",
    "weight",
    "size_mb",
    "task_count",
    "principal_usd",
    "cost_rank",
    "rdi_rank",
    "tc_rank",
    "tz_rank",
    "impact_sum",
    "impact_rank",
    "decision_aggregate",
    "decision_rdi",
    "decision_tc",
    "decision_tz",
];

/// The prioritization table, one row per debt table in name order.
pub fn report_csv(report: &PriorityReport, comment: Option<&str>) -> String {
    let rows = report.rows.iter().map(|r| {
        let mut row = vec![
            r.ranks.table.clone(),
            r.normal_form.label().to_string(),
            format!("{:.6}", r.rdi),
            r.weight.to_string(),
            format!("{:.3}", r.size_mb),
            r.task_count.to_string(),
            r.principal.to_string(),
            r.ranks.cost_rank.to_string(),
            r.ranks.rdi_rank.to_string(),
            r.ranks.tc_rank.to_string(),
            r.ranks.tz_rank.to_string(),
            r.ranks.impact_sum.to_string(),
            r.ranks.impact_rank.to_string(),
        ];
        row.extend(View::ALL.iter().map(|v| r.decisions[v].label().to_string()));
        row
    });
    to_csv(comment, &REPORT_COLUMNS, rows)
}

/// Normalization options followed by the conventional all-tables option.
pub fn options_csv(report: &PriorityReport, comment: Option<&str>) -> String {
    let mut rows: Vec<Vec<String>> = report
        .options
        .iter()
        .map(|o| vec![o.label.clone(), o.view.slug().to_string(), o.tables.join("+"), o.total_cost.to_string()])
        .collect();
    rows.push(vec![
        "Conventional".to_string(),
        "all".to_string(),
        report.conventional.tables.join("+"),
        report.conventional.total_cost.to_string(),
    ]);
    to_csv(comment, &["option", "view", "tables", "total_usd"], rows)
}

pub fn report_json(report: &AnalysisReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report is serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::principal::Cents;

    #[test]
    fn csv_quotes_and_comment_line() {
        let s = to_csv(Some("tau=1"), &["a", "b"], [vec!["x,y".to_string(), "z".to_string()]]);
        assert_eq!(s, "# tau=1\na,b\n\"x,y\",z\n");
    }

    #[test]
    fn principal_rows_use_cents() {
        let p = PrincipalEstimate {
            table: "WorkOrder".into(),
            task_count: 8,
            per_task_cost: Cents(642),
            total_cost: Cents(5136),
        };
        assert_eq!(
            principal_csv(&[p], None),
            "table,task_count,per_task_usd,principal_usd\nWorkOrder,8,6.42,51.36\n"
        );
    }
}
