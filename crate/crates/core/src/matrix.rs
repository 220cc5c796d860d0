//! Decision-matrix scatter plots rendered directly as SVG.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::{AnalysisError, Result};
use crate::prioritizer::{Decision, RankRecord, View};

const SIZE: f64 = 520.0;
const MARGIN: f64 = 70.0;
const POINT_RADIUS: f64 = 6.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn class_of(d: Decision) -> &'static str {
    match d {
        Decision::Normalize => "normalize",
        Decision::Balanced => "balanced",
        Decision::Defer => "defer",
    }
}

/// Scatter of cost rank (x) against the view's impact rank (y) with the y = x
/// diagonal. Identical records always produce identical bytes.
pub fn emit_matrix_svg(view: View, records: &[RankRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let mut records: Vec<&RankRecord> = records.iter().collect();
    records.sort_by(|a, b| a.table.cmp(&b.table));
    let max_rank = records
        .iter()
        .map(|r| r.cost_rank.max(r.criterion_rank(view)))
        .max()
        .unwrap_or(1)
        .max(2);
    let plot = SIZE - 2.0 * MARGIN;
    let x_of = |rank: usize| MARGIN + (rank as f64 - 1.0) / (max_rank as f64 - 1.0) * plot;
    let y_of = |rank: usize| SIZE - MARGIN - (rank as f64 - 1.0) / (max_rank as f64 - 1.0) * plot;
    let (x0, y0, x1, y1) = (x_of(1), y_of(1), x_of(max_rank), y_of(max_rank));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    svg.push_str(
        "<style>.normalize{fill:#c0392b}.balanced{fill:#7f8c8d}.defer{fill:#2471a3}.axis{stroke:#333;fill:none}.grid{stroke:#ddd}.diagonal{stroke:#999;stroke-dasharray:6 4}</style>\n",
    );
    let _ = writeln!(svg, r##"<rect width="{SIZE}" height="{SIZE}" fill="#fff"/>"##);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="30" text-anchor="middle" font-size="15">Decision matrix: cost vs {}</text>"#,
        SIZE / 2.0,
        view.title()
    );

    for r in 1..=max_rank {
        let (x, y) = (x_of(r), y_of(r));
        let _ = writeln!(svg, r#"<path class="grid" d="M{x:.1} {y0:.1}V{y1:.1}M{x0:.1} {y:.1}H{x1:.1}"/>"#);
        let _ = writeln!(svg, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{r}</text>"#, y0 + 18.0);
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{r}</text>"#, x0 - 10.0, y + 4.0);
    }
    let _ = writeln!(svg, r#"<path class="axis" d="M{x0:.1} {y1:.1}V{y0:.1}H{x1:.1}"/>"#);
    let _ = writeln!(svg, r#"<line class="diagonal" x1="{x0:.1}" y1="{y0:.1}" x2="{x1:.1}" y2="{y1:.1}"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">cost rank</text>"#,
        SIZE / 2.0,
        SIZE - MARGIN + 45.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">impact rank</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );

    // points sharing a cell get stacked labels
    let mut stack: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for rec in records {
        let (cx, cy) = (rec.cost_rank, rec.criterion_rank(view));
        let slot = stack.entry((cx, cy)).or_insert(0);
        let (px, py) = (x_of(cx), y_of(cy));
        let decision = rec.decision(view);
        let name = escape(&rec.table);
        let _ = writeln!(
            svg,
            r#"<circle class="{}" cx="{px:.1}" cy="{py:.1}" r="{POINT_RADIUS}"><title>{name}: cost rank {cx}, impact rank {cy}, {decision}</title></circle>"#,
            class_of(decision)
        );
        let _ = writeln!(
            svg,
            r#"<text class="label" x="{:.1}" y="{:.1}">{name}</text>"#,
            px + POINT_RADIUS + 3.0,
            py - 4.0 - 14.0 * *slot as f64
        );
        *slot += 1;
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
