//! Dependency mining: association rules for exploration plus exact
//! partition-based verification of functional and multivalued dependencies.

mod candidates;
mod fpgrowth;

pub use candidates::{candidate_violating_fds, is_superkey, CandidateDependency, NfStage};
pub use fpgrowth::{mine_rules, AssociationRule, Item};

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{AnalysisError, Result};
use crate::partition::{self, Grouping};
use crate::snapshot::{AttributeSet, TableSnapshot};

pub const DEFAULT_TAU: f64 = 1.0;
pub const DEFAULT_MAX_LHS: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalDependency {
    pub lhs: AttributeSet,
    pub rhs: AttributeSet,
    pub holds: bool,
    /// Minimum over lhs-groups of (largest rhs-equal subgroup / group size).
    pub min_confidence_observed: f64,
    /// Confidence threshold the verdict was taken at.
    pub threshold: f64,
    /// Two rows agreeing on lhs and differing on rhs, when any exist.
    pub witness: Option<(usize, usize)>,
}

impl FunctionalDependency {
    /// Holds only because the threshold is below 1.
    pub fn is_approximate(&self) -> bool {
        self.holds && self.min_confidence_observed < 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultivaluedDependency {
    pub lhs: AttributeSet,
    pub rhs: AttributeSet,
    pub complement: AttributeSet,
    pub holds: bool,
    /// Rows `(r, c)` whose rhs part of `r` combined with the complement part
    /// of `c` is missing from their shared lhs-group.
    pub witness: Option<(usize, usize)>,
}

fn check_attrs(table: &TableSnapshot, attrs: &AttributeSet) -> Result<()> {
    if attrs.is_empty() {
        return Err(AnalysisError::EmptyAttributeSet);
    }
    attrs.validate(table.column_count())
}

/// Verifies `lhs → rhs` exactly by partitioning rows on the lhs projection.
pub fn holds_fd(
    table: &TableSnapshot,
    lhs: &AttributeSet,
    rhs: &AttributeSet,
    tau: f64,
) -> Result<FunctionalDependency> {
    check_attrs(table, lhs)?;
    rhs.validate(table.column_count())?;
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(AnalysisError::InvalidParameter(format!("tau must be in (0, 1], got {tau}")));
    }
    let effective = rhs.difference(lhs);
    let mut fd = FunctionalDependency {
        lhs: lhs.clone(),
        rhs: rhs.clone(),
        holds: true,
        min_confidence_observed: 1.0,
        threshold: tau,
        witness: None,
    };
    if effective.is_empty() || table.row_count() == 0 {
        return Ok(fd);
    }

    let enc = table.encoded();
    let by_lhs = partition::group_by(table, lhs.indices());
    let by_both = effective
        .indices()
        .iter()
        .fold(by_lhs.clone(), |g, &c| g.refine(&enc.codes[c], enc.cardinality[c]));
    if by_both.groups == by_lhs.groups {
        return Ok(fd);
    }

    let group_size = by_lhs.sizes();
    let sub_size = by_both.sizes();
    let parent = partition::parent_of(&by_both, &by_lhs);
    let mut largest = vec![0usize; by_lhs.groups];
    for (sub, &size) in sub_size.iter().enumerate() {
        let g = parent[sub] as usize;
        largest[g] = largest[g].max(size);
    }
    fd.min_confidence_observed = largest
        .iter()
        .zip(&group_size)
        .map(|(&l, &s)| l as f64 / s as f64)
        .fold(1.0, f64::min);
    fd.holds = fd.min_confidence_observed >= tau;

    let mut first: Vec<Option<(usize, u32)>> = vec![None; by_lhs.groups];
    for (row, (&g, &sub)) in by_lhs.ids.iter().zip(&by_both.ids).enumerate() {
        match first[g as usize] {
            None => first[g as usize] = Some((row, sub)),
            Some((r0, s0)) if s0 != sub => {
                fd.witness = Some((r0, row));
                break;
            }
            Some(_) => {}
        }
    }
    Ok(fd)
}

/// Verifies `lhs →→ rhs`: within every lhs-group the distinct rows must be
/// exactly the product of the group's distinct rhs and complement parts.
pub fn holds_mvd(table: &TableSnapshot, lhs: &AttributeSet, rhs: &AttributeSet) -> Result<MultivaluedDependency> {
    check_attrs(table, lhs)?;
    check_attrs(table, rhs)?;
    if !lhs.is_disjoint(rhs) {
        return Err(AnalysisError::InvalidDependency(
            "lhs and rhs of a multivalued dependency must be disjoint".to_string(),
        ));
    }
    let complement = AttributeSet::all(table.column_count()).difference(&lhs.union(rhs));
    let mut mvd = MultivaluedDependency {
        lhs: lhs.clone(),
        rhs: rhs.clone(),
        complement: complement.clone(),
        holds: true,
        witness: None,
    };
    if complement.is_empty() || table.row_count() == 0 {
        return Ok(mvd);
    }

    let enc = table.encoded();
    let refine_by = |base: &Grouping, attrs: &AttributeSet| {
        attrs
            .indices()
            .iter()
            .fold(base.clone(), |g, &c| g.refine(&enc.codes[c], enc.cardinality[c]))
    };
    let by_lhs = partition::group_by(table, lhs.indices());
    let by_rhs = refine_by(&by_lhs, rhs);
    let by_comp = refine_by(&by_lhs, &complement);
    let by_row = refine_by(&by_rhs, &complement);

    let count_per_group = |fine: &Grouping| {
        let mut counts = vec![0usize; by_lhs.groups];
        for p in partition::parent_of(fine, &by_lhs) {
            counts[p as usize] += 1;
        }
        counts
    };
    let ys = count_per_group(&by_rhs);
    let zs = count_per_group(&by_comp);
    let distinct_rows = count_per_group(&by_row);

    // Distinct rows of a group always lie inside Y x Z, so equal cardinality
    // means equality.
    let failing = (0..by_lhs.groups).find(|&g| distinct_rows[g] != ys[g] * zs[g]);
    if let Some(g) = failing {
        mvd.holds = false;
        let g = g as u32;
        let mut y_reps: Vec<(u32, usize)> = Vec::new();
        let mut z_reps: Vec<(u32, usize)> = Vec::new();
        let mut present: HashSet<(u32, u32)> = HashSet::new();
        for row in 0..table.row_count() {
            if by_lhs.ids[row] != g {
                continue;
            }
            let (y, z) = (by_rhs.ids[row], by_comp.ids[row]);
            if !y_reps.iter().any(|&(id, _)| id == y) {
                y_reps.push((y, row));
            }
            if !z_reps.iter().any(|&(id, _)| id == z) {
                z_reps.push((z, row));
            }
            present.insert((y, z));
        }
        mvd.witness = y_reps
            .iter()
            .flat_map(|&(y, ry)| z_reps.iter().map(move |&(z, rz)| (y, ry, z, rz)))
            .find(|&(y, _, z, _)| !present.contains(&(y, z)))
            .map(|(_, ry, _, rz)| (ry, rz));
    }
    Ok(mvd)
}
