//! Debt principal: refactoring task counts priced at a per-task labor rate.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{AnalysisError, Result};
use crate::nfclassifier::NormalFormAssessment;
use crate::snapshot::TableSnapshot;

/// Currency amount in integer cents.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cents(pub i64);

impl Cents {
    /// Rounds a decimal amount to cents, half away from zero.
    pub fn from_decimal(amount: f64) -> Cents {
        let scaled = amount * 100.0;
        // absorb binary representation error such as 642.2499999
        let nudged = scaled + scaled.signum() * 1e-7;
        Cents(nudged.round() as i64)
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl fmt::Display for Cents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        write!(f, "{sign}{}.{:02}", self.0.abs() / 100, self.0.abs() % 100)
    }
}

impl Serialize for Cents {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl std::str::FromStr for Cents {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (whole, frac) = body.split_once('.').unwrap_or((body, "0"));
        let frac = format!("{frac:0<2}");
        if frac.len() != 2 {
            return Err(format!("`{s}` is not a cent amount"));
        }
        let whole: i64 = whole.parse().map_err(|_| format!("`{s}` is not a cent amount"))?;
        let frac: i64 = frac.parse().map_err(|_| format!("`{s}` is not a cent amount"))?;
        let cents = whole * 100 + frac;
        Ok(Cents(if neg { -cents } else { cents }))
    }
}

impl<'de> Deserialize<'de> for Cents {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Add for Cents {
    type Output = Cents;
    fn add(self, rhs: Cents) -> Cents {
        Cents(self.0 + rhs.0)
    }
}

impl Mul<u64> for Cents {
    type Output = Cents;
    fn mul(self, rhs: u64) -> Cents {
        Cents(self.0 * rhs as i64)
    }
}

impl Sum for Cents {
    fn sum<I: Iterator<Item = Cents>>(iter: I) -> Cents {
        iter.fold(Cents(0), Add::add)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostParameters {
    pub hourly_wage: f64,
    pub minutes_per_task: f64,
    pub currency_code: String,
}

impl Default for CostParameters {
    fn default() -> Self {
        CostParameters {
            hourly_wage: 51.38,
            minutes_per_task: 7.5,
            currency_code: "USD".to_string(),
        }
    }
}

impl CostParameters {
    pub fn new(hourly_wage: f64, minutes_per_task: f64) -> Result<Self> {
        if !(hourly_wage > 0.0 && hourly_wage.is_finite()) {
            return Err(AnalysisError::InvalidParameter(format!("wage must be positive, got {hourly_wage}")));
        }
        if !(minutes_per_task > 0.0 && minutes_per_task.is_finite()) {
            return Err(AnalysisError::InvalidParameter(format!(
                "minutes per task must be positive, got {minutes_per_task}"
            )));
        }
        Ok(CostParameters {
            hourly_wage,
            minutes_per_task,
            ..Default::default()
        })
    }

    /// Wage × minutes / 60, rounded half-up to cents once.
    pub fn per_task_rate(&self) -> Cents {
        Cents::from_decimal(self.hourly_wage * self.minutes_per_task / 60.0)
    }
}

/// Refactoring task counts per category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskCategories {
    pub create_tables: u64,
    pub create_triggers: u64,
    pub drop_triggers: u64,
    pub sql_statement_updates: u64,
    pub data_migration: u64,
    pub app_metadata: u64,
    pub presentation_refactors: u64,
}

impl TaskCategories {
    pub fn total(&self) -> u64 {
        self.create_tables
            + self.create_triggers
            + self.drop_triggers
            + self.sql_statement_updates
            + self.data_migration
            + self.app_metadata
            + self.presentation_refactors
    }

    /// Rough default: one new table, trigger pair, migration and metadata
    /// update per planned decomposition.
    pub fn rough(decompositions: u64) -> Self {
        TaskCategories {
            create_tables: decompositions,
            create_triggers: decompositions,
            drop_triggers: decompositions,
            data_migration: decompositions,
            app_metadata: decompositions,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskSource {
    ManifestOverride,
    CategoryEstimate,
    RoughHeuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefactoringTaskPlan {
    pub table: String,
    pub categories: TaskCategories,
    pub total: u64,
    pub source: TaskSource,
    /// Zero tasks: the estimate carries no information.
    pub degenerate: bool,
}

pub const DEFAULT_DECOMPOSITIONS: u64 = 2;

/// Task plan for a debt table. A manifest task count wins over manifest or
/// caller category counts, which win over the rough heuristic.
pub fn estimate_tasks(
    table: &TableSnapshot,
    assessment: &NormalFormAssessment,
    category_inputs: Option<TaskCategories>,
    decompositions: u64,
) -> Result<RefactoringTaskPlan> {
    if !assessment.is_debt() {
        return Err(AnalysisError::NotADebtItem(table.name().to_string()));
    }
    let ov = table.overrides();
    let (categories, total, source) = if let Some(n) = ov.task_count {
        (ov.task_categories.unwrap_or_default(), n, TaskSource::ManifestOverride)
    } else if let Some(c) = ov.task_categories.or(category_inputs) {
        (c, c.total(), TaskSource::CategoryEstimate)
    } else {
        let c = TaskCategories::rough(decompositions);
        (c, c.total(), TaskSource::RoughHeuristic)
    };
    Ok(RefactoringTaskPlan {
        table: table.name().to_string(),
        categories,
        total,
        source,
        degenerate: total == 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalEstimate {
    pub table: String,
    pub task_count: u64,
    pub per_task_cost: Cents,
    pub total_cost: Cents,
}

pub fn principal_of(plan: &RefactoringTaskPlan, params: &CostParameters) -> PrincipalEstimate {
    let rate = params.per_task_rate();
    PrincipalEstimate {
        table: plan.table.clone(),
        task_count: plan.total,
        per_task_cost: rate,
        total_cost: rate * plan.total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keydisc::find_candidate_keys;
    use crate::nfclassifier::{classify, ClassifyOptions, NormalForm};
    use crate::snapshot::{Overrides, TableMetadata};

    fn plan(total: u64) -> RefactoringTaskPlan {
        RefactoringTaskPlan {
            table: "t".into(),
            categories: TaskCategories::default(),
            total,
            source: TaskSource::ManifestOverride,
            degenerate: total == 0,
        }
    }

    #[test]
    fn default_rate_is_six_forty_two() {
        assert_eq!(CostParameters::default().per_task_rate(), Cents(642));
    }

    #[test]
    fn principal_examples() {
        let p = CostParameters::default();
        assert_eq!(principal_of(&plan(50), &p).total_cost.to_string(), "321.00");
        assert_eq!(principal_of(&plan(0), &p).total_cost.to_string(), "0.00");
        assert_eq!(principal_of(&plan(8), &p).total_cost.to_string(), "51.36");
        assert_eq!(principal_of(&plan(12), &p).total_cost.to_string(), "77.04");
    }

    #[test]
    fn rounding_half_up() {
        assert_eq!(Cents::from_decimal(0.125), Cents(13));
        assert_eq!(Cents::from_decimal(6.4225), Cents(642));
        assert_eq!(Cents::from_decimal(1.005), Cents(101));
        assert_eq!(Cents(-150).to_string(), "-1.50");
        assert_eq!("-1.5".parse::<Cents>(), Ok(Cents(-150)));
        assert_eq!("321".parse::<Cents>(), Ok(Cents(32100)));
        assert!("1.234".parse::<Cents>().is_err());
    }

    #[test]
    fn invalid_parameters() {
        assert!(CostParameters::new(0.0, 7.5).is_err());
        assert!(CostParameters::new(51.38, -1.0).is_err());
        let mut p = CostParameters::new(51.38, 7.5).unwrap();
        p.currency_code = "EUR".into();
        assert_eq!(p.per_task_rate(), CostParameters::default().per_task_rate());
    }

    fn debt_table(overrides: Overrides) -> (TableSnapshot, NormalFormAssessment) {
        let meta = TableMetadata {
            overrides,
            ..Default::default()
        };
        let t = TableSnapshot::from_csv_text("Product", "id,color\n1,red;blue\n2,red\n", meta).unwrap();
        let a = classify(&t, &find_candidate_keys(&t, 3), &ClassifyOptions::default());
        assert_eq!(a.level, NormalForm::Unnormalized);
        (t, a)
    }

    #[test]
    fn task_estimates() {
        let (t, a) = debt_table(Overrides {
            task_count: Some(50),
            ..Default::default()
        });
        let p = estimate_tasks(&t, &a, None, 2).unwrap();
        assert_eq!((p.total, p.source), (50, TaskSource::ManifestOverride));

        let (t, a) = debt_table(Overrides::default());
        let p = estimate_tasks(&t, &a, Some(TaskCategories::default()), 2).unwrap();
        assert_eq!(p.total, 0);
        assert!(p.degenerate);

        let p = estimate_tasks(&t, &a, None, 2).unwrap();
        assert_eq!((p.total, p.source), (10, TaskSource::RoughHeuristic));
    }

    #[test]
    fn non_debt_table_is_rejected() {
        let t = TableSnapshot::from_text_rows("t", &["a"], &[&["1"], &["2"]]).unwrap();
        let a = classify(&t, &find_candidate_keys(&t, 3), &ClassifyOptions::default());
        assert!(matches!(estimate_tasks(&t, &a, None, 2), Err(AnalysisError::NotADebtItem(_))));
    }
}
