//! Identification and management of database normalization debt.
//!
//! Tables are loaded into an immutable [`snapshot::DatabaseSnapshot`], their
//! candidate keys and dependencies are mined to classify the current normal
//! form, and every table below fourth normal form is priced (principal) and
//! measured (interest) so the debt can be prioritized.

mod csvtext;
mod partition;

pub mod debtmetrics;
pub mod depminer;
pub mod error;
pub mod export;
pub mod keydisc;
pub mod matrix;
pub mod nfclassifier;
pub mod pipeline;
pub mod principal;
pub mod prioritizer;
pub mod snapshot;
pub mod synth;

pub use error::{AnalysisError, Error, SnapshotError};
