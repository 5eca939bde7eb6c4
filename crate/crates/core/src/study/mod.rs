//! Configuration-driven Monte Carlo study of the estimators and intervals.

pub mod config;
pub mod report;
pub mod run;

pub use config::{validate_config, StudyConfig};
pub use report::{
    interval_table_csv, known_mu_table_csv, point_table_csv, summarize_orderings, Accumulator, Finding,
    FindingStatus, StudyReport, Table,
};
pub use run::{run_interval_study, run_point_study, run_study, run_study_range, StudyKind};
