//! Configured experiments producing reproducible result tables.

pub mod audit;
pub mod config;
pub mod experiments;
pub mod regime;
pub mod results;

pub use audit::{report_to_csv, row_audit, run_audit, set_audit, AuditCertifier, AuditConfig};
pub use config::{ExperimentConfig, RegimeMode, ResolvedRow, RowSpec, SetSystemSpec, TesterSpec, TinySpec, EXPERIMENTS, LEARNERS};
pub use experiments::{
    estimate_error_rate, parse_tester_distribution, resolve_learner, ErrorRateRow, LearnerContext, RowDistribution,
};
pub use regime::{check_regime, regime_rows, RegimeReport, RegimeRow};
pub use results::{emit_results, from_csv, render, to_csv, Check, Format, ResultRow, ResultTable};

use crate::error::Result;

/// Validates `cfg` and runs the experiment it names.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    experiments::dispatch(cfg)
}
