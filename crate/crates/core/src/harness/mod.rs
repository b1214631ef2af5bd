//! Scenario orchestration, reports and the command-line interface.

pub mod cli;
pub mod report;
pub mod run;
pub mod scenario;

pub use cli::run_cli;
pub use report::{ConformanceReport, EvmSummary, Fidelity, RecoveryInfo};
pub use run::{
    analyze, apply_channel, build_report, execute, generate, run_scenario, Analysis, MeasureSet, ScenarioRun,
    Transmission,
};
pub use scenario::{Domain, Scenario, OUT_DIR_ENV};
