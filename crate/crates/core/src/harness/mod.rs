//! Benchmark harness: run configurations, suites and table output.

mod config;
mod emit;
mod run;

pub use config::{AlgorithmKind, DomainKind, Format, RunConfig};
pub use emit::{emit_rows, records_json, to_csv, to_markdown, CSV_HEADER};
pub use run::{
    aggregate, median, run_single, run_suite, run_trials, ResultRecord, Row, Suite, TABLE2_KIN_T_DRAWS,
    TABLE2_KIN_U_DRAWS,
};
