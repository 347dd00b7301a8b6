//! Reading and writing specifications, prover interchange and reports.

pub mod parse;
pub mod print;
pub mod prover;
pub mod report;
pub mod tpdb;

pub use parse::{parse_spec, parse_term};
pub use print::print_spec;
pub use prover::{invoke_external_prover, ProverAnswer, ProverConfig, ProverRun};
pub use report::AnalysisReport;
pub use tpdb::export_tpdb;
