//! Configuration, machine-readable reports, and the verification-suite
//! driver wiring every formula to its independent oracle.

pub mod config;
pub mod report;
pub mod verify;

pub use config::{Backend, ExperimentConfig, Rational64};
pub use report::{compare, Aggregate, CheckResult, RunReport};
pub use verify::{run_suite, Level};
