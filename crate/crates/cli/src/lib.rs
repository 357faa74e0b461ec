#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Experiment harness for `kappa-core`: configuration, the experiment
//! registry, result records and the acceptance suite.

pub mod config;
pub mod experiments;
pub mod fixtures;
pub mod record;
pub mod suite;

pub use config::{ExperimentConfig, Ratio};
pub use experiments::{execute, run, Context, REGISTRY};
pub use record::{Metric, ResultRecord, Series};
pub use suite::{run_suite, SuiteReport};
