//! Configuration, experiment orchestration, CSV and SVG output for the
//! `accelvi` command line tool.

// `!(x > y)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod plot;

pub use config::{parse_config, serialize, ExperimentConfig};
pub use error::{ConfigError, ConfigErrors, HarnessError, Result};
pub use experiment::{run_experiment, MethodRun, RunRecord};
pub use output::write_csv;
pub use plot::{render_plot, PlotKind};

/// Overrides `output_dir` from the configuration when set.
pub const OUTPUT_DIR_ENV: &str = "ACCELVI_OUTPUT_DIR";
