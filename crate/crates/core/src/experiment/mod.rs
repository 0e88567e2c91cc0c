//! Experiment harness: config loading, sweeps and result files.

pub mod config;
pub mod results;
pub mod sweep;

pub use config::{env_overrides, parse_config, parse_config_str, parse_config_with};
pub use results::{read_rows, read_structured, write_results, ResultFormat, RunSummary, RESULTS_HEADER};
pub use sweep::{mean_sd, run_sweep, Preset, SweepAxis, SweepRow, SweepSpec, SweepTable};
