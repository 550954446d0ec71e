//! Configuration, experiment registry and result emission for the
//! `lbm-magic` command.

pub mod config;
pub mod plot;
pub mod run;
pub mod table;

pub use config::{parse_config, parse_with_overrides, ConfigErrors, RunConfig};
pub use plot::{emit_plot_script, Figure};
pub use run::{run_experiment, Experiment, RunError};
pub use table::ResultTable;
