//! Configuration, presets and file output for the `dsmimo` command line tool.

pub mod app;
pub mod config;
pub mod diag;
pub mod output;
pub mod presets;

pub use app::{exit_code, run_diag_command, run_experiment_command, run_figure_preset, Invocation};
pub use config::{parse_config, parse_config_str, to_toml};
pub use output::{emit_outputs, read_manifest_config, RunMeta};
pub use presets::{Preset, PresetPlan};
