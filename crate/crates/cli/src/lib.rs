//! Command-line driver for `hopfctl-core`: run configurations and artifact
//! files.

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, ConfigError, RunConfig};
pub use run::{resolve_out_dir, run, RunReport};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "HOPFCTL_OUT_DIR";
