//! Configuration-driven command-line front end.
//!
//! One JSON scenario document feeds four commands: `simulate` (integrate,
//! write trajectory CSV and a report), `verify` (field identities at
//! seeded random states, no integration), `cone` (the predicted cone of
//! the initial state), and `compare` (integrated path against the
//! closed-form geodesic). Identical configs give byte-identical outputs.

pub mod config;
pub mod report;
mod run;

pub use config::{
    load_config, ConfigError, LoadedConfig, OutputConfig, RunConfig, Thresholds, VerifyConfig,
    XiInit,
};
pub use report::{Check, ConeReport, ErrorReport, OracleReport, RunReport};
pub use run::{
    run, Command, Invocation, COMPARE_POINTS, EXIT_CONFIG, EXIT_GUARD, EXIT_OK, EXIT_THRESHOLD,
};
