//! Configuration, orchestration and file formats for the `cnsm` command-line tool.

pub mod config;
pub mod error;
pub mod run;
pub mod snapshot;

pub use config::RunConfig;
pub use error::{exit_code_for, CliError, CliResult, EXIT_CODES};
pub use run::{run, Command, Verdict};
pub use snapshot::Snapshot;
