//! Command-line front end: TOML problems in, JSON bundles and reports out.

pub mod dto;
pub mod error;
pub mod output;
pub mod report;
pub mod run;

pub use dto::{Mode, Problem, ProblemFile, ResultBundle, Status};
pub use error::CliError;
pub use run::{execute, exit_code, RunOptions};
