//! Batch front end for `maxcompact-core`.
//!
//! Subcommands: `periods`, `exp`, `log`, `betti`, `intersect`, `bound`,
//! `lemmas`, `torsion`. Each writes a JSON report (see [`report`]) to
//! standard output or `--out`, and a short summary to standard error. Exit
//! status is 0 on success, 1 on invalid input and 2 when a numerical method
//! fails to converge.

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod exec;
pub mod report;
pub mod text;

pub use app::run;
pub use error::CliError;
