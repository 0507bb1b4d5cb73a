//! Command-line front end: tables of `phi`, `M` and the density of the supremum, the
//! verification suites and Monte Carlo batches.

pub mod args;
pub mod output;
pub mod run;
pub mod suites;

pub use args::{parse_alpha, parse_grid, Cli, Command, Grid, GridScale};
pub use output::{Format, Table};
pub use run::{run, ConfigError};
