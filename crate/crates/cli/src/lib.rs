//! Backing library of the `haarshift` command-line tool.

pub mod commands;
pub mod report;
pub mod sweep;
pub mod verify;

pub use report::{fit_slopes, parse_csv, render_csv, SlopeFit, SweepRow};
