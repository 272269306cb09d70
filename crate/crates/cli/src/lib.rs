//! Batch front end: problem files in, JSON reports out.

pub mod commands;
pub mod problem;
pub mod report;

pub use commands::{run, Overrides};
pub use problem::{parse_problem, Command, Problem};
pub use report::Report;
