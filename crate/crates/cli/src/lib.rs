//! Command-line front end: class expressions, verification suites and reports.

pub mod expr;
pub mod suite;
