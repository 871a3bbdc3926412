//! Parsing and commands behind the `thinlab` binary.

pub mod commands;
pub mod dsl;
