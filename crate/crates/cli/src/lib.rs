//! Front end for sm-core: argument parsing, the result cache and JSON reports.

pub mod args;
pub mod cache;
pub mod commands;
