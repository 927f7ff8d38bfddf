//! Command-line front end for `mqmeta`: configuration, input loading,
//! subcommands and report writing.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod generate;
pub mod report;
pub mod svg;
