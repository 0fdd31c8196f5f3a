//! Command-line front end of `wingmass`: configuration, output bookkeeping
//! and the subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
