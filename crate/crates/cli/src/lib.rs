//! Configuration, persistence, verification suites and subcommands of the `krflow` binary.

pub mod commands;
pub mod config;
pub mod plot;
pub mod state_file;
pub mod trace_io;
pub mod verify;
