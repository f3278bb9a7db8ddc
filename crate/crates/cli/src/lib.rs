//! Certificates, fixtures and subcommands behind the `mixedqec` binary.

pub mod certificate;
pub mod commands;
pub mod fixtures;

pub use certificate::{verify, Certificate, Outcome, VerifyOptions};
