// SPDX-License-Identifier: Apache-2.0

//! Command-line front end for `exitq`.

pub mod args;
pub mod config;
pub mod error;
pub mod expr;
pub mod output;
pub mod run;

pub use config::{Method, OutputFormat, ProblemSpec, RunConfig, SimSettings, Starts};
pub use error::CliError;
pub use output::render;
pub use run::{run, RunBody, RunOutput};
