// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ProblemSpec, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "exitq",
    version,
    about = "Eigenvalue lower bounds from exit-time quantiles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate bounds for one problem.
    Run(Box<RunArgs>),
    /// List the built-in problems.
    Presets,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Preset name (interval01, ou-interval, disk-bm).
    #[arg(long)]
    pub problem: Option<String>,
    /// quantile, dv or oracle.
    #[arg(long)]
    pub method: Option<String>,
    /// Comma-separated tail probabilities.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Censoring horizon (default 50 / λ_DV).
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `auto` or comma-separated points, coordinates joined by `:`.
    #[arg(long, allow_hyphen_values = true)]
    pub starts: Option<String>,
    #[arg(long)]
    pub confidence: Option<f64>,
    /// table, csv or json.
    #[arg(long)]
    pub output: Option<String>,
    /// Mesh spacing of the mean-exit-time solve.
    #[arg(long)]
    pub h: Option<f64>,
    /// brownian-bridge or discrete.
    #[arg(long)]
    pub exit_check: Option<String>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Write raw exit times here.
    #[arg(long)]
    pub dump_samples: Option<PathBuf>,
    /// Write the effective configuration here as JSON.
    #[arg(long)]
    pub dump_config: Option<PathBuf>,
    /// Read a JSON configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl RunArgs {
    /// The configuration file (or defaults) with every given flag applied.
    pub fn to_config(&self) -> Result<RunConfig, CliError> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_json(&std::fs::read_to_string(path)?)?,
            None => RunConfig::default(),
        };
        if let Some(problem) = &self.problem {
            config.problem = ProblemSpec::Preset(problem.clone());
        }
        if let Some(method) = &self.method {
            config.method = method.parse()?;
        }
        if let Some(p) = &self.p {
            config.p_list = p
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::Config(format!("bad p value `{s}`: {e}")))
                })
                .collect::<Result<_, _>>()?;
        }
        if let Some(paths) = self.paths {
            config.sim.n_paths = paths;
        }
        if let Some(dt) = self.dt {
            config.sim.dt = dt;
        }
        if let Some(t_max) = self.tmax {
            config.sim.t_max = Some(t_max);
        }
        if let Some(seed) = self.seed {
            config.sim.seed = seed;
        }
        if let Some(starts) = &self.starts {
            config.starts = starts.parse()?;
        }
        if let Some(confidence) = self.confidence {
            config.confidence = confidence;
        }
        if let Some(output) = &self.output {
            config.output = output.parse()?;
        }
        if let Some(h) = self.h {
            config.h = h;
        }
        if let Some(check) = &self.exit_check {
            config.sim.exit_check = check.parse()?;
        }
        if let Some(workers) = self.workers {
            config.sim.workers = Some(workers);
        }
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Method, OutputFormat, Starts};

    fn parse(args: &[&str]) -> RunArgs {
        let mut full = vec!["exitq", "run"];
        full.extend_from_slice(args);
        match Cli::try_parse_from(full).unwrap().command {
            Command::Run(args) => *args,
            Command::Presets => unreachable!(),
        }
    }

    #[test]
    fn flags_override_defaults() {
        let config = parse(&[
            "--problem",
            "disk-bm",
            "--method",
            "oracle",
            "--p",
            "0.5,0.1",
            "--paths",
            "100",
            "--starts",
            "-0.1:0,0:0",
            "--output",
            "csv",
            "--workers",
            "2",
        ])
        .to_config()
        .unwrap();
        assert_eq!(config.problem, ProblemSpec::Preset("disk-bm".into()));
        assert_eq!(config.method, Method::Oracle);
        assert_eq!(config.p_list, vec![0.5, 0.1]);
        assert_eq!(config.sim.n_paths, 100);
        assert_eq!(config.output, OutputFormat::Csv);
        assert_eq!(config.sim.workers, Some(2));
        assert_eq!(
            config.starts,
            Starts::Points(vec![vec![-0.1, 0.0], vec![0.0, 0.0]])
        );
    }

    #[test]
    fn bad_flag_values_are_config_errors() {
        for args in [
            &["--method", "magic"][..],
            &["--p", "0.5,x"],
            &["--output", "xml"],
            &["--exit-check", "sometimes"],
        ] {
            let err = parse(args).to_config().unwrap_err();
            assert_eq!(err.exit_code(), 2, "{args:?}: {err}");
        }
    }
}
