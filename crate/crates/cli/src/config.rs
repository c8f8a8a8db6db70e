// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use exitq::estimator::DEFAULT_CONFIDENCE;
use exitq::model::{constant, Domain};
use exitq::{EllipticProblem, ExitCheck, Preset};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::expr::parse_expression;

/// A named preset or an inline 1-D problem given by coefficient expressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemSpec {
    Preset(String),
    Inline {
        #[serde(default = "default_inline_id")]
        id: String,
        lower: f64,
        upper: f64,
        /// Diffusion coefficient `a(x)`; defaults to `1`.
        #[serde(default)]
        a: Option<String>,
        /// Potential `V(x)`; defaults to `0`.
        #[serde(default)]
        potential: Option<String>,
    },
}

fn default_inline_id() -> String {
    "custom".to_string()
}

/// A resolved problem.
#[derive(Debug, Clone)]
pub struct ResolvedProblem {
    pub problem: EllipticProblem,
    pub preset: Option<Preset>,
}

impl ProblemSpec {
    pub fn resolve(&self) -> Result<ResolvedProblem, CliError> {
        match self {
            ProblemSpec::Preset(name) => {
                let preset: Preset = name.parse()?;
                Ok(ResolvedProblem {
                    problem: preset.problem(),
                    preset: Some(preset),
                })
            }
            ProblemSpec::Inline {
                id,
                lower,
                upper,
                a,
                potential,
            } => {
                let domain = Domain::interval(*lower, *upper)?;
                let a = match a {
                    Some(text) => parse_expression(text)?,
                    None => constant(1.0),
                };
                let potential = match potential {
                    Some(text) => parse_expression(text)?,
                    None => constant(0.0),
                };
                Ok(ResolvedProblem {
                    problem: EllipticProblem::new(id.clone(), domain, a, potential)?,
                    preset: None,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Quantile,
    Dv,
    Oracle,
}

impl FromStr for Method {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "quantile" => Ok(Method::Quantile),
            "dv" => Ok(Method::Dv),
            "oracle" => Ok(Method::Oracle),
            other => Err(CliError::Config(format!(
                "unknown method `{other}` (expected quantile, dv or oracle)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "table" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::Config(format!(
                "unknown output format `{other}` (expected table, csv or json)"
            ))),
        }
    }
}

/// `auto` or an explicit list of start points.
#[derive(Debug, Clone, PartialEq)]
pub enum Starts {
    Auto,
    Points(Vec<Vec<f64>>),
}

impl Serialize for Starts {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Starts::Auto => serializer.serialize_str("auto"),
            Starts::Points(points) => points.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for Starts {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            Points(Vec<Vec<f64>>),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Word(w) if w == "auto" => Ok(Starts::Auto),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "expected `auto` or a list of points, got `{w}`"
            ))),
            Raw::Points(points) => Ok(Starts::Points(points)),
        }
    }
}

impl FromStr for Starts {
    type Err = CliError;

    /// `auto`, or comma-separated points whose coordinates are joined by `:`
    /// (`0.25,0.5` in 1-D, `0:0,0.5:0` in 2-D).
    fn from_str(s: &str) -> Result<Self, CliError> {
        if s.trim() == "auto" {
            return Ok(Starts::Auto);
        }
        let points = s
            .split(',')
            .map(|point| {
                point
                    .split(':')
                    .map(|c| {
                        c.trim().parse::<f64>().map_err(|e| {
                            CliError::Config(format!("bad start coordinate `{c}`: {e}"))
                        })
                    })
                    .collect::<Result<Vec<f64>, CliError>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Starts::Points(points))
    }
}

impl fmt::Display for Starts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Starts::Auto => f.write_str("auto"),
            Starts::Points(points) => {
                let joined: Vec<String> = points
                    .iter()
                    .map(|p| {
                        p.iter()
                            .map(|c| c.to_string())
                            .collect::<Vec<_>>()
                            .join(":")
                    })
                    .collect();
                f.write_str(&joined.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimSettings {
    pub dt: f64,
    /// Censoring horizon; `None` selects `50 / λ_DV`.
    pub t_max: Option<f64>,
    pub n_paths: usize,
    pub seed: u64,
    pub exit_check: ExitCheck,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            t_max: None,
            n_paths: 10_000,
            seed: 1,
            exit_check: ExitCheck::default(),
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub method: Method,
    pub p_list: Vec<f64>,
    pub starts: Starts,
    pub sim: SimSettings,
    /// Mesh spacing of the mean-exit-time solve.
    pub h: f64,
    pub output: OutputFormat,
    pub confidence: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec::Preset(Preset::Interval01.name().to_string()),
            method: Method::Quantile,
            p_list: vec![0.5, 0.25, 0.1, 0.01],
            starts: Starts::Auto,
            sim: SimSettings::default(),
            h: 1e-4,
            output: OutputFormat::Table,
            confidence: DEFAULT_CONFIDENCE,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if matches!(self.method, Method::Quantile | Method::Oracle) && self.p_list.is_empty() {
            return Err(CliError::Config("p list must not be empty".into()));
        }
        if let Some(p) = self.p_list.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(CliError::Config(format!("p = {p} is not in (0, 1)")));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(CliError::Config(format!(
                "confidence {} is not in (0, 1)",
                self.confidence
            )));
        }
        if self.sim.workers == Some(0) {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        Ok(())
    }
}
