// SPDX-License-Identifier: Apache-2.0

//! Euler–Maruyama simulation of first exit times.
//!
//! Every path owns an independent random stream keyed by
//! `(master_seed, path_index)`: a ChaCha8 generator seeded from the master
//! seed with its stream id set to the path index. Gaussian draws use the
//! ziggurat sampler of `rand_distr::StandardNormal`. A batch is therefore a
//! pure function of its configuration, whatever the number of workers.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Domain, DriftDiffusionField, MAX_DIM};

/// Above this exponent the bridge crossing probability is below 1e-15 and no
/// uniform is drawn.
const BRIDGE_EXPONENT_CUTOFF: f64 = 35.0;

/// How an exit between two grid times is detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExitCheck {
    /// Exit only when a grid point `X_k` lies outside Ω.
    Discrete,
    /// Also exit with the Brownian-bridge crossing probability
    /// `exp(-2 d_k d_{k+1} / (σ² dt))` between two interior grid points, where
    /// `d` is the distance to the boundary. Falls back to [`ExitCheck::Discrete`]
    /// on domains without a distance function.
    #[default]
    BrownianBridge,
}

impl fmt::Display for ExitCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExitCheck::Discrete => "discrete",
            ExitCheck::BrownianBridge => "brownian-bridge",
        })
    }
}

impl FromStr for ExitCheck {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete" => Ok(ExitCheck::Discrete),
            "brownian-bridge" | "bridge" => Ok(ExitCheck::BrownianBridge),
            other => Err(Error::Configuration(format!(
                "unknown exit check `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    /// Censoring horizon.
    pub t_max: f64,
    pub n_paths: usize,
    pub master_seed: u64,
    pub start: Vec<f64>,
    #[serde(default)]
    pub exit_check: ExitCheck,
}

impl SimConfig {
    pub fn new(dt: f64, t_max: f64, n_paths: usize, master_seed: u64, start: Vec<f64>) -> Self {
        Self {
            dt,
            t_max,
            n_paths,
            master_seed,
            start,
            exit_check: ExitCheck::default(),
        }
    }

    pub fn with_exit_check(mut self, exit_check: ExitCheck) -> Self {
        self.exit_check = exit_check;
        self
    }

    /// Number of steps to reach the censoring horizon.
    pub fn max_steps(&self) -> u64 {
        (self.t_max / self.dt).round() as u64
    }

    pub fn validate(&self, domain: &Domain) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Configuration(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_max.is_finite() && self.t_max >= self.dt) {
            return Err(Error::Configuration(format!(
                "t_max must satisfy dt <= t_max, got dt = {}, t_max = {}",
                self.dt, self.t_max
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::Configuration("n_paths must be at least 1".into()));
        }
        if self.start.len() != domain.dimension() {
            return Err(Error::Configuration(format!(
                "start point {:?} has dimension {}, domain has dimension {}",
                self.start,
                self.start.len(),
                domain.dimension()
            )));
        }
        if !domain.contains(&self.start) {
            return Err(Error::Configuration(format!(
                "start point {:?} is not inside the domain",
                self.start
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitRecord {
    /// `None` when the path was still inside at `t_max` (censored).
    pub exit_time: Option<f64>,
    pub steps: u64,
    pub path_index: u64,
}

impl ExitRecord {
    pub fn is_censored(&self) -> bool {
        self.exit_time.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitTimeSample {
    pub problem: String,
    pub config: SimConfig,
    pub records: Vec<ExitRecord>,
}

impl ExitTimeSample {
    pub fn n_paths(&self) -> usize {
        self.records.len()
    }

    pub fn censored_count(&self) -> usize {
        self.records.iter().filter(|r| r.is_censored()).count()
    }

    pub fn censored_fraction(&self) -> f64 {
        self.censored_count() as f64 / self.n_paths() as f64
    }

    /// Exit times in ascending order with censored records mapped to `+∞`.
    pub fn sorted_times(&self) -> Vec<f64> {
        let mut times: Vec<f64> = self
            .records
            .iter()
            .map(|r| r.exit_time.unwrap_or(f64::INFINITY))
            .collect();
        times.sort_by(f64::total_cmp);
        times
    }

    /// Mean and standard error of the uncensored exit times.
    pub fn mean_exit_time(&self) -> (f64, f64) {
        let times: Vec<f64> = self.records.iter().filter_map(|r| r.exit_time).collect();
        let n = times.len() as f64;
        let mean = times.iter().sum::<f64>() / n;
        let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }
}

/// Source of the random numbers consumed by a path.
pub trait NoiseSource {
    fn fill_gaussian(&mut self, out: &mut [f64]);
    fn uniform(&mut self) -> f64;
}

/// The per-path stream `(master_seed, path_index)`.
#[derive(Debug, Clone)]
pub struct PathStream {
    rng: ChaCha8Rng,
}

impl PathStream {
    pub fn new(master_seed: u64, path_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(path_index);
        Self { rng }
    }
}

impl NoiseSource for PathStream {
    fn fill_gaussian(&mut self, out: &mut [f64]) {
        for g in out {
            *g = self.rng.sample(StandardNormal);
        }
    }

    fn uniform(&mut self) -> f64 {
        self.rng.random()
    }
}

/// One Euler–Maruyama step `x' = x + b(x) dt + σ(x) sqrt(dt) g`, written to `out`.
pub fn step(x: &[f64], field: &DriftDiffusionField, dt: f64, gaussian: &[f64], out: &mut [f64]) {
    field.drift(x, out);
    let scale = field.noise_scale(x) * dt.sqrt();
    for ((o, xi), g) in out.iter_mut().zip(x).zip(gaussian) {
        *o = xi + *o * dt + scale * g;
    }
}

pub fn simulate_path(
    field: &DriftDiffusionField,
    domain: &Domain,
    config: &SimConfig,
    path_index: u64,
) -> Result<ExitRecord> {
    config.validate(domain)?;
    let mut noise = PathStream::new(config.master_seed, path_index);
    Ok(run_path(field, domain, config, path_index, &mut noise))
}

/// Like [`simulate_path`] with an explicit noise source.
pub fn simulate_path_with<N: NoiseSource>(
    field: &DriftDiffusionField,
    domain: &Domain,
    config: &SimConfig,
    path_index: u64,
    noise: &mut N,
) -> Result<ExitRecord> {
    config.validate(domain)?;
    Ok(run_path(field, domain, config, path_index, noise))
}

fn run_path<N: NoiseSource>(
    field: &DriftDiffusionField,
    domain: &Domain,
    config: &SimConfig,
    path_index: u64,
    noise: &mut N,
) -> ExitRecord {
    let dim = config.start.len();
    let mut current = [0.0; MAX_DIM];
    let mut next = [0.0; MAX_DIM];
    let mut gaussian = [0.0; MAX_DIM];
    current[..dim].copy_from_slice(&config.start);
    let bridge = config.exit_check == ExitCheck::BrownianBridge;
    let max_steps = config.max_steps();
    let dt = config.dt;

    for k in 1..=max_steps {
        let x = &current[..dim];
        noise.fill_gaussian(&mut gaussian[..dim]);
        step(x, field, dt, &gaussian[..dim], &mut next[..dim]);
        let x_next = &next[..dim];
        let mut exited = !domain.contains(x_next);
        if !exited && bridge {
            if let (Some(d0), Some(d1)) = (
                domain.boundary_distance(x),
                domain.boundary_distance(x_next),
            ) {
                let sigma = field.noise_scale(x);
                let exponent = 2.0 * d0 * d1 / (sigma * sigma * dt);
                if exponent < BRIDGE_EXPONENT_CUTOFF {
                    exited = noise.uniform() < (-exponent).exp();
                }
            }
        }
        if exited {
            return ExitRecord {
                exit_time: Some(k as f64 * dt),
                steps: k,
                path_index,
            };
        }
        std::mem::swap(&mut current, &mut next);
    }
    ExitRecord {
        exit_time: None,
        steps: max_steps,
        path_index,
    }
}

/// Simulates all paths on the global rayon pool.
pub fn simulate_batch(
    field: &DriftDiffusionField,
    domain: &Domain,
    config: &SimConfig,
    problem: &str,
) -> Result<ExitTimeSample> {
    config.validate(domain)?;
    let records = (0..config.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut noise = PathStream::new(config.master_seed, i);
            run_path(field, domain, config, i, &mut noise)
        })
        .collect();
    Ok(ExitTimeSample {
        problem: problem.to_string(),
        config: config.clone(),
        records,
    })
}

/// Simulates all paths on a dedicated pool of `workers` threads.
pub fn simulate_batch_with_workers(
    field: &DriftDiffusionField,
    domain: &Domain,
    config: &SimConfig,
    problem: &str,
    workers: usize,
) -> Result<ExitTimeSample> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Configuration(format!("cannot build worker pool: {e}")))?;
    pool.install(|| simulate_batch(field, domain, config, problem))
}

/// Writes the raw sample: a `#` header line with provenance, then
/// `path_index<TAB>exit_time|CENSORED` per record.
pub fn write_samples<W: Write>(mut out: W, sample: &ExitTimeSample) -> std::io::Result<()> {
    let c = &sample.config;
    let start: Vec<String> = c.start.iter().map(|x| x.to_string()).collect();
    writeln!(
        out,
        "# problem={} dt={} t_max={} seed={} start={} exit_check={}",
        sample.problem,
        c.dt,
        c.t_max,
        c.master_seed,
        start.join(","),
        c.exit_check
    )?;
    for r in &sample.records {
        match r.exit_time {
            Some(t) => writeln!(out, "{}\t{}", r.path_index, t)?,
            None => writeln!(out, "{}\tCENSORED", r.path_index)?,
        }
    }
    Ok(())
}

/// Parses one sample block written by [`write_samples`].
pub fn read_samples<R: BufRead>(input: R) -> Result<ExitTimeSample> {
    let bad = |msg: String| Error::Configuration(format!("malformed sample dump: {msg}"));
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| bad("empty input".into()))?
        .map_err(|e| bad(e.to_string()))?;
    let header = header
        .strip_prefix("# ")
        .ok_or_else(|| bad("missing header".into()))?;

    let mut problem = None;
    let (mut dt, mut t_max, mut seed, mut start) = (None, None, None, None);
    let mut exit_check = ExitCheck::default();
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| bad(format!("header field `{field}`")))?;
        let num = |v: &str| v.parse::<f64>().map_err(|e| bad(format!("{key}: {e}")));
        match key {
            "problem" => problem = Some(value.to_string()),
            "dt" => dt = Some(num(value)?),
            "t_max" => t_max = Some(num(value)?),
            "seed" => {
                seed = Some(
                    value
                        .parse::<u64>()
                        .map_err(|e| bad(format!("seed: {e}")))?,
                )
            }
            "start" => start = Some(value.split(',').map(num).collect::<Result<Vec<f64>>>()?),
            "exit_check" => exit_check = value.parse()?,
            _ => return Err(bad(format!("unknown header key `{key}`"))),
        }
    }

    let mut records = Vec::new();
    for line in lines {
        let line = line.map_err(|e| bad(e.to_string()))?;
        if line.is_empty() {
            continue;
        }
        let (index, time) = line
            .split_once('\t')
            .ok_or_else(|| bad(format!("record `{line}`")))?;
        let path_index = index.parse::<u64>().map_err(|e| bad(e.to_string()))?;
        records.push((path_index, time.to_string()));
    }

    let dt = dt.ok_or_else(|| bad("missing dt".into()))?;
    let t_max = t_max.ok_or_else(|| bad("missing t_max".into()))?;
    let config = SimConfig {
        dt,
        t_max,
        n_paths: records.len(),
        master_seed: seed.ok_or_else(|| bad("missing seed".into()))?,
        start: start.ok_or_else(|| bad("missing start".into()))?,
        exit_check,
    };
    let max_steps = config.max_steps();
    let records = records
        .into_iter()
        .map(|(path_index, time)| {
            if time == "CENSORED" {
                Ok(ExitRecord {
                    exit_time: None,
                    steps: max_steps,
                    path_index,
                })
            } else {
                let t = time.parse::<f64>().map_err(|e| bad(e.to_string()))?;
                Ok(ExitRecord {
                    exit_time: Some(t),
                    steps: (t / dt).round() as u64,
                    path_index,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExitTimeSample {
        problem: problem.ok_or_else(|| bad("missing problem".into()))?,
        config,
        records,
    })
}
