// SPDX-License-Identifier: Apache-2.0

use exitq::baseline::{analytic_mean_exit, solve_mean_exit_1d};
use exitq::estimator::{estimate_d_p_with, quantile_bound, sup_over_starts};
use exitq::reference::{oracle_quantile, preset_oracle, PdeOracle1d, SurvivalOracle};
use exitq::reference::{PDE_ORACLE_H, PDE_ORACLE_K};
use exitq::sde::{simulate_batch, simulate_batch_with_workers};
use exitq::tridiag::interval_bounds;
use exitq::{to_sde, EllipticProblem, ExitTimeSample, Preset, QuantileBoundReport, SimConfig};
use serde::Serialize;

use crate::config::{Method, ResolvedProblem, RunConfig, Starts};
use crate::error::CliError;

/// Censoring horizon in units of the mean-exit-time scale `1 / λ_DV`.
pub const HORIZON_FACTOR: f64 = 50.0;

/// Auto start grid size for problems without a symmetry center.
pub const AUTO_GRID_POINTS: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DvSummary {
    pub problem: String,
    /// `fd` or `analytic`.
    pub solver: String,
    pub h: f64,
    pub sup_w: f64,
    pub argmax: f64,
    pub dv_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    pub problem: String,
    pub start: Vec<f64>,
    pub p: f64,
    pub d_p: f64,
    pub bound: f64,
    pub lambda_ref: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunBody {
    Quantile {
        reports: Vec<QuantileBoundReport>,
        /// One row per `p`: the start with the largest `d_p`.
        sup: Vec<QuantileBoundReport>,
    },
    Dv(DvSummary),
    Oracle(Vec<OracleRow>),
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub problem: String,
    pub method: Method,
    pub body: RunBody,
    pub samples: Vec<ExitTimeSample>,
}

impl RunOutput {
    /// Reports whose `n · p` is below the tail-count threshold.
    pub fn undersampled(&self) -> Vec<&QuantileBoundReport> {
        match &self.body {
            RunBody::Quantile { reports, .. } => {
                reports.iter().filter(|r| r.undersampled).collect()
            }
            _ => Vec::new(),
        }
    }
}

pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    config.validate()?;
    let resolved = config.problem.resolve()?;
    let id = resolved.problem.id().to_string();
    let (body, samples) = match config.method {
        Method::Dv => (RunBody::Dv(run_dv(&resolved, config.h)?), Vec::new()),
        Method::Oracle => (RunBody::Oracle(run_oracle(&resolved, config)?), Vec::new()),
        Method::Quantile => run_quantile(&resolved, config)?,
    };
    Ok(RunOutput {
        problem: id,
        method: config.method,
        body,
        samples,
    })
}

fn run_dv(resolved: &ResolvedProblem, h: f64) -> Result<DvSummary, CliError> {
    let (solution, solver) = match resolved.preset {
        Some(Preset::DiskBm) => (analytic_mean_exit(Preset::DiskBm, 101)?, "analytic"),
        _ => (solve_mean_exit_1d(&resolved.problem, h)?, "fd"),
    };
    Ok(DvSummary {
        problem: resolved.problem.id().to_string(),
        solver: solver.to_string(),
        h: solution.h,
        sup_w: solution.sup_w,
        argmax: solution.argmax,
        dv_bound: solution.dv_bound,
    })
}

fn start_points(resolved: &ResolvedProblem, starts: &Starts) -> Result<Vec<Vec<f64>>, CliError> {
    match starts {
        Starts::Points(points) if points.is_empty() => {
            Err(CliError::Config("start list must not be empty".into()))
        }
        Starts::Points(points) => Ok(points.clone()),
        Starts::Auto => match resolved.preset {
            Some(preset) => Ok(vec![preset.symmetric_start()]),
            None => {
                let (lower, upper) = interval_bounds(&resolved.problem)?;
                let n = AUTO_GRID_POINTS;
                Ok((1..=n)
                    .map(|i| vec![lower + (upper - lower) * i as f64 / (n + 1) as f64])
                    .collect())
            }
        },
    }
}

fn oracle_for(resolved: &ResolvedProblem) -> Result<Box<dyn SurvivalOracle>, CliError> {
    Ok(match resolved.preset {
        Some(preset) => preset_oracle(preset)?,
        None => Box::new(PdeOracle1d::new(
            resolved.problem.clone(),
            oracle_mesh(&resolved.problem)?,
            PDE_ORACLE_K,
        )?),
    })
}

/// The default oracle mesh, adjusted to divide the interval.
fn oracle_mesh(problem: &EllipticProblem) -> Result<f64, CliError> {
    let (lower, upper) = interval_bounds(problem)?;
    let cells = ((upper - lower) / PDE_ORACLE_H).round().max(2.0);
    Ok((upper - lower) / cells)
}

fn run_oracle(resolved: &ResolvedProblem, config: &RunConfig) -> Result<Vec<OracleRow>, CliError> {
    let oracle = oracle_for(resolved)?;
    let mut rows = Vec::new();
    for start in start_points(resolved, &config.starts)? {
        if !resolved.problem.domain().contains(&start) {
            return Err(CliError::Config(format!(
                "start point {start:?} is not inside the domain"
            )));
        }
        for &p in &config.p_list {
            let d_p = oracle_quantile(oracle.as_ref(), &start, p)?;
            rows.push(OracleRow {
                problem: resolved.problem.id().to_string(),
                start: start.clone(),
                p,
                d_p,
                bound: quantile_bound(d_p, p)?,
                lambda_ref: oracle.lambda1(),
            });
        }
    }
    Ok(rows)
}

/// `HORIZON_FACTOR / λ_DV`, with `λ_DV` from the closed form on the disk and a
/// 1000-cell solve in 1-D.
pub fn default_t_max(resolved: &ResolvedProblem) -> Result<f64, CliError> {
    let dv = match resolved.preset {
        Some(Preset::DiskBm) => analytic_mean_exit(Preset::DiskBm, 3)?.dv_bound,
        _ => {
            let (lower, upper) = interval_bounds(&resolved.problem)?;
            solve_mean_exit_1d(&resolved.problem, (upper - lower) / 1000.0)?.dv_bound
        }
    };
    Ok(HORIZON_FACTOR / dv)
}

fn run_quantile(
    resolved: &ResolvedProblem,
    config: &RunConfig,
) -> Result<(RunBody, Vec<ExitTimeSample>), CliError> {
    let t_max = match config.sim.t_max {
        Some(t) => t,
        None => default_t_max(resolved)?,
    };
    let field = to_sde(&resolved.problem);
    let domain = resolved.problem.domain();
    let id = resolved.problem.id();
    let mut reports = Vec::new();
    let mut samples = Vec::new();
    for start in start_points(resolved, &config.starts)? {
        let sim = SimConfig::new(
            config.sim.dt,
            t_max,
            config.sim.n_paths,
            config.sim.seed,
            start,
        )
        .with_exit_check(config.sim.exit_check);
        let sample = match config.sim.workers {
            Some(workers) => simulate_batch_with_workers(&field, domain, &sim, id, workers)?,
            None => simulate_batch(&field, domain, &sim, id)?,
        };
        for &p in &config.p_list {
            reports.push(estimate_d_p_with(&sample, p, config.confidence)?);
        }
        samples.push(sample);
    }
    let sup = config
        .p_list
        .iter()
        .map(|&p| {
            let same_p: Vec<QuantileBoundReport> =
                reports.iter().filter(|r| r.p == p).cloned().collect();
            sup_over_starts(&same_p)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((RunBody::Quantile { reports, sup }, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ProblemSpec;

    #[test]
    fn interval_dv_is_eight() {
        let config = RunConfig {
            method: Method::Dv,
            h: 1e-3,
            ..RunConfig::default()
        };
        let out = run(&config).unwrap();
        let RunBody::Dv(dv) = out.body else {
            panic!("expected dv output")
        };
        assert!((dv.dv_bound - 8.0).abs() < 1e-6);
        assert_eq!(dv.solver, "fd");
    }

    #[test]
    fn disk_dv_is_analytic_two() {
        let config = RunConfig {
            problem: ProblemSpec::Preset("disk-bm".into()),
            method: Method::Dv,
            ..RunConfig::default()
        };
        let RunBody::Dv(dv) = run(&config).unwrap().body else {
            panic!()
        };
        assert_eq!(dv.dv_bound, 2.0);
        assert_eq!(dv.solver, "analytic");
    }

    #[test]
    fn default_horizons() {
        let disk = ProblemSpec::Preset("disk-bm".into()).resolve().unwrap();
        assert_eq!(default_t_max(&disk).unwrap(), 25.0);
        let interval = ProblemSpec::Preset("interval01".into()).resolve().unwrap();
        assert!((default_t_max(&interval).unwrap() - 6.25).abs() < 1e-9);
    }

    #[test]
    fn custom_problem_uses_nine_start_grid() {
        let config = RunConfig {
            problem: ProblemSpec::Inline {
                id: "shifted".into(),
                lower: 1.0,
                upper: 2.0,
                a: None,
                potential: None,
            },
            p_list: vec![0.5],
            sim: crate::config::SimSettings {
                dt: 1e-3,
                n_paths: 200,
                ..Default::default()
            },
            ..RunConfig::default()
        };
        let out = run(&config).unwrap();
        let RunBody::Quantile { reports, sup } = &out.body else {
            panic!()
        };
        assert_eq!(reports.len(), 9);
        assert_eq!(sup.len(), 1);
        assert!((reports[0].start[0] - 1.1).abs() < 1e-12);
        assert_eq!(out.samples.len(), 9);
        // The supremum sits near the midpoint.
        assert!((sup[0].start[0] - 1.5).abs() <= 0.21, "{:?}", sup[0].start);
    }

    #[test]
    fn custom_oracle_matches_interval_series() {
        let config = RunConfig {
            problem: ProblemSpec::Inline {
                id: "unit".into(),
                lower: 0.0,
                upper: 1.0,
                a: Some("1".into()),
                potential: Some("0".into()),
            },
            method: Method::Oracle,
            p_list: vec![0.1],
            starts: Starts::Points(vec![vec![0.5]]),
            ..RunConfig::default()
        };
        let RunBody::Oracle(rows) = run(&config).unwrap().body else {
            panic!()
        };
        assert!((rows[0].bound - 8.9325).abs() < 2e-3, "{}", rows[0].bound);
    }

    #[test]
    fn heavy_censoring_is_a_horizon_error() {
        let mut config = RunConfig {
            p_list: vec![0.1],
            ..RunConfig::default()
        };
        config.sim.t_max = Some(0.05);
        config.sim.n_paths = 200;
        let err = run(&config).unwrap_err();
        assert_eq!(err.exit_code(), 3, "{err}");
    }

    #[test]
    fn start_outside_domain_is_a_config_error() {
        let mut config = RunConfig {
            starts: Starts::Points(vec![vec![1.5]]),
            ..RunConfig::default()
        };
        assert_eq!(run(&config).unwrap_err().exit_code(), 2);
        config.method = Method::Oracle;
        assert_eq!(run(&config).unwrap_err().exit_code(), 2);
    }
}
