// SPDX-License-Identifier: Apache-2.0

//! Survival-function oracles `S(x, t) = P_x(τ > t)` independent of the
//! Monte Carlo path: eigenfunction series for the interval and the disk, and
//! an implicit finite-difference solve for general 1-D problems.

pub mod bessel;
mod pde;

use std::f64::consts::PI;

pub use pde::survival_pde_1d;

use crate::error::{Error, Result};
use crate::model::EllipticProblem;
use crate::presets::Preset;
use crate::tridiag::{assemble_operator, interval_bounds, Mesh1d};

/// Series terms below this magnitude are dropped.
pub const SERIES_TRUNCATION: f64 = 1e-14;
/// Terms summed before truncation may stop the series.
pub const SERIES_MIN_TERMS: usize = 5;
/// Below `SMALL_TIME_FACTOR · L² / a` the series is replaced by a PDE solve.
pub const SMALL_TIME_FACTOR: f64 = 1e-3;

/// A survival function with its principal eigenpair.
pub trait SurvivalOracle: Send + Sync {
    fn problem(&self) -> &str;

    /// `S(x, t)`.
    fn survival(&self, x: &[f64], t: f64) -> Result<f64>;

    /// Principal eigenvalue λ₁.
    fn lambda1(&self) -> f64;

    /// Ground state scaled to sup-norm 1.
    fn ground_state(&self, x: &[f64]) -> f64;
}

/// `S` on the interval `(offset, offset + length)` under the generator `a Δ`:
/// `Σ_{k odd} 4/(kπ) sin(kπ(x - offset)/L) exp(-a k²π² t / L²)`.
pub fn interval_survival(x: f64, t: f64, a: f64, length: f64, offset: f64) -> Result<f64> {
    let s = (x - offset) / length;
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Argument(format!(
            "x = {x} is not inside ({offset}, {})",
            offset + length
        )));
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::Argument(format!(
            "time must be nonnegative, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    if t < SMALL_TIME_FACTOR * length * length / a {
        let problem = EllipticProblem::with_gradients(
            "interval-series-fallback",
            crate::model::Domain::interval(offset, offset + length)?,
            crate::model::constant(a),
            crate::model::zero_vector(),
            crate::model::constant(0.0),
            crate::model::zero_vector(),
        )?;
        return survival_pde_1d(&problem, x, t, length / 2000.0, t / 200.0);
    }
    let rate = a * PI * PI * t / (length * length);
    let mut sum = 0.0;
    let mut k = 1u64;
    let mut terms = 0;
    loop {
        let kf = k as f64;
        let weight = 4.0 / (kf * PI) * (-rate * kf * kf).exp();
        sum += weight * (kf * PI * s).sin();
        terms += 1;
        if terms >= SERIES_MIN_TERMS && weight < SERIES_TRUNCATION {
            break;
        }
        k += 2;
    }
    Ok(sum.clamp(0.0, 1.0))
}

/// `S` at radius `r` on the unit disk under the generator `a Δ`:
/// `Σ_k 2/(j_k J₁(j_k)) J₀(j_k r) exp(-a j_k² t)`.
pub fn disk_survival(r: f64, t: f64, a: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Argument(format!("radius {r} is not in [0, 1)")));
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::Argument(format!(
            "time must be nonnegative, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    if t < SMALL_TIME_FACTOR / a {
        return pde::radial_survival_pde(a, 1.0, r, t, 4000);
    }
    let mut sum = 0.0;
    let mut k = 1;
    loop {
        let j = bessel::j0_zero(k);
        let coefficient = 2.0 / (j * bessel::j1(j));
        let decay = coefficient.abs() * (-a * j * j * t).exp();
        sum += coefficient * (-a * j * j * t).exp() * bessel::j0(j * r);
        if k >= SERIES_MIN_TERMS && decay < SERIES_TRUNCATION {
            break;
        }
        k += 1;
    }
    Ok(sum.clamp(0.0, 1.0))
}

/// Sine series on an interval with constant diffusion and no potential.
#[derive(Debug, Clone)]
pub struct IntervalSeries {
    pub problem: String,
    pub a: f64,
    pub lower: f64,
    pub length: f64,
}

impl SurvivalOracle for IntervalSeries {
    fn problem(&self) -> &str {
        &self.problem
    }

    fn survival(&self, x: &[f64], t: f64) -> Result<f64> {
        interval_survival(x[0], t, self.a, self.length, self.lower)
    }

    fn lambda1(&self) -> f64 {
        self.a * PI * PI / (self.length * self.length)
    }

    fn ground_state(&self, x: &[f64]) -> f64 {
        (PI * (x[0] - self.lower) / self.length).sin()
    }
}

/// Bessel series on the unit disk centered at the origin with constant diffusion.
#[derive(Debug, Clone)]
pub struct DiskSeries {
    pub problem: String,
    pub a: f64,
}

impl SurvivalOracle for DiskSeries {
    fn problem(&self) -> &str {
        &self.problem
    }

    fn survival(&self, x: &[f64], t: f64) -> Result<f64> {
        disk_survival(x[0].hypot(x[1]), t, self.a)
    }

    fn lambda1(&self) -> f64 {
        self.a * bessel::J0_FIRST_ZERO * bessel::J0_FIRST_ZERO
    }

    fn ground_state(&self, x: &[f64]) -> f64 {
        bessel::j0(bessel::J0_FIRST_ZERO * x[0].hypot(x[1]))
    }
}

/// Finite-difference oracle for an arbitrary 1-D problem.
#[derive(Debug, Clone)]
pub struct PdeOracle1d {
    problem: EllipticProblem,
    h: f64,
    k: f64,
    mesh: Mesh1d,
    lambda1: f64,
    ground_state: Vec<f64>,
}

impl PdeOracle1d {
    pub fn new(problem: EllipticProblem, h: f64, k: f64) -> Result<Self> {
        let (lower, upper) = interval_bounds(&problem)?;
        let mesh = Mesh1d::new(lower, upper, h)?;
        let (lambda1, interior) = pde::principal_pair(&assemble_operator(&problem, &mesh))?;
        let mut ground_state = Vec::with_capacity(mesh.cells + 1);
        ground_state.push(0.0);
        ground_state.extend(interior);
        ground_state.push(0.0);
        Ok(Self {
            problem,
            h,
            k,
            mesh,
            lambda1,
            ground_state,
        })
    }
}

impl SurvivalOracle for PdeOracle1d {
    fn problem(&self) -> &str {
        self.problem.id()
    }

    fn survival(&self, x: &[f64], t: f64) -> Result<f64> {
        survival_pde_1d(&self.problem, x[0], t, self.h, self.k)
    }

    fn lambda1(&self) -> f64 {
        self.lambda1
    }

    fn ground_state(&self, x: &[f64]) -> f64 {
        self.mesh.interpolate(&self.ground_state, x[0])
    }
}

/// Mesh and time step of the PDE oracle used for presets without a series.
pub const PDE_ORACLE_H: f64 = 1e-3;
pub const PDE_ORACLE_K: f64 = 1e-3;

/// The most accurate oracle available for a preset.
pub fn preset_oracle(preset: Preset) -> Result<Box<dyn SurvivalOracle>> {
    Ok(match preset {
        Preset::Interval01 => Box::new(IntervalSeries {
            problem: preset.name().to_string(),
            a: 1.0,
            lower: 0.0,
            length: 1.0,
        }),
        Preset::DiskBm => Box::new(DiskSeries {
            problem: preset.name().to_string(),
            a: 0.5,
        }),
        Preset::OuInterval => Box::new(PdeOracle1d::new(
            preset.problem(),
            PDE_ORACLE_H,
            PDE_ORACLE_K,
        )?),
    })
}

/// Smallest `t` with `S(x, t) ≤ p`, by bisection to absolute tolerance
/// `1e-8 (1 + t)`. Returns the upper end of the final bracket.
pub fn oracle_quantile(oracle: &dyn SurvivalOracle, x: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Argument(format!("p must lie in (0, 1), got {p}")));
    }
    let mut lo = 0.0;
    let lambda = oracle.lambda1();
    let mut hi = if lambda > 0.0 && lambda.is_finite() {
        1.0 / lambda
    } else {
        1.0
    };
    let mut doublings = 0;
    while oracle.survival(x, hi)? > p {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 || !hi.is_finite() {
            return Err(Error::Horizon(format!(
                "survival at {x:?} stays above {p} up to t = {hi}"
            )));
        }
    }
    while hi - lo > 1e-8 * (1.0 + hi) {
        let mid = 0.5 * (lo + hi);
        if oracle.survival(x, mid)? > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Exponential {
        rate: f64,
    }

    impl SurvivalOracle for Exponential {
        fn problem(&self) -> &str {
            "exponential"
        }
        fn survival(&self, _: &[f64], t: f64) -> Result<f64> {
            Ok((-self.rate * t).exp())
        }
        fn lambda1(&self) -> f64 {
            self.rate
        }
        fn ground_state(&self, _: &[f64]) -> f64 {
            1.0
        }
    }

    #[test]
    fn exponential_quantile_inverts_exactly() {
        let oracle = Exponential { rate: 3.0 };
        for p in [0.5, 0.1, 1e-6] {
            let d = oracle_quantile(&oracle, &[0.0], p).unwrap();
            let exact = (1.0 / p).ln() / 3.0;
            assert!(
                (d - exact).abs() <= 1e-8 * (1.0 + exact),
                "p = {p}: {d} vs {exact}"
            );
            assert!(d >= exact);
        }
    }

    #[test]
    fn quantile_rejects_bad_levels() {
        let oracle = Exponential { rate: 1.0 };
        assert!(oracle_quantile(&oracle, &[0.0], 0.0).is_err());
        assert!(oracle_quantile(&oracle, &[0.0], 1.0).is_err());
    }

    #[test]
    fn never_decaying_oracle_is_a_horizon_error() {
        let oracle = Exponential { rate: 0.0 };
        assert!(matches!(
            oracle_quantile(&oracle, &[0.0], 0.5),
            Err(Error::Horizon(_))
        ));
    }

    #[test]
    fn interval_series_starts_at_one() {
        assert_eq!(interval_survival(0.5, 0.0, 1.0, 1.0, 0.0).unwrap(), 1.0);
        // Just above the small-time threshold the truncated series itself sums to 1.
        let s = interval_survival(0.5, 1.1e-3, 1.0, 1.0, 0.0).unwrap();
        assert!((s - 1.0).abs() < 1e-10, "{s}");
        assert!(interval_survival(1.0, 0.1, 1.0, 1.0, 0.0).is_err());
        assert!(interval_survival(-0.1, 0.1, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn interval_decay_rate_is_pi_squared() {
        let s = |t: f64| interval_survival(0.5, t, 1.0, 1.0, 0.0).unwrap();
        // At t = 2 the log-slope is already π²; -log S / t still carries log(4/π) / t.
        let slope = s(2.0).ln() - s(3.0).ln();
        assert!((slope - PI * PI).abs() < 1e-6, "{slope}");
        let t = 30.0;
        let rate = -s(t).ln() / t;
        assert!((rate - PI * PI).abs() < 1e-3 * PI * PI, "{rate}");
    }

    #[test]
    fn small_time_fallback_is_continuous() {
        let below = interval_survival(0.1, 0.9999e-3, 1.0, 1.0, 0.0).unwrap();
        let above = interval_survival(0.1, 1.0001e-3, 1.0, 1.0, 0.0).unwrap();
        assert!((below - above).abs() < 1e-4, "{below} {above}");
        let below = disk_survival(0.95, 1.9999e-3, 0.5).unwrap();
        let above = disk_survival(0.95, 2.0001e-3, 0.5).unwrap();
        assert!((below - above).abs() < 1e-3, "{below} {above}");
    }

    #[test]
    fn disk_series_starts_at_one() {
        assert_eq!(disk_survival(0.0, 0.0, 0.5).unwrap(), 1.0);
        let s = disk_survival(0.0, 2.1e-3, 0.5).unwrap();
        assert!((s - 1.0).abs() < 1e-6, "{s}");
        assert!(disk_survival(1.0, 0.1, 0.5).is_err());
    }

    #[test]
    fn disk_decay_rate() {
        let t = 8.0;
        let rate = -disk_survival(0.0, t, 0.5).unwrap().ln() / t;
        let lambda = 0.5 * bessel::J0_FIRST_ZERO.powi(2);
        assert!((lambda - 2.8916).abs() < 1e-4);
        // log c₁ / t remains in the rate at finite t.
        let c1 = 2.0 / (bessel::J0_FIRST_ZERO * bessel::j1(bessel::J0_FIRST_ZERO));
        assert!((rate - (lambda - c1.ln() / t)).abs() < 1e-9, "{rate}");
    }

    #[test]
    fn pde_matches_series_at_midpoint() {
        let problem = Preset::Interval01.problem();
        let pde = survival_pde_1d(&problem, 0.5, 0.1, 1e-3, 1e-4).unwrap();
        let series = interval_survival(0.5, 0.1, 1.0, 1.0, 0.0).unwrap();
        assert!((pde - series).abs() < 1e-4, "{pde} vs {series}");
    }

    #[test]
    fn ou_pde_decays_at_rate_two() {
        let problem = Preset::OuInterval.problem();
        let s = |t: f64| survival_pde_1d(&problem, 0.0, t, 1e-3, 1e-3).unwrap();
        let slope = s(4.0).ln() - s(5.0).ln();
        assert!((slope - 2.0).abs() < 0.01, "{slope}");
        let oracle = PdeOracle1d::new(problem, 1e-3, 1e-3).unwrap();
        assert!((oracle.lambda1() - 2.0).abs() < 1e-5);
        assert!((oracle.ground_state(&[0.0]) - 1.0).abs() < 1e-9);
        assert!((oracle.ground_state(&[0.5]) - 0.75).abs() < 1e-4);
    }
}
