// SPDX-License-Identifier: Apache-2.0

//! Exit-time quantiles and the eigenvalue bounds they imply.
//!
//! For `0 < p < 1` the quantile `d_p(x)` is the smallest `t` with
//! `P_x(τ ≥ t) ≤ p`, and
//!
//! ```text
//! λ₁ ≥ log(1/p) / sup_x d_p(x),
//! ```
//!
//! with equality in the limit `p → 0`. Estimates come from order statistics of
//! a simulated sample, confidence intervals from binomial rank bounds.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::error::{Error, Result};
use crate::sde::ExitTimeSample;

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Below this expected tail count (`n · p`) a report is flagged as undersampled.
pub const MIN_TAIL_COUNT: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileBoundReport {
    pub problem: String,
    pub start: Vec<f64>,
    pub p: f64,
    pub n_paths: usize,
    pub dt: f64,
    pub d_p: f64,
    pub d_lo: f64,
    /// `+∞` when the upper rank falls past the sample or on a censored record.
    pub d_hi: f64,
    pub bound: f64,
    pub certified_bound: f64,
    pub censored_fraction: f64,
    pub seed: u64,
    #[serde(skip, default = "default_confidence")]
    pub confidence: f64,
    /// `n · p` below [`MIN_TAIL_COUNT`].
    #[serde(skip)]
    pub undersampled: bool,
}

fn default_confidence() -> f64 {
    DEFAULT_CONFIDENCE
}

/// Fraction of paths still inside at time `t`; censored paths count as survivors.
pub fn empirical_survival(sample: &ExitTimeSample, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Argument(format!(
            "time must be nonnegative, got {t}"
        )));
    }
    if t > sample.config.t_max {
        return Err(Error::Horizon(format!(
            "t = {t} lies beyond the censoring horizon t_max = {}",
            sample.config.t_max
        )));
    }
    let survivors = sample
        .records
        .iter()
        .filter(|r| r.exit_time.is_none_or(|tau| tau >= t))
        .count();
    Ok(survivors as f64 / sample.n_paths() as f64)
}

/// `log(1/p) / d_p`.
pub fn quantile_bound(d_p: f64, p: f64) -> Result<f64> {
    check_level(p)?;
    if d_p.is_nan() || d_p <= 0.0 {
        return Err(Error::Argument(format!("d_p must be positive, got {d_p}")));
    }
    Ok((1.0 / p).ln() / d_p)
}

/// Pointwise lower bound on `d_p(x)`: `(1/λ) log(u_ratio / p)` with
/// `u_ratio = |u(x)| / ‖u‖∞`. Negative values are vacuous.
pub fn quantile_floor(lambda: f64, p: f64, u_ratio: f64) -> f64 {
    (u_ratio / p).ln() / lambda
}

pub fn estimate_d_p(sample: &ExitTimeSample, p: f64) -> Result<QuantileBoundReport> {
    estimate_d_p_with(sample, p, DEFAULT_CONFIDENCE)
}

/// Order-statistic estimate of `d_p` with a distribution-free confidence interval.
///
/// The point estimate is the `⌈(1-p)n⌉`-th smallest exit time. With
/// `B ~ Binomial(n, 1-p)` the interval is `[t_(l), t_(u)]` where `l` is the
/// largest rank with `P(B ≤ l-1) ≤ α/2` and `u` the smallest with
/// `P(B ≥ u) ≤ α/2`.
pub fn estimate_d_p_with(
    sample: &ExitTimeSample,
    p: f64,
    confidence: f64,
) -> Result<QuantileBoundReport> {
    check_level(p)?;
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Argument(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    let n = sample.n_paths();
    if n == 0 {
        return Err(Error::Argument("empty sample".into()));
    }
    let censored_fraction = sample.censored_fraction();
    if censored_fraction >= p {
        return Err(Error::Horizon(format!(
            "censored fraction {censored_fraction} is not below p = {p}; raise t_max above {}",
            sample.config.t_max
        )));
    }

    let times = sample.sorted_times();
    let rank = point_rank(n, p);
    let d_p = times[rank - 1];
    let (lo_rank, hi_rank) = rank_interval(n, 1.0 - p, confidence)?;
    let d_lo = times[lo_rank.min(rank) - 1];
    let d_hi = if hi_rank > n {
        f64::INFINITY
    } else {
        times[hi_rank.max(rank) - 1]
    };
    let log_inv_p = (1.0 / p).ln();

    Ok(QuantileBoundReport {
        problem: sample.problem.clone(),
        start: sample.config.start.clone(),
        p,
        n_paths: n,
        dt: sample.config.dt,
        d_p,
        d_lo,
        d_hi,
        bound: log_inv_p / d_p,
        certified_bound: log_inv_p / d_hi,
        censored_fraction,
        seed: sample.config.master_seed,
        confidence,
        undersampled: (n as f64) * p < MIN_TAIL_COUNT,
    })
}

/// The report with the largest `d_p` (first one on ties).
pub fn sup_over_starts(reports: &[QuantileBoundReport]) -> Result<QuantileBoundReport> {
    let first = reports
        .first()
        .ok_or_else(|| Error::Argument("no reports to take the supremum over".into()))?;
    if reports.iter().any(|r| r.p != first.p) {
        return Err(Error::Argument("reports mix different values of p".into()));
    }
    let best = reports
        .iter()
        .fold(first, |best, r| if r.d_p > best.d_p { r } else { best });
    Ok(best.clone())
}

fn check_level(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!("p must lie in (0, 1), got {p}")))
    }
}

/// 1-based rank `⌈(1-p)n⌉`, at least 1.
fn point_rank(n: usize, p: f64) -> usize {
    let exact = (1.0 - p) * n as f64;
    // Guard against products like 0.9 * 10 = 9.000000000000002.
    let rank = (exact - 1e-9 * exact.max(1.0)).ceil() as usize;
    rank.clamp(1, n)
}

/// 1-based ranks `(l, u)` bracketing the `q`-quantile; `u` may be `n + 1`.
fn rank_interval(n: usize, q: f64, confidence: f64) -> Result<(usize, usize)> {
    let tail = 0.5 * (1.0 - confidence);
    let binomial = Binomial::new(q, n as u64)
        .map_err(|e| Error::Numerical(format!("binomial distribution: {e}")))?;
    // Largest l with P(B <= l - 1) <= tail.
    let mut lo = 1;
    for l in (1..=n).rev() {
        if binomial.cdf((l - 1) as u64) <= tail {
            lo = l;
            break;
        }
    }
    // Smallest u with P(B >= u) = sf(u - 1) <= tail.
    let mut hi = n + 1;
    for u in 1..=n {
        if binomial.sf((u - 1) as u64) <= tail {
            hi = u;
            break;
        }
    }
    Ok((lo, hi))
}
