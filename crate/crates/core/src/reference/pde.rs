// SPDX-License-Identifier: Apache-2.0

//! Implicit time marching of the backward equation `∂ₜS = -L S`, `S(·,0) = 1`,
//! `S = 0` on the boundary.
//!
//! Crank–Nicolson, with the first step replaced by two backward-Euler half
//! steps so the jump between the initial data and the boundary value does not
//! excite undamped oscillations.

use crate::error::{Error, Result};
use crate::model::EllipticProblem;
use crate::tridiag::{assemble_operator, interval_bounds, Mesh1d, Tridiagonal};

/// Marches `u' = -A u` from `u` over `[0, t]` with nominal step `k`.
pub(crate) fn march(operator: &Tridiagonal, mut u: Vec<f64>, t: f64, k: f64) -> Result<Vec<f64>> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Argument(format!(
            "time step must be positive, got {k}"
        )));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Argument(format!(
            "time must be nonnegative, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(u);
    }
    let steps = (t / k).ceil().max(1.0) as usize;
    let k = t / steps as f64;

    let euler = operator.shifted(1.0, 0.5 * k);
    u = euler.solve(&u)?;
    u = euler.solve(&u)?;

    let implicit = operator.shifted(1.0, 0.5 * k);
    let mut rhs = vec![0.0; u.len()];
    for _ in 1..steps {
        operator.apply(&u, &mut rhs);
        for (r, v) in rhs.iter_mut().zip(&u) {
            *r = v - 0.5 * k * *r;
        }
        u = implicit.solve(&rhs)?;
    }
    Ok(u)
}

/// Survival probability `S(x0, t)` of a 1-D problem from a finite-difference
/// solve of the backward equation on mesh `h` with time step `k`.
pub fn survival_pde_1d(problem: &EllipticProblem, x0: f64, t: f64, h: f64, k: f64) -> Result<f64> {
    let (lower, upper) = interval_bounds(problem)?;
    if !(lower < x0 && x0 < upper) {
        return Err(Error::Argument(format!(
            "x0 = {x0} is not inside ({lower}, {upper})"
        )));
    }
    let mesh = Mesh1d::new(lower, upper, h)?;
    let operator = assemble_operator(problem, &mesh);
    let interior = march(&operator, vec![1.0; operator.len()], t, k)?;
    let mut values = Vec::with_capacity(mesh.cells + 1);
    values.push(0.0);
    values.extend(interior);
    values.push(0.0);
    Ok(mesh.interpolate(&values, x0).clamp(0.0, 1.0))
}

/// Radial survival on a disk of `radius` under the generator `a Δ`, for
/// radially symmetric data: `∂ₜS = a (S'' + S'/r)` with `S'(0) = 0`.
pub(crate) fn radial_survival_pde(
    a: f64,
    radius: f64,
    r: f64,
    t: f64,
    cells: usize,
) -> Result<f64> {
    let h = radius / cells as f64;
    let h2 = h * h;
    let n = cells;
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    // r = 0: Δ S ≈ 4 (S₁ - S₀) / h².
    diag[0] = 4.0 * a / h2;
    upper[0] = -4.0 * a / h2;
    for i in 1..n {
        let ri = i as f64 * h;
        lower[i] = -a * (1.0 / h2 - 1.0 / (2.0 * h * ri));
        diag[i] = 2.0 * a / h2;
        upper[i] = -a * (1.0 / h2 + 1.0 / (2.0 * h * ri));
    }
    let operator = Tridiagonal { lower, diag, upper };
    let k = (t / 400.0).min(0.25 * h);
    let mut values = march(&operator, vec![1.0; n], t, k)?;
    values.push(0.0);
    let s = (r / h).min(n as f64);
    let i = (s.floor() as usize).min(n - 1);
    let frac = s - i as f64;
    Ok((values[i] * (1.0 - frac) + values[i + 1] * frac).clamp(0.0, 1.0))
}

/// Smallest eigenvalue of the discrete operator and its eigenvector (sup-normalized),
/// by inverse iteration.
pub(crate) fn principal_pair(operator: &Tridiagonal) -> Result<(f64, Vec<f64>)> {
    let n = operator.len();
    let mut v: Vec<f64> = (0..n)
        .map(|i| (std::f64::consts::PI * (i + 1) as f64 / (n + 1) as f64).sin())
        .collect();
    let mut lambda = f64::NAN;
    for _ in 0..500 {
        let next = operator.solve(&v)?;
        let scale = next.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let estimate = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) / scale;
        v = next.into_iter().map(|x| x / scale).collect();
        if (estimate - lambda).abs() <= 1e-13 * estimate {
            lambda = estimate;
            break;
        }
        lambda = estimate;
    }
    Ok((lambda, v))
}
