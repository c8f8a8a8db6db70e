// SPDX-License-Identifier: Apache-2.0

//! Donsker–Varadhan bound `λ₁ ≥ 1 / sup w` from the mean exit time `w`,
//! which solves `L w = 1` in Ω with `w = 0` on ∂Ω.
//!
//! The 1-D solver uses plain central differences. A strong drift on a coarse
//! mesh (cell Péclet number `|V'| h / 2a > 1`) can make the solution
//! oscillate; there is no upwinding.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::presets::Preset;
use crate::tridiag::{assemble_operator, interval_bounds, Mesh1d};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanExitSolution {
    pub problem: String,
    /// Node coordinates (radii for the disk preset).
    pub mesh: Vec<f64>,
    pub h: f64,
    pub w: Vec<f64>,
    pub sup_w: f64,
    /// Node where `w` peaks.
    pub argmax: f64,
    pub dv_bound: f64,
}

impl MeanExitSolution {
    fn from_values(problem: &str, mesh: Vec<f64>, h: f64, w: Vec<f64>) -> Self {
        let (imax, sup_w) =
            w.iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
                    if v > best.1 {
                        (i, v)
                    } else {
                        best
                    }
                });
        Self {
            problem: problem.to_string(),
            argmax: mesh[imax],
            mesh,
            h,
            w,
            sup_w,
            dv_bound: 1.0 / sup_w,
        }
    }

    /// Writes `x<TAB>w(x)` lines.
    pub fn write_mesh<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (x, w) in self.mesh.iter().zip(&self.w) {
            writeln!(out, "{x}\t{w}")?;
        }
        Ok(())
    }
}

/// Solves the mean-exit-time equation on an interval by central differences
/// and tridiagonal elimination.
pub fn solve_mean_exit_1d(
    problem: &crate::model::EllipticProblem,
    h: f64,
) -> Result<MeanExitSolution> {
    let (lower, upper) = interval_bounds(problem)?;
    let mesh = Mesh1d::new(lower, upper, h)?;
    let operator = assemble_operator(problem, &mesh);
    let interior = operator.solve(&vec![1.0; operator.len()])?;
    if interior.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("mean exit time is not finite".into()));
    }
    let mut w = Vec::with_capacity(mesh.cells + 1);
    w.push(0.0);
    w.extend(interior);
    w.push(0.0);
    Ok(MeanExitSolution::from_values(
        problem.id(),
        mesh.nodes(),
        mesh.h,
        w,
    ))
}

/// Closed-form mean exit times: `x/2 - x²/2` on (0, 1) and `(1 - r²)/2` on the
/// unit disk under standard Brownian motion, sampled on `nodes` points.
pub fn analytic_mean_exit(preset: Preset, nodes: usize) -> Result<MeanExitSolution> {
    let nodes = nodes.max(3);
    let h = 1.0 / (nodes - 1) as f64;
    let mesh: Vec<f64> = (0..nodes).map(|i| i as f64 * h).collect();
    let w: Vec<f64> = match preset {
        Preset::Interval01 => mesh.iter().map(|x| 0.5 * x * (1.0 - x)).collect(),
        Preset::DiskBm => mesh.iter().map(|r| 0.5 * (1.0 - r * r)).collect(),
        Preset::OuInterval => {
            return Err(Error::UnknownPreset(format!(
                "{} has no closed-form mean exit time",
                preset.name()
            )))
        }
    };
    let mut solution = MeanExitSolution::from_values(preset.name(), mesh, h, w);
    // The sampled maximum of the closed form is its true maximum for odd node counts;
    // report the exact supremum regardless.
    let (sup_w, argmax) = match preset {
        Preset::Interval01 => (0.125, 0.5),
        _ => (0.5, 0.0),
    };
    solution.sup_w = sup_w;
    solution.argmax = argmax;
    solution.dv_bound = 1.0 / sup_w;
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{constant, make_problem, Domain};

    #[test]
    fn single_interior_node() {
        let problem = Preset::Interval01.problem();
        let sol = solve_mean_exit_1d(&problem, 0.5).unwrap();
        assert_eq!(sol.w.len(), 3);
        assert_eq!(sol.w[1], 0.125);
        assert_eq!(sol.dv_bound, 8.0);
    }

    #[test]
    fn interval_fd_reproduces_quadratic() {
        let sol = solve_mean_exit_1d(&Preset::Interval01.problem(), 1e-3).unwrap();
        for (x, w) in sol.mesh.iter().zip(&sol.w) {
            assert!((w - 0.5 * x * (1.0 - x)).abs() < 1e-10);
        }
        assert!((sol.dv_bound - 8.0).abs() < 1e-4);
        assert_eq!(sol.dv_bound * sol.sup_w, 1.0);
    }

    #[test]
    fn boundary_values_vanish_and_interior_is_positive() {
        let sol = solve_mean_exit_1d(&Preset::OuInterval.problem(), 1e-3).unwrap();
        assert_eq!(sol.w[0], 0.0);
        assert_eq!(*sol.w.last().unwrap(), 0.0);
        assert!(sol.w[1..sol.w.len() - 1].iter().all(|&v| v > 0.0));
        assert!(sol.argmax.abs() < 1e-9);
    }

    #[test]
    fn disk_is_not_solved_by_fd() {
        assert!(matches!(
            solve_mean_exit_1d(&Preset::DiskBm.problem(), 1e-2),
            Err(Error::UnsupportedDimension(_))
        ));
    }

    #[test]
    fn analytic_presets() {
        let interval = analytic_mean_exit(Preset::Interval01, 101).unwrap();
        assert_eq!(interval.sup_w, 0.125);
        assert_eq!(interval.dv_bound, 8.0);
        assert_eq!(interval.w[0], 0.0);
        assert_eq!(*interval.w.last().unwrap(), 0.0);
        let disk = analytic_mean_exit(Preset::DiskBm, 51).unwrap();
        assert_eq!(disk.sup_w, 0.5);
        assert_eq!(disk.dv_bound, 2.0);
        assert_eq!(*disk.w.last().unwrap(), 0.0);
        assert!(analytic_mean_exit(Preset::OuInterval, 11).is_err());
    }

    #[test]
    fn second_order_convergence() {
        // Variable diffusion so the scheme is not exact: a = 1 + x, V = 0 on (0, 1).
        // -((1+x) w')' = 1 gives w = -x + c ln(1+x) with c = 1/ln 2.
        let problem = make_problem(
            Domain::interval(0.0, 1.0).unwrap(),
            crate::model::scalar(|x| 1.0 + x[0]),
            constant(0.0),
        )
        .unwrap();
        let exact = |x: f64| -x + (1.0 + x).ln() / std::f64::consts::LN_2;
        let errors: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|&h| {
                let sol = solve_mean_exit_1d(&problem, h).unwrap();
                sol.mesh
                    .iter()
                    .zip(&sol.w)
                    .map(|(x, w)| (w - exact(*x)).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        for pair in errors.windows(2) {
            let order = (pair[0] / pair[1]).log2();
            assert!(order >= 1.9, "observed order {order}, errors {errors:?}");
        }
    }

    #[test]
    fn mesh_dump_lines() {
        let sol = solve_mean_exit_1d(&Preset::Interval01.problem(), 0.5).unwrap();
        let mut buf = Vec::new();
        sol.write_mesh(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0\t0\n0.5\t0.125\n1\t0\n");
    }
}
