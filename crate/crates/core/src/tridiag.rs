// SPDX-License-Identifier: Apache-2.0

//! Tridiagonal systems and the central-difference discretization of `L` in 1-D.

use crate::error::{Error, Result};
use crate::model::{EllipticProblem, Shape};

/// A tridiagonal matrix; `lower[0]` and `upper[n-1]` are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.lower[i] * x[i - 1];
            }
            if i + 1 < n {
                v += self.upper[i] * x[i + 1];
            }
            y[i] = v;
        }
    }

    /// `alpha * I + beta * A`.
    pub fn shifted(&self, alpha: f64, beta: f64) -> Self {
        Self {
            lower: self.lower.iter().map(|v| beta * v).collect(),
            diag: self.diag.iter().map(|v| alpha + beta * v).collect(),
            upper: self.upper.iter().map(|v| beta * v).collect(),
        }
    }

    /// Thomas algorithm without pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if rhs.len() != n || n == 0 {
            return Err(Error::Argument(format!(
                "right-hand side has length {}, matrix has {n} rows",
                rhs.len()
            )));
        }
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut pivot = self.diag[0];
        check_pivot(pivot, 0)?;
        c[0] = self.upper[0] / pivot;
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i] * c[i - 1];
            check_pivot(pivot, i)?;
            c[i] = if i + 1 < n {
                self.upper[i] / pivot
            } else {
                0.0
            };
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}

fn check_pivot(pivot: f64, row: usize) -> Result<()> {
    if pivot.abs() < 1e-300 || !pivot.is_finite() {
        return Err(Error::Numerical(format!(
            "tridiagonal system is singular at row {row}"
        )));
    }
    Ok(())
}

/// Uniform 1-D mesh with Dirichlet end nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1d {
    pub lower: f64,
    pub h: f64,
    /// Number of intervals; nodes are `0..=cells`.
    pub cells: usize,
}

impl Mesh1d {
    pub fn new(lower: f64, upper: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Argument(format!(
                "mesh spacing must be positive, got {h}"
            )));
        }
        let length = upper - lower;
        let cells = (length / h).round();
        if (cells * h - length).abs() > 1e-8 * length {
            return Err(Error::Argument(format!(
                "mesh spacing {h} does not divide the interval length {length}"
            )));
        }
        if cells < 2.0 {
            return Err(Error::Argument(format!(
                "mesh spacing {h} leaves no interior node on an interval of length {length}"
            )));
        }
        let cells = cells as usize;
        Ok(Self {
            lower,
            h: length / cells as f64,
            cells,
        })
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lower + i as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.cells).map(|i| self.node(i)).collect()
    }

    /// Linear interpolation of nodal values.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let s = ((x - self.lower) / self.h).clamp(0.0, self.cells as f64);
        let i = (s.floor() as usize).min(self.cells - 1);
        let frac = s - i as f64;
        values[i] * (1.0 - frac) + values[i + 1] * frac
    }
}

/// Interval endpoints of a 1-D problem.
pub fn interval_bounds(problem: &EllipticProblem) -> Result<(f64, f64)> {
    match problem.domain().shape() {
        Shape::Interval { lower, upper } => Ok((*lower, *upper)),
        _ => Err(Error::UnsupportedDimension(format!(
            "problem `{}` is not posed on an interval",
            problem.id()
        ))),
    }
}

/// Central-difference matrix of `L w = -(a w')' + V' w'` on the interior nodes:
/// `-[a_{i+1/2}(w_{i+1}-w_i) - a_{i-1/2}(w_i-w_{i-1})]/h² + V'(x_i)(w_{i+1}-w_{i-1})/(2h)`.
pub fn assemble_operator(problem: &EllipticProblem, mesh: &Mesh1d) -> Tridiagonal {
    let n = mesh.cells - 1;
    let h = mesh.h;
    let h2 = h * h;
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut grad = [0.0];
    for row in 0..n {
        let x = mesh.node(row + 1);
        let a_left = problem.a(&[x - 0.5 * h]);
        let a_right = problem.a(&[x + 0.5 * h]);
        problem.grad_potential(&[x], &mut grad);
        let advect = grad[0] / (2.0 * h);
        lower[row] = -a_left / h2 - advect;
        diag[row] = (a_left + a_right) / h2;
        upper[row] = -a_right / h2 + advect;
    }
    Tridiagonal { lower, diag, upper }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_matches_dense_product() {
        let m = Tridiagonal {
            lower: vec![0.0, -1.0, 2.0, 0.5],
            diag: vec![4.0, 5.0, 6.0, 3.0],
            upper: vec![1.0, -2.0, 1.0, 0.0],
        };
        let x = [1.0, -2.0, 0.5, 3.0];
        let mut b = [0.0; 4];
        m.apply(&x, &mut b);
        let solved = m.solve(&b).unwrap();
        for (s, e) in solved.iter().zip(&x) {
            assert!((s - e).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_system_is_reported() {
        let m = Tridiagonal {
            lower: vec![0.0, 1.0],
            diag: vec![1.0, 1.0],
            upper: vec![1.0, 0.0],
        };
        assert!(matches!(m.solve(&[1.0, 1.0]), Err(Error::Numerical(_))));
    }

    #[test]
    fn mesh_requires_divisible_spacing() {
        assert!(Mesh1d::new(0.0, 1.0, 0.3).is_err());
        assert!(Mesh1d::new(0.0, 1.0, 1.0).is_err());
        let mesh = Mesh1d::new(-1.0, 1.0, 1e-4).unwrap();
        assert_eq!(mesh.cells, 20_000);
        assert_eq!(mesh.nodes().len(), 20_001);
    }

    #[test]
    fn interpolation_is_exact_on_linear_data() {
        let mesh = Mesh1d::new(0.0, 1.0, 0.25).unwrap();
        let values: Vec<f64> = mesh.nodes().iter().map(|x| 3.0 * x + 1.0).collect();
        assert!((mesh.interpolate(&values, 0.6) - 2.8).abs() < 1e-14);
        assert_eq!(mesh.interpolate(&values, 1.0), 4.0);
    }
}
