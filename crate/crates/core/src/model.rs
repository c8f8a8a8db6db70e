// SPDX-License-Identifier: Apache-2.0

//! Domains, elliptic operators and the drift-diffusion process they generate.
//!
//! The operator is `L u = -div(a ∇u) + ∇V·∇u` with scalar, uniformly positive
//! `a`. Its negative `-L = div(a ∇·) - ∇V·∇·` is the generator of
//!
//! ```text
//! dX = (∇a(X) - ∇V(X)) dt + sqrt(2 a(X)) dW
//! ```
//!
//! so that `a ≡ 1` gives `Δ` (eigenvalue π² on the unit interval) and
//! `a ≡ 1/2` gives standard Brownian motion.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest supported spatial dimension. Per-step scratch space lives on the stack.
pub const MAX_DIM: usize = 8;

/// Relative step (times the bounding-box diameter) for finite-difference gradients.
pub const FD_RELATIVE_STEP: f64 = 1e-6;

/// Relative tolerance for the gradient consistency check.
pub const GRADIENT_TOLERANCE: f64 = 1e-4;

pub type ScalarField = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
pub type Membership = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// Wraps a closure as a [`ScalarField`].
pub fn scalar<F>(f: F) -> ScalarField
where
    F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
{
    Arc::new(f)
}

/// Wraps a closure as a [`VectorField`].
pub fn vector<F>(f: F) -> VectorField
where
    F: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
{
    Arc::new(f)
}

pub fn constant(value: f64) -> ScalarField {
    Arc::new(move |_| value)
}

pub fn zero_vector() -> VectorField {
    Arc::new(|_, out: &mut [f64]| out.fill(0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Geometry(
                "bounding box corners must have equal, positive dimension".into(),
            ));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| l.partial_cmp(u) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::Geometry(format!(
                "bounding box lower corner {lower:?} is not below upper corner {upper:?}"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(xi, (l, u))| *l <= *xi && *xi <= *u)
    }

    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }

    /// Tensor grid with `per_axis` nodes per coordinate, corners included.
    pub fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let per_axis = per_axis.max(2);
        let dim = self.dimension();
        let total = per_axis.pow(dim as u32);
        (0..total)
            .map(|mut flat| {
                (0..dim)
                    .map(|axis| {
                        let i = flat % per_axis;
                        flat /= per_axis;
                        let s = i as f64 / (per_axis - 1) as f64;
                        self.lower[axis] + s * (self.upper[axis] - self.lower[axis])
                    })
                    .collect()
            })
            .collect()
    }
}

/// Geometry of a domain, as reported by [`Domain::shape`].
#[derive(Clone)]
pub enum Shape {
    Interval { lower: f64, upper: f64 },
    Disk { radius: f64, center: [f64; 2] },
    Custom { inside: Membership },
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Interval { lower, upper } => f
                .debug_struct("Interval")
                .field("lower", lower)
                .field("upper", upper)
                .finish(),
            Shape::Disk { radius, center } => f
                .debug_struct("Disk")
                .field("radius", radius)
                .field("center", center)
                .finish(),
            Shape::Custom { .. } => f.write_str("Custom"),
        }
    }
}

/// An open, bounded domain Ω.
#[derive(Clone, Debug)]
pub struct Domain {
    shape: Shape,
    bounding_box: BoundingBox,
}

impl Domain {
    pub fn interval(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::Geometry(format!(
                "interval requires lower < upper, got ({lower}, {upper})"
            )));
        }
        Ok(Self {
            shape: Shape::Interval { lower, upper },
            bounding_box: BoundingBox::new(vec![lower], vec![upper])?,
        })
    }

    pub fn disk(radius: f64, center: [f64; 2]) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Geometry(format!(
                "disk requires radius > 0, got {radius}"
            )));
        }
        let bounding_box = BoundingBox::new(
            vec![center[0] - radius, center[1] - radius],
            vec![center[0] + radius, center[1] + radius],
        )?;
        Ok(Self {
            shape: Shape::Disk { radius, center },
            bounding_box,
        })
    }

    /// A domain given by a membership predicate. Points outside `bounding_box`
    /// are always outside, whatever the predicate says.
    pub fn custom<F>(bounding_box: BoundingBox, inside: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        if bounding_box.dimension() > MAX_DIM {
            return Err(Error::Geometry(format!(
                "dimension {} exceeds the supported maximum {MAX_DIM}",
                bounding_box.dimension()
            )));
        }
        Ok(Self {
            shape: Shape::Custom {
                inside: Arc::new(inside),
            },
            bounding_box,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dimension(&self) -> usize {
        self.bounding_box.dimension()
    }

    pub fn bounding_box(&self) -> &BoundingBox {
        &self.bounding_box
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if !self.bounding_box.contains(x) {
            return false;
        }
        match &self.shape {
            Shape::Interval { lower, upper } => *lower < x[0] && x[0] < *upper,
            Shape::Disk { radius, center } => {
                let dx = x[0] - center[0];
                let dy = x[1] - center[1];
                dx * dx + dy * dy < radius * radius
            }
            Shape::Custom { inside } => inside(x),
        }
    }

    /// Euclidean distance to the boundary, when the geometry makes it cheap.
    /// Negative outside. `None` for predicate domains.
    pub fn boundary_distance(&self, x: &[f64]) -> Option<f64> {
        match &self.shape {
            Shape::Interval { lower, upper } => Some((x[0] - lower).min(upper - x[0])),
            Shape::Disk { radius, center } => {
                Some(radius - (x[0] - center[0]).hypot(x[1] - center[1]))
            }
            Shape::Custom { .. } => None,
        }
    }

    /// The symmetry center: interval midpoint, disk center, bounding-box center otherwise.
    pub fn center(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Interval { lower, upper } => vec![0.5 * (lower + upper)],
            Shape::Disk { center, .. } => center.to_vec(),
            Shape::Custom { .. } => self.bounding_box.center(),
        }
    }
}

/// Coefficients of `L u = -div(a ∇u) + ∇V·∇u` on a domain.
#[derive(Clone)]
pub struct EllipticProblem {
    id: String,
    domain: Domain,
    a: ScalarField,
    grad_a: VectorField,
    potential: ScalarField,
    grad_potential: VectorField,
    a_min: f64,
}

impl fmt::Debug for EllipticProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EllipticProblem")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("a_min", &self.a_min)
            .finish_non_exhaustive()
    }
}

impl EllipticProblem {
    /// Builds a problem whose gradients are filled in by central differences.
    pub fn new(
        id: impl Into<String>,
        domain: Domain,
        a: ScalarField,
        potential: ScalarField,
    ) -> Result<Self> {
        let step = FD_RELATIVE_STEP * domain.bounding_box().diameter();
        let grad_a = central_difference(a.clone(), step);
        let grad_potential = central_difference(potential.clone(), step);
        Self::with_gradients(id, domain, a, grad_a, potential, grad_potential)
    }

    pub fn with_gradients(
        id: impl Into<String>,
        domain: Domain,
        a: ScalarField,
        grad_a: VectorField,
        potential: ScalarField,
        grad_potential: VectorField,
    ) -> Result<Self> {
        let per_axis = match domain.dimension() {
            1 => 2001,
            2 => 201,
            3 => 41,
            _ => 9,
        };
        let mut a_min = f64::INFINITY;
        for x in domain.bounding_box().grid(per_axis) {
            let value = a(&x);
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Ellipticity { point: x, value });
            }
            a_min = a_min.min(value);
        }
        Ok(Self {
            id: id.into(),
            domain,
            a,
            grad_a,
            potential,
            grad_potential,
            a_min,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dimension(&self) -> usize {
        self.domain.dimension()
    }

    /// Smallest sampled value of `a` on the bounding box.
    pub fn a_min(&self) -> f64 {
        self.a_min
    }

    pub fn a(&self, x: &[f64]) -> f64 {
        (self.a)(x)
    }

    pub fn grad_a(&self, x: &[f64], out: &mut [f64]) {
        (self.grad_a)(x, out)
    }

    pub fn potential(&self, x: &[f64]) -> f64 {
        (self.potential)(x)
    }

    pub fn grad_potential(&self, x: &[f64], out: &mut [f64]) {
        (self.grad_potential)(x, out)
    }

    /// Compares the supplied gradients of `a` and `V` against central
    /// differences at `n_points` random interior points.
    pub fn check_gradients(&self, n_points: usize, seed: u64) -> Result<()> {
        let bbox = self.domain.bounding_box();
        let dim = bbox.dimension();
        let step = FD_RELATIVE_STEP * bbox.diameter();
        let fd_a = central_difference(self.a.clone(), step);
        let fd_v = central_difference(self.potential.clone(), step);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![0.0; dim];
        let mut supplied = vec![0.0; dim];
        let mut reference = vec![0.0; dim];
        let mut checked = 0;
        let mut attempts = 0;
        while checked < n_points {
            attempts += 1;
            if attempts > 1000 * n_points.max(1) {
                return Err(Error::Geometry(
                    "could not sample interior points for the gradient check".into(),
                ));
            }
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = rng.random_range(bbox.lower[i]..bbox.upper[i]);
            }
            if !self.domain.contains(&x) {
                continue;
            }
            checked += 1;
            for (name, grad, fd) in [
                ("a", &self.grad_a, &fd_a),
                ("V", &self.grad_potential, &fd_v),
            ] {
                grad(&x, &mut supplied);
                fd(&x, &mut reference);
                for (g, r) in supplied.iter().zip(&reference) {
                    if (g - r).abs() > GRADIENT_TOLERANCE * (1.0 + g.abs()) {
                        return Err(Error::Numerical(format!(
                            "grad {name} at {x:?} is {supplied:?}, finite differences give {reference:?}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_sde(&self) -> DriftDiffusionField {
        to_sde(self)
    }
}

/// Builds a problem with finite-difference gradients and a generic id.
pub fn make_problem(
    domain: Domain,
    a: ScalarField,
    potential: ScalarField,
) -> Result<EllipticProblem> {
    EllipticProblem::new("custom", domain, a, potential)
}

/// Drift `b = ∇a - ∇V` and noise scale `σ = sqrt(2a)` of the process generated by `-L`.
#[derive(Clone)]
pub struct DriftDiffusionField {
    dimension: usize,
    drift: VectorField,
    noise_scale: ScalarField,
}

impl fmt::Debug for DriftDiffusionField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DriftDiffusionField")
            .field("dimension", &self.dimension)
            .finish_non_exhaustive()
    }
}

impl DriftDiffusionField {
    /// Assembles a field from raw parts without checking `σ > 0`. Useful for
    /// degenerate test processes.
    pub fn from_parts(dimension: usize, drift: VectorField, noise_scale: ScalarField) -> Self {
        Self {
            dimension,
            drift,
            noise_scale,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn drift(&self, x: &[f64], out: &mut [f64]) {
        (self.drift)(x, out)
    }

    pub fn noise_scale(&self, x: &[f64]) -> f64 {
        (self.noise_scale)(x)
    }
}

pub fn to_sde(problem: &EllipticProblem) -> DriftDiffusionField {
    let grad_a = problem.grad_a.clone();
    let grad_v = problem.grad_potential.clone();
    let a = problem.a.clone();
    let drift: VectorField = Arc::new(move |x: &[f64], out: &mut [f64]| {
        let mut scratch = [0.0; MAX_DIM];
        let gv = &mut scratch[..out.len()];
        grad_a(x, out);
        grad_v(x, gv);
        for (o, g) in out.iter_mut().zip(gv.iter()) {
            *o -= g;
        }
    });
    let noise_scale: ScalarField = Arc::new(move |x: &[f64]| (2.0 * a(x)).sqrt());
    DriftDiffusionField {
        dimension: problem.dimension(),
        drift,
        noise_scale,
    }
}

fn central_difference(f: ScalarField, step: f64) -> VectorField {
    Arc::new(move |x: &[f64], out: &mut [f64]| {
        let mut scratch = [0.0; MAX_DIM];
        let probe = &mut scratch[..x.len()];
        probe.copy_from_slice(x);
        for i in 0..x.len() {
            probe[i] = x[i] + step;
            let forward = f(probe);
            probe[i] = x[i] - step;
            let backward = f(probe);
            probe[i] = x[i];
            out[i] = (forward - backward) / (2.0 * step);
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn interval_rejects_reversed_endpoints() {
        assert!(matches!(
            Domain::interval(1.0, 1.0),
            Err(Error::Geometry(_))
        ));
        assert!(matches!(
            Domain::interval(2.0, -1.0),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn disk_rejects_nonpositive_radius() {
        assert!(matches!(
            Domain::disk(0.0, [0.0, 0.0]),
            Err(Error::Geometry(_))
        ));
        assert!(matches!(
            Domain::disk(-1.0, [0.0, 0.0]),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn custom_domain_is_outside_beyond_its_box() {
        let bbox = BoundingBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let everywhere = Domain::custom(bbox, |_| true).unwrap();
        assert!(everywhere.contains(&[0.5, 0.5]));
        assert!(!everywhere.contains(&[1.5, 0.5]));
        assert_eq!(everywhere.boundary_distance(&[0.5, 0.5]), None);
    }

    #[test]
    fn nonpositive_diffusion_is_rejected() {
        let domain = Domain::interval(0.0, 1.0).unwrap();
        let err = make_problem(domain, scalar(|x| x[0] - 0.5), constant(0.0)).unwrap_err();
        assert!(matches!(err, Error::Ellipticity { .. }));
    }

    #[test]
    fn zero_potential_unit_diffusion_has_no_drift() {
        let domain = Domain::interval(0.0, 1.0).unwrap();
        let problem = make_problem(domain, constant(1.0), constant(0.0)).unwrap();
        let field = to_sde(&problem);
        let mut b = [1.0];
        field.drift(&[0.3], &mut b);
        assert_eq!(b[0], 0.0);
        assert_relative_eq!(field.noise_scale(&[0.3]), 2f64.sqrt());
    }

    #[test]
    fn half_diffusion_gives_unit_noise() {
        let domain = Domain::disk(1.0, [0.0, 0.0]).unwrap();
        let problem = make_problem(domain, constant(0.5), constant(0.0)).unwrap();
        let field = to_sde(&problem);
        let mut b = [1.0, 1.0];
        field.drift(&[0.1, -0.2], &mut b);
        assert_eq!(b, [0.0, 0.0]);
        assert_eq!(field.noise_scale(&[0.1, -0.2]), 1.0);
    }

    #[test]
    fn quadratic_potential_drift_from_finite_differences() {
        let domain = Domain::interval(-1.0, 1.0).unwrap();
        let problem = make_problem(domain, constant(1.0), scalar(|x| 0.5 * x[0] * x[0])).unwrap();
        let field = to_sde(&problem);
        for &x in &[-0.9, -0.2, 0.0, 0.4, 0.77] {
            let mut b = [0.0];
            field.drift(&[x], &mut b);
            assert!((b[0] + x).abs() < 1e-8, "drift({x}) = {}", b[0]);
        }
        problem.check_gradients(100, 7).unwrap();
    }

    #[test]
    fn inconsistent_gradient_is_detected() {
        let domain = Domain::interval(-1.0, 1.0).unwrap();
        let problem = EllipticProblem::with_gradients(
            "bad",
            domain,
            constant(1.0),
            zero_vector(),
            scalar(|x| 0.5 * x[0] * x[0]),
            vector(|x, out| out[0] = 2.0 * x[0]),
        )
        .unwrap();
        assert!(problem.check_gradients(20, 1).is_err());
    }

    #[test]
    fn grid_covers_box_corners() {
        let bbox = BoundingBox::new(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
        let grid = bbox.grid(3);
        assert_eq!(grid.len(), 9);
        assert!(grid.contains(&vec![-1.0, 0.0]));
        assert!(grid.contains(&vec![1.0, 2.0]));
        assert!(grid.contains(&vec![0.0, 1.0]));
    }
}
