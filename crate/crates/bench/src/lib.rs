// SPDX-License-Identifier: Apache-2.0

//! Shared fixtures for the benchmarks.

use exitq::{to_sde, DriftDiffusionField, EllipticProblem, Preset, SimConfig};

/// A preset problem together with its simulation field.
pub struct Fixture {
    pub problem: EllipticProblem,
    pub field: DriftDiffusionField,
    pub start: Vec<f64>,
}

impl Fixture {
    pub fn new(preset: Preset) -> Self {
        let problem = preset.problem();
        let field = to_sde(&problem);
        Self {
            problem,
            field,
            start: preset.symmetric_start(),
        }
    }

    /// `n_paths` paths at step `dt` with a generous horizon.
    pub fn config(&self, n_paths: usize, dt: f64) -> SimConfig {
        SimConfig::new(dt, 10.0, n_paths, 1, self.start.clone())
    }
}
