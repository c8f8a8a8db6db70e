// SPDX-License-Identifier: Apache-2.0

//! Named problems with known principal eigenvalues.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{constant, scalar, vector, zero_vector, Domain, EllipticProblem};
use crate::reference::bessel::J0_FIRST_ZERO;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// `-u'' = λu` on (0, 1); λ₁ = π².
    Interval01,
    /// `-u'' + x u' = λu` on (-1, 1); λ₁ = 2 with ground state `1 - x²`.
    OuInterval,
    /// `-½Δu = λu` on the unit disk (standard Brownian motion); λ₁ = j₀,₁²/2.
    DiskBm,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Interval01, Preset::OuInterval, Preset::DiskBm];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Interval01 => "interval01",
            Preset::OuInterval => "ou-interval",
            Preset::DiskBm => "disk-bm",
        }
    }

    pub fn problem(self) -> EllipticProblem {
        let built = match self {
            Preset::Interval01 => EllipticProblem::with_gradients(
                self.name(),
                Domain::interval(0.0, 1.0).expect("valid interval"),
                constant(1.0),
                zero_vector(),
                constant(0.0),
                zero_vector(),
            ),
            Preset::OuInterval => EllipticProblem::with_gradients(
                self.name(),
                Domain::interval(-1.0, 1.0).expect("valid interval"),
                constant(1.0),
                zero_vector(),
                scalar(|x| 0.5 * x[0] * x[0]),
                vector(|x, out| out[0] = x[0]),
            ),
            Preset::DiskBm => EllipticProblem::with_gradients(
                self.name(),
                Domain::disk(1.0, [0.0, 0.0]).expect("valid disk"),
                constant(0.5),
                zero_vector(),
                constant(0.0),
                zero_vector(),
            ),
        };
        built.expect("preset coefficients are uniformly elliptic")
    }

    /// Exact principal eigenvalue.
    pub fn reference_lambda1(self) -> f64 {
        match self {
            Preset::Interval01 => PI * PI,
            Preset::OuInterval => 2.0,
            Preset::DiskBm => 0.5 * J0_FIRST_ZERO * J0_FIRST_ZERO,
        }
    }

    /// Point where the ground state peaks, by symmetry.
    pub fn symmetric_start(self) -> Vec<f64> {
        match self {
            Preset::Interval01 => vec![0.5],
            Preset::OuInterval => vec![0.0],
            Preset::DiskBm => vec![0.0, 0.0],
        }
    }

    /// Ground state normalized to sup-norm 1.
    pub fn ground_state(self, x: &[f64]) -> f64 {
        match self {
            Preset::Interval01 => (PI * x[0]).sin(),
            Preset::OuInterval => 1.0 - x[0] * x[0],
            Preset::DiskBm => crate::reference::bessel::j0(J0_FIRST_ZERO * x[0].hypot(x[1])),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::to_sde;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn names_round_trip() {
        for preset in Preset::ALL {
            assert_eq!(preset.name().parse::<Preset>().unwrap(), preset);
        }
        assert!(matches!(
            "square".parse::<Preset>(),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn preset_gradients_are_consistent() {
        for preset in Preset::ALL {
            preset.problem().check_gradients(100, 11).unwrap();
        }
    }

    #[test]
    fn ou_drift_is_minus_x() {
        let field = to_sde(&Preset::OuInterval.problem());
        for &x in &[-0.5, 0.0, 0.2, 0.9] {
            let mut b = [0.0];
            field.drift(&[x], &mut b);
            assert_eq!(b[0], -x);
            assert_eq!(field.noise_scale(&[x]), 2f64.sqrt());
        }
    }

    #[test]
    fn membership_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let interval = Preset::OuInterval.problem();
        let disk = Preset::DiskBm.problem();
        for _ in 0..100_000 {
            let x: f64 = rng.random_range(-2.0..2.0);
            assert_eq!(interval.domain().contains(&[x]), -1.0 < x && x < 1.0);
            let y: f64 = rng.random_range(-2.0..2.0);
            assert_eq!(disk.domain().contains(&[x, y]), x * x + y * y < 1.0);
        }
    }
}
