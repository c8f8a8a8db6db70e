// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Degenerate or inconsistent domain geometry.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// The diffusion coefficient is not uniformly positive.
    #[error("ellipticity error: a({point:?}) = {value} is not positive")]
    Ellipticity { point: Vec<f64>, value: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    /// The censoring horizon or the bisection bracket is too short for the request.
    #[error("horizon error: {0}")]
    Horizon(String),

    #[error("argument error: {0}")]
    Argument(String),

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}
