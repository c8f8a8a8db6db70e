// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::expr::ExprError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("expression: {0}")]
    Expression(#[from] ExprError),
    #[error(transparent)]
    Core(#[from] exitq::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status: 2 for configuration problems, 3 for horizon
    /// (censoring) failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use exitq::Error as E;
        match self {
            CliError::Config(_) | CliError::Expression(_) => 2,
            CliError::Core(E::Horizon(_)) => 3,
            CliError::Core(
                E::Geometry(_)
                | E::Ellipticity { .. }
                | E::Configuration(_)
                | E::Argument(_)
                | E::UnsupportedDimension(_)
                | E::UnknownPreset(_),
            ) => 2,
            CliError::Core(E::Numerical(_)) | CliError::Io(_) => 1,
        }
    }
}
