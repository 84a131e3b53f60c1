use alloc::string::String;

/// Errors raised by the kinematic, constitutive, element and fitting layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("singular deformation: det F = {det}")]
    SingularDeformation { det: f64 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("inconsistent invariants: {0}")]
    InconsistentInvariant(String),

    #[error("argument {x} outside the domain of the principal Lambert W branch")]
    LambertDomain { x: f64 },

    #[error("activation solve failed: {reason} (chi* = {chi:?}, residual = {residual:?})")]
    ActivationSolve {
        reason: String,
        chi: Option<f64>,
        residual: Option<f64>,
    },

    #[error("unphysical activation level {omega}; the active deformation gradient is singular")]
    UnphysicalActivation { omega: f64 },

    #[error("no sign change of the response on [{lo}, {hi}]")]
    RootNotFound { lo: f64, hi: f64 },

    #[error("element inverted: det J = {det} at Gauss point {gauss_point}")]
    ElementInversion { det: f64, gauss_point: usize },

    #[error("Newton iteration did not converge at step {step} (residual {residual:e})")]
    NonConvergence { step: usize, residual: f64 },

    #[error("model evaluation failed at point {index} of dataset {dataset}: {reason}")]
    Residual {
        dataset: usize,
        index: usize,
        reason: String,
    },

    #[error("relative error undefined for an all-zero reference vector")]
    UndefinedMeasure,

    #[error("singular linear system")]
    SingularMatrix,
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ActivationSolve { .. }
                | Error::RootNotFound { .. }
                | Error::ElementInversion { .. }
                | Error::NonConvergence { .. }
                | Error::SingularMatrix
                | Error::UnphysicalActivation { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
