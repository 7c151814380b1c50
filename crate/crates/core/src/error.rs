use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Argument and domain errors.
///
/// Estimation failures that can legitimately happen on valid input (a sample
/// ratio outside the range of the Laplace transform, say) are not errors; they
/// are carried in [`crate::EstimateStatus`] so that replicate batches can
/// count them.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{name} must be {constraint} (got {value})")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },

    #[error("Laplace transform argument must be positive (got {0})")]
    Domain(f64),

    #[error("cannot invert the Laplace transform at {0}: value must lie in (0, 1)")]
    Inversion(f64),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("non-uniform times: spacing {found} at index {index} differs from {expected}")]
    NonUniformTimes {
        index: usize,
        expected: f64,
        found: f64,
    },

    #[error("invalid bounds: {name} lower bound {lo} must be below upper bound {hi}")]
    InvalidBounds { name: &'static str, lo: f64, hi: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, constraint: &'static str, value: f64) -> Self {
        Error::InvalidParameter {
            name,
            constraint,
            value,
        }
    }
}
