use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("amplitudes are not normalized: |c0|^2 + |c1|^2 = {norm}")]
    NotNormalized { norm: f64 },

    #[error("{name} must be finite and {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("trace of matrix product has imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not a density operator: {0}")]
    NotDensity(String),

    #[error(
        "integration step {step} gives only {steps} steps over t = {t}; at least 1000 are required"
    )]
    StepTooLarge { step: f64, t: f64, steps: f64 },

    #[error("accumulated trace drift {drift:e} exceeds 1e-6; reduce the step")]
    TraceDrift { drift: f64 },

    #[error("quadrature did not converge: last panel doubling changed the result by {change:e}")]
    QuadratureNotConverged { change: f64 },

    #[error("efficiency ratio is undefined: corrected success probability is 1")]
    DegenerateDenominator,

    #[error("invalid grid for axis `{axis}`: {reason}")]
    InvalidGrid { axis: String, reason: &'static str },
}

pub(crate) fn require_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            requirement: ">= 0",
            value,
        })
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            requirement: "> 0",
            value,
        })
    }
}
