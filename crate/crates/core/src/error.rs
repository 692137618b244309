use thiserror::Error;

/// Errors raised by the numerical models and the simulators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// An input lies outside the domain of the formula.
    #[error("domain error: {0}")]
    Domain(String),
    /// A scenario is missing a value that the requested computation needs.
    #[error("configuration error: {0}")]
    Config(String),
    /// A named field of a domain object breaks its invariant.
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    /// The request exceeds what the simulator can hold in memory.
    #[error("resource error: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn domain(msg: impl Into<String>) -> ModelError {
    ModelError::Domain(msg.into())
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(domain(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

pub(crate) fn ensure_non_negative(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(domain(format!(
            "{name} must be non-negative and finite, got {value}"
        )))
    }
}

pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> ModelError {
    ModelError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

pub(crate) fn check_positive_field(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(
            field,
            format!("must be positive and finite, got {value}"),
        ))
    }
}
