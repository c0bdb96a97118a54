use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The extremum of interest sits on the edge of the evaluated grid.
    #[error("boundary error: {0}")]
    Boundary(String),

    #[error("fit failed: {reason} (residuals: {residuals:?})")]
    FitFailure { reason: String, residuals: Vec<f64> },

    #[error("no echo detected: correlation peak {peak:.3e} below threshold {threshold:.3e}")]
    NoEcho { peak: f64, threshold: f64 },

    #[error("insufficient excitation: {0}")]
    InsufficientExcitation(String),

    /// Quadrature is too coarse for the requested wavelength.
    #[error("refinement required: {0}")]
    Refinement(String),

    #[error("internal numerical error: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn check_frequency(f: f64) -> Result<()> {
    if !f.is_finite() || f <= 0.0 {
        return domain(format!("frequency must be finite and positive, got {f}"));
    }
    Ok(())
}
