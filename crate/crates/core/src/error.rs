use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("parameter `{field}` = {value} is out of range ({expected})")]
    Domain {
        field: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("unknown variable name `{0}`")]
    UnknownVariable(String),

    /// A conditional mutual information came out below `-NEG_TOL`. This means the
    /// rank reduction missed a dependency; it is never channel physics.
    #[error("conditional mutual information evaluated to {value} bits (below -{tolerance})")]
    NegativeInformation { value: f64, tolerance: f64 },

    #[error("enumeration grid of {cells} cells exceeds the limit of {limit}")]
    GridTooLarge { cells: u128, limit: u128 },

    #[error("operation requires a nonempty frontier")]
    EmptyFrontier,

    #[error("invalid search configuration: {0}")]
    Config(String),
}

/// Checks `lo <= value <= hi` (and finiteness), naming the field on failure.
pub(crate) fn check_range(field: &'static str, value: f64, lo: f64, hi: f64, expected: &'static str) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::Domain { field, value, expected })
    }
}
