use thiserror::Error;

/// Crate-wide error type.
///
/// `Structural` covers malformed input, dimension mismatches and unusable
/// configurations; `Validation` is a failed mathematical axiom on a named
/// object, always carrying a witness. A failed *check* inside a task (for
/// example a quasi-isomorphism test coming back false) is not an error; it
/// is reported through verdicts.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Structural(String),
    #[error("validation failed for {object}: {axiom} ({witness})")]
    Validation { object: String, axiom: String, witness: String },
}

impl Error {
    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub fn validation(
        object: impl Into<String>,
        axiom: impl Into<String>,
        witness: impl Into<String>,
    ) -> Self {
        Error::Validation { object: object.into(), axiom: axiom.into(), witness: witness.into() }
    }
}
