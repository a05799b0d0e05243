use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid tensor legs: {0}")]
    Legs(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("resonance: {0}")]
    Resonance(String),
    #[error("argument on a pole: {0}")]
    Pole(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("all {0} candidate samples were rejected by the pole filter")]
    NoSamples(usize),
    #[error("no certificate: {0}")]
    NoCertificate(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, DynError>;
