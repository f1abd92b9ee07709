use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The closed-form genie parameters do not exist for this channel.
    #[error("certificate unavailable: {0}")]
    CertificateUnavailable(String),

    /// A region's constraints admit no rate pair. Valid bounds never produce
    /// this, so seeing it means an upstream computation is wrong.
    #[error("empty region: {0}")]
    EmptyRegion(String),

    /// The requested search would exceed the configured size limits.
    #[error("search too large: {0}")]
    TooLarge(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
