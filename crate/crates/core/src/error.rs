use alloc::string::String;

/// Errors raised by the kernels. Every variant carries a short message naming
/// the offending argument.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// The result is not representable (integer overflow, lost precision).
    #[error("range error: {0}")]
    Range(String),
    /// The requested computation exceeds its configured work cap.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// Two inputs that must agree do not.
    #[error("mismatch: {0}")]
    Mismatch(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => {
        $crate::Error::Domain(alloc::format!($($arg)*))
    };
}
pub(crate) use domain;
