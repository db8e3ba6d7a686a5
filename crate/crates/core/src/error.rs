use thiserror::Error;

pub type Result<T, E = KernelError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("argument error: {0}")]
    Argument(String),

    #[error("parity error: {0}")]
    Parity(String),

    #[error("truncation error: total degree {degree} exceeds the bound D = {bound}")]
    Truncation { degree: u32, bound: u32 },

    #[error("unsupported center: {0}")]
    UnsupportedCenter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
}

impl KernelError {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        KernelError::Argument(msg.into())
    }

    /// Short machine-readable code used in reports and by the C interface.
    pub fn code(&self) -> &'static str {
        match self {
            KernelError::Argument(_) => "argument",
            KernelError::Parity(_) => "parity",
            KernelError::Truncation { .. } => "truncation",
            KernelError::UnsupportedCenter(_) => "unsupported-center",
            KernelError::Domain(_) => "domain",
            KernelError::Precondition(_) => "precondition",
            KernelError::UnsupportedModel(_) => "unsupported-model",
        }
    }
}
