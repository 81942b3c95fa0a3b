use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("non-finite value in {op}")]
    NonFinite { op: &'static str },

    #[error("invalid tolerance {name} = {value}: must be strictly positive and finite")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("QR iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("matrix is numerically singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("spectrum not real: eigenvalue {re} {sign} {abs_im}i exceeds the reality threshold", sign = if *im < 0.0 { "-" } else { "+" }, abs_im = im.abs())]
    SpectrumNotReal { re: f64, im: f64 },

    #[error("degenerate spectrum: eigenvalues {a} and {b} are closer than the gap threshold")]
    Degenerate { a: f64, b: f64 },

    #[error("series truncation requires {required} terms, cap is {cap}")]
    Truncation { required: usize, cap: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    /// Errors caused by a Hamiltonian outside the biorthogonal framework.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::SpectrumNotReal { .. } | Error::Degenerate { .. })
    }

    pub(crate) fn dim(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Dimension {
            op,
            detail: detail.into(),
        }
    }
}
