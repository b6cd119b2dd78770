use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Argument sits on (or within tolerance of) a pole.
    #[error("pole: {0}")]
    Pole(String),
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An integrand produced a non-finite value at a quadrature node.
    #[error("non-finite integrand value at node {index}: {detail}")]
    Evaluation { index: usize, detail: String },
    /// A kernel evaluated to a non-finite value on a node pair.
    #[error("kernel singular at node pair ({row}, {col})")]
    Singularity { row: usize, col: usize },
    /// The tail beyond a truncated contour is not negligible.
    #[error("truncation: tail estimate {tail:e} exceeds tolerance {tolerance:e} at T = {truncation}")]
    Truncation { tail: f64, tolerance: f64, truncation: f64 },
    /// Problem size beyond what the operation supports.
    #[error("size error: {0}")]
    Size(String),
    /// Parameters coincide too closely for the residue basis.
    #[error("tie error: minimal spacing {0:e} between parameters after perturbation")]
    Tie(f64),
    /// Coincident points in a Cauchy-type determinant.
    #[error("degenerate points: {0}")]
    Degenerate(String),
    /// A complex result that should be real carries a large imaginary part.
    #[error("convergence failure: {0}")]
    Convergence(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of a numerical scheme as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Truncation { .. } | Error::Convergence(_) | Error::Singularity { .. } | Error::Evaluation { .. }
        )
    }
}
