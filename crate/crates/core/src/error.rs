use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unbounded Wulff shape")]
    UnboundedWulff,
    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },
    #[error("q out of range: {0} (q must be >= 1)")]
    QOutOfRange(f64),
    #[error("F domain: {0} is outside the domain of F")]
    FDomain(f64),
    #[error("degenerate F derivative")]
    DegenerateFDerivative,
    #[error("perturbation too large")]
    PerturbationTooLarge,
    #[error("degenerate target")]
    DegenerateTarget,
    #[error("target measure is not even")]
    NotEven,
    #[error("stalled: line search found no ascent after {0} halvings")]
    Stalled(usize),
    #[error("1-homogeneous unsupported")]
    OneHomogeneous,
    #[error("concavity hypothesis unmet: {0}")]
    ConcavityHypothesis(String),
    #[error("normal-set mismatch: target atom {0} is not a normal of the body")]
    NormalMismatch(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn invalid(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Invalid {
            path: path.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
