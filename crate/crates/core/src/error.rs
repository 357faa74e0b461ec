use thiserror::Error;

pub type Result<T> = std::result::Result<T, KappaError>;

#[derive(Debug, Error)]
pub enum KappaError {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("moment overflow while building Gauss rule (n = {n}); rescale the weight")]
    MomentOverflow { n: usize },

    #[error("multiplicity data not admissible: a + 2<k> + N - 2 = {0} <= 0")]
    NotAdmissible(f64),

    #[error("malformed symbolic input: {0}")]
    Malformed(String),

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("input not representable in retained modes (tail energy {tail:.3e})")]
    Truncation { tail: f64 },

    #[error("grid under-resolved: {0}")]
    Resolution(String),

    #[error("frequency support touches the split wall (margin {margin:.3e} < {required:.1e})")]
    SplitWall { margin: f64, required: f64 },

    #[error("point too close to a singular set: {0}")]
    Singular(String),

    #[error("did not converge: {0}")]
    NoConvergence(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
