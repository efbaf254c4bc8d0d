use thiserror::Error;

/// Errors produced by the exact kernel, the q-function layer and the
/// deformation/orthogonal-polynomial pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error("singular matrix")]
    SingularMatrix,

    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A deformation step hit a vanishing denominator or an unsolvable gauge.
    #[error("step {tag} failed: {reason}")]
    Step { tag: String, reason: String },

    #[error("moment problem degenerate: Delta_{0} vanishes")]
    MomentDegeneracy(usize),

    /// Two independent evaluation routes disagreed beyond the allowed tolerance.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn step(tag: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Step {
            tag: tag.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
