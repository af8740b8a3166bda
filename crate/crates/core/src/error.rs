use thiserror::Error;

/// Errors raised by the analysis library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenfordError {
    /// An argument fell outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A frequency vector violated one of its invariants.
    #[error("invalid frequency data: {0}")]
    InvalidFrequencies(String),

    /// A scan or sampler configuration is inconsistent with the data.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Exhaustive permutation enumeration was requested for too many sites.
    #[error(
        "exhaustive ordering search over {n} sites exceeds the limit of {max} \
         ({n}! orderings); use sampled orderings or raise the limit"
    )]
    SearchSpaceTooLarge { n: usize, max: usize },
}

pub type Result<T, E = BenfordError> = std::result::Result<T, E>;
