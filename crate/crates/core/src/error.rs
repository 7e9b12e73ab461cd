//! Error type shared by all engine modules.

/// Errors reported by the simulation engine.
///
/// `+∞` is *not* an error anywhere in this crate: a flat posterior legally has
/// infinite Holevo variance. Errors are reserved for misuse (bad arguments),
/// structural impossibilities (zero-probability outcomes), and resource
/// bounds (moment capacity, enumeration size).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A Bayesian update would need harmonics beyond the allocated degree.
    #[error(
        "moment capacity exceeded: degree in use {degree_used} + pass count {p} \
         > max degree {max_degree}"
    )]
    Capacity {
        degree_used: usize,
        p: u32,
        max_degree: usize,
    },

    /// Conditioning on an outcome whose marginal probability is zero.
    #[error("impossible outcome: posterior normalization is zero")]
    ImpossibleOutcome,

    /// The circular-mean estimate is undefined because sharpness is zero.
    #[error("estimate undefined: first trigonometric moment vanishes")]
    UndefinedEstimate,

    /// Exact enumeration was asked for more photons than the branch bound.
    #[error("enumeration bound exceeded: {photons} photons > {max} (2^{max} branches)")]
    BranchBound { photons: u32, max: u32 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
