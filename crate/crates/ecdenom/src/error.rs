use thiserror::Error;

/// Errors shared across the crate.
///
/// Variants split into two groups, mirrored by the CLI exit codes: bad input
/// (rejected before any computation runs) and internal invariant violations
/// (a postcondition failed mid-computation, which should never happen for
/// valid inputs).
#[derive(Debug, Error)]
pub enum Error {
    #[error("curve is singular: discriminant is zero")]
    SingularCurve,

    #[error("point does not satisfy the curve equation")]
    NotOnCurve,

    #[error("the point at infinity has no denominator")]
    InfinityHasNoDenominator,

    #[error("malformed point: {0}")]
    MalformedPoint(String),

    #[error("factoring budget exhausted on a {digits}-digit composite")]
    FactoringTimeout { digits: usize },

    #[error("basis generates only the point at infinity (rank 0, trivial torsion)")]
    EmptyBasis,

    #[error("generator {index} is a torsion point (order {order})")]
    TorsionGenerator { index: usize, order: u32 },

    #[error("fewer than 3 usable samples in the requested range")]
    InsufficientData,

    #[error("census contains no records")]
    EmptyCensus,

    #[error("generator {index} is not on the curve")]
    GeneratorNotOnCurve { index: usize },

    #[error("invalid curve input: {0}")]
    Parse(String),

    #[error("internal invariant violation: {0}")]
    Internal(String),
}

impl Error {
    /// True when the error indicates bad user input rather than a broken
    /// internal postcondition. The CLI maps these to exit code 1, everything
    /// else to 2.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Internal(_) | Error::MalformedPoint(_))
    }
}
