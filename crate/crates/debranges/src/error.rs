use thiserror::Error;

/// Error type shared by all modules of this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter is outside the admissible range (e.g. `nu <= -1`).
    #[error("domain error: {0}")]
    Domain(String),

    /// Power series did not pass the term ratio test within the term budget.
    #[error("series did not converge after {terms} terms (|z| = {abs_z})")]
    NonConvergence { terms: usize, abs_z: f64 },

    /// `C = B/A` was requested too close to a real zero of `A`.
    #[error("pole proximity in C = B/A: |A| = {abs_a:.3e} < {guard:.1e} * |B| = {abs_b:.3e}")]
    PoleProximity { abs_a: f64, abs_b: f64, guard: f64 },

    /// An iterative scheme (Newton, Jacobi sweeps, inverse iteration) stalled.
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    /// The sign scan found no bracket for the first root.
    #[error("no root found on the scan interval (min |g| = {min_abs_g:.3e}, step = {scan_step:.3e})")]
    NoRootFound { scan_step: f64, min_abs_g: f64 },

    /// A provably real quantity came out with a large imaginary part.
    #[error("imaginary residual too large: |Im| = {residual:.3e} exceeds {limit:.3e}")]
    ImagResidualTooLarge { residual: f64, limit: f64 },

    /// Condition estimate above the configured bound.
    #[error("matrix is ill-conditioned (estimate {estimate:.3e})")]
    IllConditioned { estimate: f64 },

    /// `W(lambda0)` has no numerical kernel; `lambda0` is likely inaccurate.
    #[error("no kernel vector: smallest singular value ratio {sigma_ratio:.3e} exceeds {limit:.1e}")]
    KernelNotFound { sigma_ratio: f64, limit: f64 },

    /// The Galerkin constraint matrix lost rank.
    #[error("constraint matrix rank {rank} < {expected}")]
    ConstraintRankDeficient { rank: usize, expected: usize },

    /// Two-grid extrapolation disagreement above threshold.
    #[error("finite-difference grids disagree by {disagreement:.3e} (limit {limit:.3e})")]
    GridTooCoarse { disagreement: f64, limit: f64 },

    /// The requested exponent gap is not a positive integer.
    #[error("exponent gap {gap} is not a positive integer")]
    NonIntegerGap { gap: f64 },

    /// The delta-majorant constant is only known for even dimension.
    #[error("dimension {d} is odd; the sharp delta-majorant constant is only known for even d")]
    OddDimension { d: u32 },

    /// Construction-time validation failed; lists every violated invariant.
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    /// A verified mathematical property does not hold numerically.
    #[error("property violation: {0}")]
    PropertyViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
