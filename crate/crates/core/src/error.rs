use thiserror::Error;

/// Errors produced by the radial laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("need at least {needed} grid nodes, got {got}")]
    InsufficientNodes { needed: usize, got: usize },

    #[error("value array has {got} entries but the grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("radius {0} is singular for this evaluation (r must be > 0)")]
    SingularRadius(f64),

    #[error("virtual dimension n = {n} must exceed the dimension d = {d}")]
    InvalidN { n: f64, d: usize },

    #[error("radius {r} lies outside the grid [{r_min}, {r_max}]")]
    OutOfGrid { r: f64, r_min: f64, r_max: f64 },

    #[error("radius {r} lies outside the profile range [0, {r_end}]")]
    OutOfRange { r: f64, r_end: f64 },

    #[error("warping function is not strictly concave at r = {0}")]
    WarpingNotConcave(f64),

    #[error("invalid warping function: {0}")]
    InvalidWarping(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("center value must be positive, got {0}")]
    NonpositiveEll(f64),

    #[error("exponent must exceed 1, got {0}")]
    InvalidExponent(f64),

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("solution blew up near r = {0}")]
    BlowupDetected(f64),

    #[error("step size underflow at r = {0}")]
    StepSizeUnderflow(f64),

    #[error("operation requires dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("the drift condition (e^-f psi^(d-1))' > 0 fails at r = {0}")]
    MonotonicityViolated(f64),

    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("profile is not positive at r = {0}")]
    NonpositiveU(f64),

    #[error("invalid branch: {0}")]
    InvalidBranch(String),

    #[error("q = {q} outside the admissible range [0, {max}]")]
    QOutOfRange { q: f64, max: f64 },

    #[error("profile is not L-superharmonic at r = {r} (L u = {value})")]
    SuperharmonicityViolated { r: f64, value: f64 },

    #[error("two evaluations of {what} disagree: {a} vs {b}")]
    IdentityMismatch { what: &'static str, a: f64, b: f64 },

    #[error("manifold was not produced by the explicit construction")]
    NotConstructed,
}

pub type Result<T> = std::result::Result<T, Error>;
