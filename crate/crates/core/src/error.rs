use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("model file, line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("coefficient vector vanishes near p = {p:.6} (norm {norm:.3e})")]
    DegenerateField { p: f64, norm: f64 },

    #[error("operation requires a canonical (normalized and centered) field")]
    NotCanonical,

    #[error("operation requires a 2π-periodic field; the centered field carries a Berry phase")]
    NonPeriodicField,

    #[error("S(p, q) vanishes at p = {p:.6}, q = {q:.6}; the Lagrangian has a branch point there")]
    BranchPoint { p: f64, q: f64 },

    #[error("(p, q) = ({p:.6}, {q:.6}) is not a parallel point (Re L = {re_l:.3e})")]
    NotParallel { p: f64, q: f64, re_l: f64 },

    #[error("K(p) is numerically singular at p = {p:.9} (condition estimate {cond:.3e})")]
    NearSingular { p: f64, cond: f64 },

    #[error("phase unwrapping did not converge within depth {max_depth} near p = {p:.9}")]
    NonConvergent { p: f64, max_depth: usize },

    #[error("unwrapped phase is {turns:.4} turns, too far from an integer")]
    Inconsistent { turns: f64 },

    #[error("a root of det K lies on the unit circle (|s| = {modulus:.12})")]
    RootOnCircle { modulus: f64 },

    #[error("polynomial degree {degree} exceeds the root-counting limit {limit}")]
    DegreeTooLarge { degree: usize, limit: usize },

    #[error("matrix is ill-conditioned (condition estimate {cond:.3e})")]
    IllConditioned { cond: f64 },

    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,

    #[error("multicritical point near t = {t:.6} (Hessian trace {trace:.3e})")]
    MulticriticalPoint { t: f64, trace: f64 },

    #[error("curve starting at ({p:.6}, {q:.6}) failed to close: {reason}")]
    NonClosure { p: f64, q: f64, reason: String },

    #[error("curve refinement failed at ({p:.6}, {q:.6})")]
    RefinementFailed { p: f64, q: f64 },

    #[error("b(p) vanishes at p = {p:.6}")]
    PoleEncountered { p: f64 },

    #[error("{excluded} of {samples} realizations failed, above the 1% limit")]
    TooManyExclusions { excluded: usize, samples: usize },

    #[error("realization {index}: winding {primary} disagrees with oracle value {oracle}")]
    OracleMismatch { index: u64, primary: i64, oracle: i64 },

    #[error("configuration mismatch: {0}")]
    MismatchedConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
