use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("lex error at byte {offset}: {message}")]
pub struct LexError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at token {index}: expected {expected}, found {found}")]
pub struct ParseError {
    pub index: usize,
    pub expected: String,
    pub found: String,
}

/// Evaluation left the domain of one of the expression's nodes.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("domain error in `{node}` at s = {at}: {reason}")]
pub struct DomainError {
    pub node: String,
    pub at: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("curve is not admissible at s = {at}: {reason}")]
    NotAdmissible { at: f64, reason: String },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("invalid curve definition: {0}")]
    Invalid(String),
    #[error("parameter s = {at} is outside the curve range [{min}, {max}]")]
    OutOfRange { at: f64, min: f64, max: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("frame matrix is singular at s = {0}")]
    SingularFrame(f64),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("curvature and torsion are not constant on the grid (relative spread {kappa_spread:e} / {tau_spread:e})")]
    NonConstantInvariants { kappa_spread: f64, tau_spread: f64 },
    #[error("torsion {0} is too close to zero for the normal-curve closed form")]
    ZeroTorsion(f64),
    #[error("the rectifying statements need a rectifying verdict")]
    NotRectifying,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid invariant profile: {0}")]
    InvalidProfile(String),
    #[error("initial frame violates the Frenet invariants: {0}")]
    BadInitialFrame(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("torsion {0} is too close to zero for the normal-curve closed form")]
    ZeroTorsion(f64),
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("{path}: {source}")]
    Curve {
        path: String,
        #[source]
        source: CurveError,
    },
}
