use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("context mismatch")]
    ContextMismatch,
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("negative power {0}")]
    NegativePower(i64),
    #[error("division by a non-unit")]
    NonUnitDivision,
    #[error("polynomial has negative x-order and is not over R")]
    NotOverR,
    #[error("zero polynomial has no deficiency")]
    ZeroInput,
    #[error("missing image for variable {0}")]
    MissingImage(usize),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("weight vector has length {got}, expected {expected}")]
    WeightLength { expected: usize, got: usize },
    #[error("weight vector {0} is not natural")]
    NotNatural(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("witness not in A_tau: {0}")]
    WitnessNotInATau(String),
    #[error("y-image not integral: {0}")]
    YImageNotIntegral(String),
    #[error("generator {0} is not a z-elementary")]
    NonElementaryGenerator(usize),
    #[error("membership violation: {0}")]
    MembershipViolation(String),
    #[error("not in IA^tau: {0}")]
    NotInIATau(String),
    #[error("conjugate escapes IA^tau: {0}")]
    ConjugateEscapesIATau(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("incomparable weights: {0}")]
    IncomparableWeights(String),
    #[error("hypothesis violation at stage {stage}: {msg}")]
    HypothesisViolation { stage: usize, msg: String },
    #[error("alpha not in IA^sigma_0: {0}")]
    AlphaNotInIASigma0(String),
    #[error("elementary {index} not in EA^sigma: {msg}")]
    ElementaryNotInEASigma { index: usize, msg: String },
    #[error("jacobian determinant is not a nonzero constant: {0}")]
    JacobianNotUnit(String),
    #[error("split failure: {0}")]
    SplitFailure(String),
    #[error("rho(tau) is not natural: {0}")]
    RhoTauNotNatural(String),
    #[error("pattern mismatch: {0}")]
    PatternMismatch(String),
    #[error("rank-one weight gap expected: {0}")]
    GapNotRankOne(String),
    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
    #[error("rewrite loop did not terminate: {0}")]
    NonTermination(String),
    #[error("Q not in A_sigma_0: {0}")]
    QNotInASigma0(String),
    #[error("expansion exceeds the term limit: {0}")]
    ExpressionSwell(String),
    #[error("serialization: {0}")]
    Serialization(String),
    #[error("rewrite at position {position}: {source}")]
    AtPosition {
        position: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, position: usize) -> Error {
        match self {
            e @ Error::AtPosition { .. } => e,
            e => Error::AtPosition {
                position,
                source: Box::new(e),
            },
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
