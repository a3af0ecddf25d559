use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension {k} out of range (allowed {min}..={max})")]
    DimensionOutOfRange { k: usize, min: usize, max: usize },

    #[error("complex has no {k}-simplices")]
    EmptyDimension { k: usize },

    #[error("vertex set {0} is not a simplex of the complex")]
    NotASimplex(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no nonzero eigenvalue")]
    NoNonzeroEigenvalue,

    #[error("{0} Laplacian is zero, no spectral gap to threshold at")]
    ZeroLaplacian(&'static str),

    #[error("operator-product and combinatorial Laplacians disagree by {0:e}")]
    LaplacianMismatch(f64),

    #[error("Betti number from nullity ({nullity}) disagrees with rank formula ({rank_formula})")]
    BettiMismatch { nullity: usize, rank_formula: usize },

    #[error("complexes are not nested: {0}")]
    NotNested(String),

    #[error("negative probability {value:e} in row {row}")]
    NegativeProbability { row: usize, value: f64 },

    #[error("simplex {0} has no cofaces")]
    DegreeZero(String),

    #[error("infeasible rectangle parameters: {0}")]
    InfeasiblePolynomial(String),

    #[error("polynomial certification failed: {0}")]
    CertificationFailed(String),

    #[error("singular value {value} lies in the forbidden band ({lo}, {hi})")]
    GapViolation { value: f64, lo: f64, hi: f64 },

    #[error("promise violated: {0}")]
    PromiseViolation(String),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("outcome probability is numerically zero")]
    ZeroProbability,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::GapViolation { .. } | Error::PromiseViolation(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
