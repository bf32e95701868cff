use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid polynomial literal: {0}")]
    InvalidPolynomial(String),

    #[error("bivector is not antisymmetric at entry ({i}, {j})")]
    NotAntisymmetric { i: usize, j: usize },

    #[error(
        "odd numerical rank {rank} at {point:?}; the rank threshold straddles a singular value"
    )]
    OddRank { rank: usize, point: Vec<f64> },

    #[error(
        "path is not tangent to the symplectic foliation at t = {time}: lift residual {residual:e}"
    )]
    NotLeafTangent { time: f64, residual: f64 },

    #[error("cotangent condition violated: residual {residual:e} exceeds {tolerance:e}")]
    CotangentViolation { residual: f64, tolerance: f64 },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("reparameterization is not orientation preserving at s = {at}")]
    NonMonotone { at: f64 },

    #[error("path endpoints do not match: gap {gap:e}")]
    EndpointMismatch { gap: f64 },

    #[error("rank of the bivector changed from {from} to {to} at t = {time}")]
    RankChange { time: f64, from: usize, to: usize },

    #[error("flow endpoint drifted by {drift:e} (limit {limit:e})")]
    Drift { drift: f64, limit: f64 },

    #[error("extension perturbation is not kernel valued at t = {time}: |sharp| = {residual:e}")]
    KernelViolation { time: f64, residual: f64 },

    #[error("covector field is not closed: d beta has coefficient {defect:e}")]
    NotClosed { defect: f64 },

    #[error("flow blew up at t = {time}")]
    BlowUp { time: f64 },

    #[error("invalid Lie algebra: {0}")]
    InvalidLieAlgebra(String),

    #[error("principal logarithm undefined: eigenvalue {re} + {im}i is on the closed negative real axis")]
    LogDomain { re: f64, im: f64 },

    #[error("manifest: {0}")]
    Manifest(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
