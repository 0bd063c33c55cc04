use thiserror::Error;

/// Errors raised by the solvers. Numeric payloads are stored as `f64` so the
/// type does not depend on the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid unit cell: {0}")]
    InvalidCell(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("weight table does not cover x = {x}")]
    Interpolation { x: f64 },
    #[error("infinite-domain kernel is singular at omega = 0")]
    SingularKernel,
    #[error("singular matrix (reciprocal condition estimate {rcond:e})")]
    SingularMatrix { rcond: f64 },
    #[error("exceptional point: transfer-matrix eigenvalues coincide (trace/2 = {half_trace_re} + {half_trace_im}i)")]
    ExceptionalPoint { half_trace_re: f64, half_trace_im: f64 },
    #[error("degenerate Floquet basis at omega = {omega}: {reason}")]
    DegenerateBasis { omega: f64, reason: String },
    #[error("rank-deficient averaged kinematics (relative determinant {rel_det:e}); use the ±zeta extraction for de-phased weights")]
    RankDeficient { rel_det: f64 },
    #[error("ill-conditioned ratio: {0}")]
    IllConditioned(String),
    #[error("retrieval inconsistent: {0}")]
    RetrievalInconsistent(String),
    #[error("infinite impedance: chi ∓ i zeta K vanishes")]
    InfiniteImpedance,
}

pub type Result<T> = std::result::Result<T, Error>;
