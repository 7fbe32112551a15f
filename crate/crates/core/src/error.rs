use num_complex::Complex64;
use thiserror::Error;

/// Errors surfaced by the graph, solver, and matrix pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no simple graph found within {tries} configuration draws")]
    RetryExhausted { tries: usize },

    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    #[error("radius scales collapsed (R={big_r}, r={r}, ell={ell}); supply explicit overrides")]
    ScaleCollapse { big_r: usize, r: usize, ell: usize },

    #[error("no directed edge lies entirely outside the ball")]
    EmptyComplement,

    #[error("switching data inconsistent with graph: {0}")]
    InconsistentData(String),

    #[error("branch ambiguity at z={z}, w={w}: {detail}")]
    BranchAmbiguity {
        z: Complex64,
        w: Complex64,
        detail: String,
    },

    #[error("tracked root has non-positive imaginary part at z={z}, w={w}")]
    NonHerglotz { z: Complex64, w: Complex64 },

    #[error("denominator z + d/(d-1) m_infty degenerate (|.| = {magnitude:.3e})")]
    DegenerateDenominator { magnitude: f64 },

    #[error("size overflow: {0}")]
    SizeOverflow(String),

    #[error("deficit out of range at vertex {vertex}")]
    DeficitOutOfRange { vertex: usize },

    #[error("matrix is numerically singular")]
    SingularMatrix,

    #[error("singular 2x2 pivot in tree recursion at depth {depth}")]
    SingularPivot { depth: usize },

    #[error("singular 2x2 pivot block at vertex {vertex}")]
    SingularBlock { vertex: usize },

    #[error("graph is not a tree (excess > 0)")]
    NotATree,

    #[error("eigensolver failed (lapack info = {info})")]
    EigFailure { info: i32 },

    #[error("grid too coarse: estimated quadrature error {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    GridTooCoarse { estimate: f64, tolerance: f64 },

    #[error("lapack routine {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },
}

pub type Result<T> = std::result::Result<T, Error>;
