use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bodies P{0} and P{1} coincide")]
    CoincidentPoints(usize, usize),
    #[error("negative radicand {value:e} in {context}")]
    NegativeRadicand { context: &'static str, value: f64 },
    #[error("degenerate quadrilateral: area {area:e} below threshold")]
    DegenerateQuadrilateral { area: f64 },
    #[error("degenerate triangle P{}P{}P{}", .0[0], .0[1], .0[2])]
    DegenerateTriangle([usize; 3]),
    #[error("invalid masses: {0}")]
    InvalidMasses(String),
    #[error("gradient of the moment of inertia vanishes")]
    ZeroGradient,
    #[error("design matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("bodies collapsed: minimum distance {min_distance:e}")]
    DegenerateCollapse { min_distance: f64 },
    #[error("distances are not realizable: {0}")]
    NonRealizable(String),
    #[error("continuation broke after entry {last_good:?}: {cause}")]
    ContinuationBreak {
        last_good: Option<usize>,
        cause: Box<Error>,
    },
    #[error("configuration is not convex")]
    NotConvex,
    #[error("configuration is not planar")]
    NotPlanar,
    #[error("mass pattern matches no proposition")]
    NotApplicable,
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
