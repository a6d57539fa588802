use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate curve: discriminant {discriminant:e} is too close to zero")]
    DegenerateCurve { discriminant: f64 },
    #[error("no convergence in {context} (residual {residual:e})")]
    NoConvergence {
        context: &'static str,
        residual: f64,
    },
    #[error("argument is a lattice point (distance {distance:e})")]
    PoleAtLatticePoint { distance: f64 },
    #[error("point is not on the model (residual {residual:e})")]
    NotOnModel { residual: f64 },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("polynomial on line {line} is not homogeneous in factor {factor}")]
    InhomogeneousDegree { line: usize, factor: usize },
    #[error("polynomial on line {line} mixes affine and homogeneous coordinates")]
    MixedCoordinates { line: usize },
    #[error("variety has no equations")]
    EmptySystem,
    #[error("equation on line {line} is constant")]
    ConstantEquation { line: usize },
    #[error("dimension guard: 2g = {dim} exceeds the limit {limit}")]
    DimensionGuard { dim: usize, limit: usize },
    #[error("grid of {nodes} nodes exceeds the limit {limit}")]
    GridTooLarge { nodes: u128, limit: u128 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Errors caused by numerical breakdown rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}
