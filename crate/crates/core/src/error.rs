use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum ArmError {
    #[error("arm must have at least 2 edges, got {0}")]
    TooFewEdges(usize),
    #[error("edge lengths must be positive, got {value} at index {index}")]
    NonPositiveLength { index: usize, value: f64 },
    #[error("expected {expected} angle coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("chord of length {chord} does not fit on a circle of radius {radius}")]
    InfeasibleChord { chord: f64, radius: f64 },
    #[error("radius {radius} is below the feasible minimum {min}")]
    InfeasibleRadius { radius: f64, min: f64 },
    #[error("circumcenter lies on the line of edge {index}; orientation sign undefined")]
    DegenerateOrientation { index: usize },
    #[error("configuration is not diacyclic: {0}")]
    NotDiacyclic(String),
    #[error("not a critical point: gradient norm {norm:e} exceeds tolerance {tol:e}")]
    NotCritical { norm: f64, tol: f64 },
    #[error(
        "no strictly largest edge ({0} vs {1}): QC-components intersect and the \
         circle decomposition does not apply"
    )]
    AmbiguousLargestEdge(f64, f64),
    #[error("grid resolution {0} too coarse, need at least {1}")]
    ResolutionTooCoarse(usize, usize),
    #[error("{0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, ArmError>;
