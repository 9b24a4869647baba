use thiserror::Error;

use crate::model::{Genericity, Label};
use crate::triangulation::ValidityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rational literal {0:?}")]
    ParseRational(String),
    #[error("invalid label {0:?}")]
    ParseLabel(String),
    #[error("label index {index} out of range 1..={n}")]
    LabelOutOfRange { index: usize, n: usize },
    #[error("label {label} has size {got}, expected level {expected}")]
    WrongLabelSize { label: Label, got: usize, expected: usize },
    #[error("level {k} out of range 1..={max}")]
    LevelOutOfRange { k: usize, max: usize },
    #[error("point configuration needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("point configuration has {0} points; labels support at most 64")]
    TooManyPoints(usize),

    #[error("degenerate triangle")]
    DegenerateTriangle,
    #[error("invalid simple polygon: {0}")]
    InvalidPolygon(String),
    #[error("blocked triangles {0} and {1} overlap")]
    OverlappingBlocked(usize, usize),
    #[error("blocked triangle {0} escapes the hull")]
    BlockedOutsideHull(usize),
    #[error("region is not a simple polygon: {0}")]
    RegionNotSimple(String),

    #[error("configuration is not strongly generic: {0}")]
    NotStronglyGeneric(Genericity),
    #[error("configuration is degenerate: points {0:?} are collinear")]
    DegenerateConfiguration([usize; 3]),
    #[error("perturbation failed to reach strong genericity")]
    PerturbationFailed,

    #[error("edge condition violated between {0} and {1}")]
    EdgeConditionViolated(Label, Label),
    #[error("triple intersection has size {size}; color undefined at level {k}")]
    ColorUndefined { size: usize, k: usize },
    #[error("invalid hypertriangulation: {0}")]
    InvalidHypertriangulation(ValidityReport),
    #[error("flip not applicable: {0}")]
    FlipNotApplicable(String),
    #[error("expected a white triangle")]
    NotWhite,
    #[error("expected a black triangle")]
    NotBlack,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("configuration is not in convex position")]
    NotConvexPosition,
    #[error("triangulations do not cover the same region")]
    RegionsDiffer,
    #[error("{what} budget of {limit} exceeded")]
    BudgetExceeded { what: &'static str, limit: usize },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}
