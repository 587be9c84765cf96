use thiserror::Error;

/// Errors surfaced by construction, solve and verification operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("spline order must satisfy 2 <= p <= 20, got {0}")]
    OrderOutOfRange(usize),

    #[error("derivative order {m} exceeds the smoothness class C^{max}")]
    DerivativeOrderTooHigh { m: usize, max: usize },

    #[error("knots must be strictly increasing and finite")]
    KnotsNotIncreasing,

    #[error("order p={p} needs at least p knots, got {got}")]
    InsufficientKnots { p: usize, got: usize },

    #[error("Gram matrix is not positive definite (condition estimate {cond:.3e})")]
    NotPositiveDefinite { cond: f64 },

    #[error("collocation system is singular")]
    SingularSystem,

    #[error("translation overflow risk: |sigma * shift| = {0:.2} > 30")]
    TranslationOverflow(f64),

    #[error("stability scan requires |xi| >= 1/2, got {0}")]
    XiBelowHalf(f64),

    #[error("grid_m = {grid_m} is too coarse for truncation radius {k}: need >= {required}")]
    GridTooCoarse {
        grid_m: usize,
        k: usize,
        required: usize,
    },

    #[error("data shape mismatch: {0}")]
    DataShape(String),

    #[error("test function does not vanish at knot t = {0}")]
    NotVanishingAtKnots(f64),

    #[error("competitor does not interpolate the prescribed values at t = {0}")]
    CompetitorMismatch(f64),

    #[error("sample point t = {t} is too close to the hyperplane at t = {knot}")]
    PointTooCloseToHyperplane { t: f64, knot: f64 },

    #[error("frequency {0:?} is not covered by the model")]
    ModeNotCovered(Vec<i64>),

    #[error("solver failure at frequency {xi:?}: {source}")]
    ModeSolve {
        xi: Vec<i64>,
        #[source]
        source: Box<Error>,
    },

    #[error("model format: {0}")]
    ModelFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
