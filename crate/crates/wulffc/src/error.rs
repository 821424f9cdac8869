//! Crate-wide error type.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("vector norm {norm} outside accepted band around 1")]
    NotUnit { norm: f64 },
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("antipodal points do not span a unique arc")]
    AntipodalPoints,
    #[error("lune requires distinct, non-antipodal hemisphere centers")]
    InvalidLune,
    #[error("cap radius {0} outside (0, pi/2]")]
    InvalidCapRadius(f64),
    #[error("vertex angle undefined: leg point coincides with the apex or its antipode")]
    DegenerateVertexAngle,
    #[error("point lies on the equator or lower hemisphere of the projection pole")]
    NotUpperHemisphere,
    #[error("spherical blow-up undefined at the poles")]
    PoleInput,

    #[error("tabulated integrand has an empty grid")]
    EmptyTable,
    #[error("integrand not positive: value {value} at a sampled direction")]
    NonPositiveIntegrand { value: f64 },
    #[error("tabulated integrand violates its declared Lipschitz bound {bound} (observed slope {observed})")]
    LipschitzViolation { bound: f64, observed: f64 },
    #[error("apex height {height} does not exceed the base value {base} at the apex direction")]
    ApexHeightTooLow { height: f64, base: f64 },
    #[error("not a convex integrand: inverted-graph point sinks {depth} into the hull")]
    NotConvexIntegrand { depth: f64 },

    #[error("direction grid too small: need at least {need}, got {got}")]
    GridTooSmall { need: usize, got: usize },
    #[error("half-plane intersection is empty or unbounded")]
    EmptyWulff,
    #[error("point is not a vertex of the polygon")]
    NotAVertex,
    #[error("point does not lie on the boundary")]
    NotOnBoundary,
    #[error("hull is degenerate (fewer than {need} extreme points)")]
    DegenerateHull { need: usize },

    #[error("point set is not contained in an open hemisphere")]
    NonHemispherical,
    #[error("boundary chain does not close: gap {gap}")]
    OpenChain { gap: f64 },
    #[error("arc endpoint at distance {dist} from the center; expected radius {rho}")]
    ArcRadiusMismatch { dist: f64, rho: f64 },
    #[error("body violates convexity: boundary sample sinks {depth} below a support constraint")]
    NotConvexBody { depth: f64 },
    #[error("boundary point is smooth; no extreme pair exists")]
    SmoothPoint,
    #[error("hemisphere does not support the body (slack {slack})")]
    NotSupporting { slack: f64 },
    #[error("interior cap witness verification failed: sampled point escaped {place}")]
    WitnessVerification { place: &'static str },

    #[error("vertex count {0} must be odd and at least 3")]
    EvenVertexCount(usize),
    #[error("width {width} outside the open interval ({lo}, {hi})")]
    WidthOutOfRange { width: f64, lo: f64, hi: f64 },
    #[error("bisection failed to converge: residual {residual}")]
    SolverDiverged { residual: f64 },
    #[error("cap intersection is empty or has no interior")]
    EmptyIntersection,
    #[error("body is not of constant width: deviation {deviation} exceeds {tol}")]
    NotConstantWidth { deviation: f64, tol: f64 },
    #[error("sample cap {cap} reached before meeting tolerances (h = {achieved_h}, width dev = {achieved_dev})")]
    SampleCapExceeded {
        cap: usize,
        achieved_h: f64,
        achieved_dev: f64,
    },
    #[error("width {width} is at the excluded value pi/2; approximation of such bodies is unsupported")]
    WidthAtPiOverTwo { width: f64 },
    #[error("boundary census failed: {other} feature(s) with unexpected radius")]
    CensusFailure { other: usize },

    #[error("input schema violation: {0}")]
    Schema(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code: 0 ok, 1 theorem-agreement failure, 2 input schema,
    /// 3 invalid integrand/body, 4 pipeline census/tolerance failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) | Error::Json(_) | Error::Io(_) => 2,
            Error::CensusFailure { .. }
            | Error::SampleCapExceeded { .. }
            | Error::NotConstantWidth { .. } => 4,
            _ => 3,
        }
    }
}
