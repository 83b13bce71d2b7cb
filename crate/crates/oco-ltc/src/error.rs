use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors shared by all modules.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A value that must be finite was NaN or infinite; signals numerical
    /// corruption upstream.
    NonFinite { what: &'static str },
    /// Two vectors that must share a dimension do not.
    DimensionMismatch { left: usize, right: usize },
    /// A halfspace normal with (near-)zero norm.
    ZeroNormal,
    /// Ball radii must satisfy `0 < inner_radius <= radius`.
    InvalidBall { radius: f64, inner_radius: f64 },
    /// A linear constraint normal must have unit norm.
    NotUnitNormal { norm: f64 },
    /// At least one constraint is required.
    EmptyConstraints,
    /// An operation restricted to linear constraints received a nonlinear one.
    NonlinearConstraint,
    /// σ is only derived automatically for linear constraints; nonlinear
    /// instances must supply it explicitly.
    SigmaUnavailable,
    /// Requested geometry cannot contain the inner ball.
    InfeasibleGeometry { inner_radius: f64, max_offset: f64 },
    /// The horizon is too small for a schedule's admissibility condition.
    HorizonTooSmall { horizon: u64, min_admissible: u64 },
    /// A fixed-point resolution failed to settle within its iteration cap.
    FixedPointDiverged { iterations: usize },
    /// An iterative solver hit its iteration cap before reaching tolerance.
    DidNotConverge { what: &'static str, residual: f64 },
    /// A bandit query point left the enclosing ball (state invariant breach).
    QueryOutsideBall { norm: f64, radius: f64 },
    /// Rate fitting needs at least this many grid points.
    TooFewPoints { needed: usize, got: usize },
    /// Horizon grids must be strictly increasing.
    NonIncreasingHorizons,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Self::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Self::ZeroNormal => write!(f, "halfspace normal has zero norm"),
            Self::InvalidBall {
                radius,
                inner_radius,
            } => write!(
                f,
                "invalid ball domain: need 0 < r <= R, got r = {inner_radius}, R = {radius}"
            ),
            Self::NotUnitNormal { norm } => {
                write!(
                    f,
                    "linear constraint normal must be unit length, got norm {norm}"
                )
            }
            Self::EmptyConstraints => write!(f, "at least one constraint is required"),
            Self::NonlinearConstraint => {
                write!(f, "operation requires linear constraints only")
            }
            Self::SigmaUnavailable => write!(
                f,
                "sigma cannot be derived for nonlinear constraints; supply it explicitly"
            ),
            Self::InfeasibleGeometry {
                inner_radius,
                max_offset,
            } => write!(
                f,
                "inner ball of radius {inner_radius} cannot fit: offsets only reach {max_offset}"
            ),
            Self::HorizonTooSmall {
                horizon,
                min_admissible,
            } => write!(
                f,
                "horizon T = {horizon} below the schedule's admissible minimum {min_admissible}"
            ),
            Self::FixedPointDiverged { iterations } => {
                write!(
                    f,
                    "schedule fixed point did not settle in {iterations} iterations"
                )
            }
            Self::DidNotConverge { what, residual } => {
                write!(f, "{what} hit its iteration cap with residual {residual:e}")
            }
            Self::QueryOutsideBall { norm, radius } => {
                write!(f, "query point norm {norm} exceeds ball radius {radius}")
            }
            Self::TooFewPoints { needed, got } => {
                write!(f, "need at least {needed} grid points, got {got}")
            }
            Self::NonIncreasingHorizons => {
                write!(f, "horizon grid must be strictly increasing")
            }
        }
    }
}

impl core::error::Error for Error {}
