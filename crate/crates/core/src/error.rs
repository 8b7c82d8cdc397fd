use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report. Each variant maps to a stable
/// short code (see [`Error::code`]) that reports and the CLI print.
#[derive(Debug, Error)]
pub enum Error {
    #[error("gravitational acceleration must be positive, got {0}")]
    NonPositiveGravity(f64),
    #[error("surface tension must be non-negative, got {0}")]
    NegativeSurfaceTension(f64),
    #[error("wave speed has zero horizontal part")]
    ZeroWaveSpeed,
    #[error("wave speed must have vanishing vertical component, got {0}")]
    VerticalWaveSpeed(f64),
    #[error("unsupported spatial dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("decay exponent must lie in (0, 1), got {0}")]
    DecayExponentOutOfRange(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("evaluation at a singular point")]
    Singularity,
    #[error("finite-difference stencil touches the singularity set")]
    StencilHitsSingularity,
    #[error("superposition needs at least one field")]
    EmptySuperposition,
    #[error("dipole moment must be horizontal, vertical component {0}")]
    VerticalMoment(f64),
    #[error("normal vector is not unit length (|n| = {0})")]
    NonUnitNormal(f64),

    #[error("{what} did not converge after {iterations} iterations; try a smaller patch or better start")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },
    #[error("point is not on the transformed surface patch")]
    OffPatch,
    #[error("least-squares fit is degenerate")]
    DegenerateFit,
    #[error("fit is ill-conditioned (condition number {0:.3e})")]
    IllConditioned(f64),
    #[error("surface elevation changes sign inside the fit window near x = {0}")]
    SignChange(f64),
    #[error("window [{lo}, {hi}] is outside the sampled data (extent {extent})")]
    WindowOutsideData { lo: f64, hi: f64, extent: f64 },
    #[error("radius {radius} exceeds the data extent {extent}")]
    RadiusBeyondData { radius: f64, extent: f64 },

    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("surface self-intersects (J <= 0 at sample {0})")]
    SelfIntersection(usize),
    #[error("Newton iteration diverged, last residual {residual:.3e}")]
    NewtonDiverged { residual: f64 },
    #[error("wave speed {c} is outside the solitary range (c_min = {c_min})")]
    OutsideSolitaryRange { c: f64, c_min: f64 },
    #[error("pure-gravity solitary waves are not supported (sigma must be > 0)")]
    PureGravityUnsupported,
    #[error("sign convention violated: {0}")]
    ConventionBug(String),
    #[error("point lies outside the fluid domain")]
    OutsideFluid,
    #[error("unknown strategy '{0}'")]
    UnknownStrategy(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed wave file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("checksum mismatch: file says {stored}, data hashes to {computed}")]
    ChecksumMismatch { stored: String, computed: String },
    #[error("unsupported wave file format version {0}")]
    FormatVersion(u32),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonPositiveGravity(_) => "E_GRAVITY",
            Error::NegativeSurfaceTension(_) => "E_SIGMA",
            Error::ZeroWaveSpeed => "E_SPEED_ZERO",
            Error::VerticalWaveSpeed(_) => "E_SPEED_VERTICAL",
            Error::UnsupportedDimension(_) => "E_DIMENSION",
            Error::DecayExponentOutOfRange(_) => "E_EPS",
            Error::DimensionMismatch { .. } => "E_DIM_MISMATCH",
            Error::Singularity => "E_SINGULAR",
            Error::StencilHitsSingularity => "E_STENCIL",
            Error::EmptySuperposition => "E_EMPTY",
            Error::VerticalMoment(_) => "E_VERTICAL_MOMENT",
            Error::NonUnitNormal(_) => "E_NORMAL",
            Error::NoConvergence { .. } => "E_NO_CONVERGENCE",
            Error::OffPatch => "E_OFF_PATCH",
            Error::DegenerateFit => "E_DEGENERATE_FIT",
            Error::IllConditioned(_) => "E_ILL_CONDITIONED",
            Error::SignChange(_) => "E_SIGN_CHANGE",
            Error::WindowOutsideData { .. } => "E_WINDOW",
            Error::RadiusBeyondData { .. } => "E_RADIUS",
            Error::NotPowerOfTwo(_) => "E_GRID",
            Error::SelfIntersection(_) => "E_SELF_INTERSECTION",
            Error::NewtonDiverged { .. } => "E_NEWTON",
            Error::OutsideSolitaryRange { .. } => "E_RANGE",
            Error::PureGravityUnsupported => "E_PURE_GRAVITY",
            Error::ConventionBug(_) => "E_CONVENTION",
            Error::OutsideFluid => "E_OUTSIDE_FLUID",
            Error::UnknownStrategy(_) => "E_STRATEGY",
            Error::InvalidConfig(_) => "E_CONFIG",
            Error::Io(_) => "E_IO",
            Error::Json(_) => "E_FORMAT",
            Error::ChecksumMismatch { .. } => "E_CHECKSUM",
            Error::FormatVersion(_) => "E_FORMAT_VERSION",
        }
    }
}
