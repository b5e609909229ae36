use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("result not representable in double precision: {0}")]
    Overflow(String),

    #[error(
        "degenerate fermion pair (delta_x^2 + delta_k^2 = {0:e}); use the coincident-limit density"
    )]
    DegeneratePair(f64),

    #[error("screen at X = {x} lies inside the initial support (density {density:e})")]
    ScreenInsideSupport { x: f64, density: f64 },

    #[error("quadrature did not converge (residual estimate {residual:e})")]
    Quadrature { residual: f64 },

    #[error("tail fit rejected: truncated mass fraction {fraction:e}, log-log slope {slope}")]
    TailFit { fraction: f64, slope: f64 },

    #[error("mean flight time diverges on a free channel")]
    FreeChannelMean,

    #[error("linear fit needs at least 3 points with distinct abscissae")]
    DegenerateFit,
}

pub type Result<T> = std::result::Result<T, Error>;
