use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("barrier count {0} is too small: at least 2 barriers are required")]
    TooFewBarriers(usize),
    #[error("spacing ratio c must be positive, got {0}")]
    NonPositiveRatio(f64),
    #[error("total length must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("barrier height must be positive, got {0}")]
    NonPositiveHeight(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid packet parameters: {0}")]
    InvalidPacket(String),
    #[error("fields live on different grids")]
    GridMismatch,

    #[error("explicit scheme is unstable: dx^2 = {dx2} must exceed dt = {dt}")]
    StabilityGuard { dx2: f64, dt: f64 },
    #[error("non-finite value at step {step}")]
    NonFinite { step: usize },
    #[error("invalid evolution config: {0}")]
    InvalidEvolution(String),

    #[error("Lanczos seed has zero norm")]
    ZeroSeed,

    #[error("energy must be positive, got {0}")]
    NonPositiveEnergy(f64),
    #[error("transfer matrix element Q22 vanishes (transmission zero)")]
    TransmissionZero,
    #[error("invalid energy range [{0}, {1}]")]
    EmptyRange(f64, f64),
    #[error("boundary radius {radius} must be at least 5 L = {min}")]
    RadiusTooSmall { radius: f64, min: f64 },
    #[error("level scan is under-resolved: {coarse} levels at resolution h, {fine} at h/2")]
    ResolutionGuard { coarse: usize, fine: usize },
    #[error("need at least 2 levels for spacing statistics, got {0}")]
    TooFewLevels(usize),

    #[error("invalid number {0:?}: {1}")]
    Parse(String, String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cache entry {path} is corrupt: {reason}")]
    CacheCorrupt { path: PathBuf, reason: String },
    #[error("record for N={n}, c={c} is not cached")]
    NotCached { n: usize, c: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than a failed
    /// computation or I/O.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::TooFewBarriers(_)
                | Error::NonPositiveRatio(_)
                | Error::NonPositiveLength(_)
                | Error::NonPositiveHeight(_)
                | Error::InvalidGrid(_)
                | Error::InvalidPacket(_)
                | Error::StabilityGuard { .. }
                | Error::InvalidEvolution(_)
                | Error::NonPositiveEnergy(_)
                | Error::EmptyRange(..)
                | Error::RadiusTooSmall { .. }
                | Error::Parse(..)
                | Error::Config(_)
        )
    }
}
