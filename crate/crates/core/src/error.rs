//! Error taxonomy shared across the crate.

use thiserror::Error;

/// All failure modes surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A simulation box parameter is out of range.
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    /// A mode index lies outside the momentum cutoff.
    #[error("mode index {r} outside the momentum cutoff |r| <= {r_max}")]
    ModeOutsideCutoff { r: i64, r_max: i64 },

    /// The zero-momentum mode is excluded from the basis; the plane-wave
    /// spinor factor is undefined there.
    #[error("the zero-momentum mode r = 0 is excluded from the basis")]
    ZeroMode,

    /// A state description violates occupancy rules or normalization.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// The spatial grid cannot resolve every harmonic of the requested
    /// observable without aliasing.
    #[error(
        "grid resolution too coarse: harmonic {harmonic} requires more than \
         {required} grid points, got {n_z}"
    )]
    GridResolution {
        harmonic: i64,
        required: usize,
        n_z: usize,
    },

    /// A run configuration is inconsistent (degenerate grid, mismatched
    /// window, empty sweep, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A time was requested that does not coincide with a grid level;
    /// phase fields are never interpolated off-grid.
    #[error("time {t} does not coincide with a grid level (spacing {dt})")]
    OffGridTime { t: f64, dt: f64 },

    /// Malformed tabulated-potential data.
    #[error("invalid potential table: {0}")]
    InvalidTable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
