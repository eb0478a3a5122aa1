use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unnormalized envelope")]
    UnnormalizedEnvelope,

    #[error("cone approximation invalid: {leak:.3e} of the radial spectral mass lies below zero")]
    ConeApproximationInvalid { leak: f64 },

    #[error("invalid envelope parameter: {0}")]
    InvalidEnvelope(String),

    #[error("negative transverse wave number {0}")]
    NegativeRadialWaveNumber(f64),

    #[error("photon number mismatch: {left} vs {right}")]
    PhotonNumberMismatch { left: usize, right: usize },

    #[error("more detectors than photons ({detectors} > {photons})")]
    TooManyDetectors { detectors: usize, photons: usize },

    #[error("unsupported photon number {0} (at most 4)")]
    UnsupportedPhotonNumber(usize),

    #[error("unsupported port layout: {0}")]
    UnsupportedPortLayout(String),

    #[error("null state: {0}")]
    NullState(String),

    #[error("grid too small: {0} samples per axis (need at least 8)")]
    GridTooSmall(usize),

    #[error("{0}")]
    OutOfRange(String),

    #[error("undefined ratio: photon density vanishes at {0}")]
    UndefinedRatio(String),

    #[error("invalid port multiset: {0}")]
    InvalidPorts(String),

    #[error("malformed PGM at byte {offset}: {message}")]
    Pgm { offset: usize, message: String },

    #[error("invalid mask specification `{0}`")]
    MaskSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
