use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid STFT configuration: {0}")]
    InvalidStftConfig(String),

    #[error("waveform is empty")]
    EmptyWaveform,

    #[error("sample rate mismatch: expected {expected} Hz, got {actual} Hz")]
    SampleRateMismatch { expected: u32, actual: u32 },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("spectrogram is identically zero, weighting term is undefined")]
    ZeroSpectrogram,

    #[error("{frames} frames is fewer than the filter order {order}")]
    TooFewFrames { frames: usize, order: usize },

    #[error("normal matrix is singular at subband {bin}; retry with diagonal loading")]
    SingularSystem { bin: usize },

    #[error("operand has zero norm")]
    ZeroNorm,

    #[error("reference signal is identically zero")]
    ZeroReference,

    #[error("unknown speaker `{0}`")]
    UnknownSpeaker(String),

    #[error("invalid segment list: {0}")]
    InvalidSegments(String),

    #[error("invalid manifest: {0}")]
    InvalidManifest(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("unsupported audio format in {path}: {reason}")]
    UnsupportedAudio { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("WAV error on {path}: {source}")]
    Wav {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },

    #[error("parse error in {path}: {reason}")]
    Parse { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
