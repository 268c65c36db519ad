//! Direct sound estimation for far-field recordings.
//!
//! Given a far-field (or separated) stream and a high-SNR close-talk
//! reference of the same talker, [`dse`] fits a short per-subband filter
//! that maps the reference onto the direct-path component of the far-field
//! signal. The filtered reference is a time- and level-aligned estimate of
//! the direct sound and can serve as a training label.
//!
//! - [`spectral`]: STFT analysis/synthesis, compression and masking.
//! - [`scene`]: synthetic scenes with exact ground-truth decomposition.
//! - [`dse`]: filter order, weighting, weighted least-squares fit.
//! - [`losses`]: MSE / cosine / MCA spectrogram losses.
//! - [`metrics`]: SI-SDR, log-spectral distance, spectral cosine.
//! - [`pipeline`]: WAV and text formats, timestamp masking, batch runs.

pub mod dse;
pub mod error;
pub mod losses;
pub mod metrics;
pub mod pipeline;
pub mod scene;
pub mod spectral;

pub use dse::{
    apply_filter, dse_estimate, estimate_filter, filter_order, weighting_term, DseConfig,
    DseEstimate, DseFilter,
};
pub use error::{Error, Result};
pub use losses::{cossim_loss, mca_loss, mse_loss, LossConfig};
pub use metrics::{log_spectral_distance, si_sdr, spectral_cosine, MetricReport};
pub use scene::{synthesize_scene, wdo_overlap_ratio, SceneBundle, SceneSpec};
pub use spectral::{
    apply_magnitude_mask, compress_magnitude, istft, stft, ComplexSpectrogram,
    MagnitudeSpectrogram, SpectralMask, StftConfig, Waveform,
};
