//! STFT analysis/synthesis, power-law magnitude compression and magnitude
//! masking.
//!
//! Frames are taken from a signal reflect-padded by half a window on each
//! side. Frame `t` starts at padded sample `t * hop`; the window occupies the
//! first `window_len` points of the (zero-padded) FFT buffer. Synthesis
//! overlap-adds the synthesis-windowed inverse frames and divides by the
//! accumulated product of analysis and synthesis windows, so an unmodified
//! spectrogram reconstructs its input exactly up to rounding.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SAMPLE_RATE: u32 = 16_000;
pub const DEFAULT_WINDOW_MS: f64 = 25.0;
pub const DEFAULT_HOP_MS: f64 = 6.25;
pub const DEFAULT_COMPRESSION: f64 = 0.3;

/// Tolerance on the overlap-add window sum used by the COLA check.
const COLA_TOLERANCE: f64 = 1e-9;

/// Analysis/synthesis window pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    /// Square-root periodic Hann for both analysis and synthesis.
    #[default]
    SqrtHann,
    /// Periodic Hann analysis, rectangular synthesis.
    Hann,
    /// Rectangular analysis and synthesis.
    Rectangular,
}

fn periodic_hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / len as f64).cos())
        .collect()
}

impl WindowKind {
    pub fn analysis(self, len: usize) -> Vec<f64> {
        match self {
            WindowKind::SqrtHann => periodic_hann(len).into_iter().map(f64::sqrt).collect(),
            WindowKind::Hann => periodic_hann(len),
            WindowKind::Rectangular => vec![1.0; len],
        }
    }

    pub fn synthesis(self, len: usize) -> Vec<f64> {
        match self {
            WindowKind::SqrtHann => periodic_hann(len).into_iter().map(f64::sqrt).collect(),
            WindowKind::Hann | WindowKind::Rectangular => vec![1.0; len],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StftConfig {
    pub sample_rate: u32,
    pub window_ms: f64,
    pub hop_ms: f64,
    /// `None` selects the smallest power of two covering the window.
    pub fft_size: Option<usize>,
    pub window: WindowKind,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self {
            sample_rate: DEFAULT_SAMPLE_RATE,
            window_ms: DEFAULT_WINDOW_MS,
            hop_ms: DEFAULT_HOP_MS,
            fft_size: None,
            window: WindowKind::SqrtHann,
        }
    }
}

impl StftConfig {
    pub fn with_sample_rate(sample_rate: u32) -> Self {
        Self {
            sample_rate,
            ..Self::default()
        }
    }

    pub fn window_len(&self) -> usize {
        (self.sample_rate as f64 * self.window_ms / 1000.0).round() as usize
    }

    pub fn hop_len(&self) -> usize {
        (self.sample_rate as f64 * self.hop_ms / 1000.0).round() as usize
    }

    pub fn fft_len(&self) -> usize {
        self.fft_size
            .unwrap_or_else(|| self.window_len().max(1).next_power_of_two())
    }

    pub fn num_bins(&self) -> usize {
        self.fft_len() / 2 + 1
    }

    /// Hop in seconds after rounding to whole samples.
    pub fn hop_seconds(&self) -> f64 {
        self.hop_len() as f64 / self.sample_rate as f64
    }

    /// Reflect padding applied at each end of the signal.
    pub fn pad_len(&self) -> usize {
        self.window_len() / 2
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidStftConfig(msg));
        if self.sample_rate == 0 {
            return bad("sample rate must be positive".into());
        }
        if !(self.window_ms.is_finite() && self.hop_ms.is_finite()) {
            return bad("window and hop durations must be finite".into());
        }
        let win = self.window_len();
        let hop = self.hop_len();
        if win == 0 {
            return bad(format!("window of {} ms is zero samples", self.window_ms));
        }
        if hop == 0 {
            return bad(format!("hop of {} ms is zero samples", self.hop_ms));
        }
        if hop >= win {
            return bad(format!(
                "hop ({hop}) must be shorter than the window ({win})"
            ));
        }
        let fft = self.fft_len();
        if fft < win {
            return bad(format!("fft size {fft} is shorter than the window ({win})"));
        }
        if !fft.is_multiple_of(2) {
            return bad(format!("fft size {fft} must be even"));
        }
        if !self.satisfies_cola() {
            return bad(format!(
                "{:?} window pair of length {win} is not overlap-add constant at hop {hop}",
                self.window
            ));
        }
        Ok(())
    }

    /// Whether the analysis/synthesis window product overlap-adds to a
    /// constant at the configured hop.
    pub fn satisfies_cola(&self) -> bool {
        let win = self.window_len();
        let hop = self.hop_len();
        if win == 0 || hop == 0 {
            return false;
        }
        let analysis = self.window.analysis(win);
        let synthesis = self.window.synthesis(win);
        let sums: Vec<f64> = (0..hop)
            .map(|r| {
                (r..win)
                    .step_by(hop)
                    .map(|n| analysis[n] * synthesis[n])
                    .sum()
            })
            .collect();
        let max = sums.iter().cloned().fold(f64::MIN, f64::max);
        let min = sums.iter().cloned().fold(f64::MAX, f64::min);
        max > 0.0 && (max - min) <= COLA_TOLERANCE * max
    }

    /// Number of frames produced for a signal of `num_samples` samples.
    pub fn num_frames(&self, num_samples: usize) -> usize {
        let padded = num_samples + 2 * self.pad_len();
        let win = self.window_len();
        if padded <= win {
            1
        } else {
            1 + (padded - win).div_ceil(self.hop_len())
        }
    }
}

/// Discrete-time real signal.
#[derive(Clone, Debug, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::param("sample_rate", "must be positive"));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn zeros(len: usize, sample_rate: u32) -> Self {
        Self {
            samples: vec![0.0; len],
            sample_rate,
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s * s).sum()
    }
}

/// T×F complex STFT coefficients, stored frame-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSpectrogram {
    frames: usize,
    bins: usize,
    data: Vec<Complex64>,
    config: StftConfig,
    num_samples: usize,
}

impl ComplexSpectrogram {
    pub fn zeros(frames: usize, bins: usize, config: StftConfig, num_samples: usize) -> Self {
        Self {
            frames,
            bins,
            data: vec![Complex64::new(0.0, 0.0); frames * bins],
            config,
            num_samples,
        }
    }

    pub fn from_data(
        frames: usize,
        bins: usize,
        data: Vec<Complex64>,
        config: StftConfig,
        num_samples: usize,
    ) -> Result<Self> {
        if data.len() != frames * bins {
            return Err(Error::LengthMismatch {
                left: data.len(),
                right: frames * bins,
            });
        }
        if let Some(i) = data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            frames,
            bins,
            data,
            config,
            num_samples,
        })
    }

    /// A spectrogram with the same shape and metadata holding `data`.
    pub fn with_data(&self, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), self.data.len());
        Self {
            data,
            ..self.clone_meta()
        }
    }

    fn clone_meta(&self) -> Self {
        Self {
            frames: self.frames,
            bins: self.bins,
            data: Vec::new(),
            config: self.config.clone(),
            num_samples: self.num_samples,
        }
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.frames, self.bins)
    }

    pub fn config(&self) -> &StftConfig {
        &self.config
    }

    /// Length of the time-domain signal this spectrogram describes.
    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn get(&self, t: usize, f: usize) -> Complex64 {
        self.data[t * self.bins + f]
    }

    pub fn set(&mut self, t: usize, f: usize, value: Complex64) {
        self.data[t * self.bins + f] = value;
    }

    pub fn frame(&self, t: usize) -> &[Complex64] {
        &self.data[t * self.bins..(t + 1) * self.bins]
    }

    /// Copy of one subband across all frames.
    pub fn subband(&self, f: usize) -> Vec<Complex64> {
        (0..self.frames).map(|t| self.get(t, f)).collect()
    }

    pub fn set_subband(&mut self, f: usize, values: &[Complex64]) {
        assert_eq!(values.len(), self.frames);
        for (t, v) in values.iter().enumerate() {
            self.set(t, f, *v);
        }
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    pub fn power(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scaled(&self, gain: Complex64) -> Self {
        self.with_data(self.data.iter().map(|z| z * gain).collect())
    }

    /// Elementwise sum. Panics on shape mismatch.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape());
        self.with_data(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn is_all_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
}

/// Nonnegative T×F magnitudes raised to `exponent`.
#[derive(Clone, Debug, PartialEq)]
pub struct MagnitudeSpectrogram {
    frames: usize,
    bins: usize,
    data: Vec<f64>,
    exponent: f64,
}

impl MagnitudeSpectrogram {
    pub fn new(frames: usize, bins: usize, data: Vec<f64>, exponent: f64) -> Result<Self> {
        check_exponent(exponent)?;
        if data.len() != frames * bins {
            return Err(Error::LengthMismatch {
                left: data.len(),
                right: frames * bins,
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            frames,
            bins,
            data,
            exponent,
        })
    }

    /// Builds an uncompressed (exponent 1) spectrogram from rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let frames = rows.len();
        let bins = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != bins) {
            return Err(Error::param("rows", "ragged rows"));
        }
        Self::new(frames, bins, rows.concat(), 1.0)
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.frames, self.bins)
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, t: usize, f: usize) -> f64 {
        self.data[t * self.bins + f]
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }
}

/// Real-valued T×F gain mask with entries in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMask {
    frames: usize,
    bins: usize,
    values: Vec<f64>,
}

impl SpectralMask {
    pub fn new(frames: usize, bins: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != frames * bins {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: frames * bins,
            });
        }
        if let Some(i) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::param(
                "mask",
                format!("entry {i} = {} lies outside [0, 1]", values[i]),
            ));
        }
        Ok(Self {
            frames,
            bins,
            values,
        })
    }

    pub fn filled(frames: usize, bins: usize, value: f64) -> Result<Self> {
        Self::new(frames, bins, vec![value; frames * bins])
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.frames, self.bins)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn set(&mut self, t: usize, f: usize, value: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::param("mask", format!("{value} lies outside [0, 1]")));
        }
        self.values[t * self.bins + f] = value;
        Ok(())
    }
}

fn check_exponent(c: f64) -> Result<()> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::param(
            "compression exponent",
            format!("{c} is outside (0, 1]"),
        ));
    }
    Ok(())
}

/// Maps padded index `i` back into `0..n` by mirror reflection (no edge
/// repeat), bouncing as often as needed for very short signals.
fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m >= n as isize {
        (period - m) as usize
    } else {
        m as usize
    }
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    if inverse {
        planner.plan_fft_inverse(len)
    } else {
        planner.plan_fft_forward(len)
    }
}

/// Forward STFT of `w` under `cfg`.
pub fn stft(w: &Waveform, cfg: &StftConfig) -> Result<ComplexSpectrogram> {
    cfg.validate()?;
    if w.is_empty() {
        return Err(Error::EmptyWaveform);
    }
    if w.sample_rate() != cfg.sample_rate {
        return Err(Error::SampleRateMismatch {
            expected: cfg.sample_rate,
            actual: w.sample_rate(),
        });
    }

    let n = w.len();
    let win = cfg.window_len();
    let hop = cfg.hop_len();
    let fft_len = cfg.fft_len();
    let bins = cfg.num_bins();
    let pad = cfg.pad_len();
    let padded_len = n + 2 * pad;
    let frames = cfg.num_frames(n);

    let x = w.samples();
    let padded = |i: usize| -> f64 {
        if i < padded_len {
            x[reflect_index(i as isize - pad as isize, n)]
        } else {
            0.0
        }
    };

    let window = cfg.window.analysis(win);
    let fft = plan(fft_len, false);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut buf = vec![Complex64::new(0.0, 0.0); fft_len];
    let mut data = Vec::with_capacity(frames * bins);

    for t in 0..frames {
        let start = t * hop;
        for (k, slot) in buf.iter_mut().enumerate() {
            *slot = if k < win {
                Complex64::new(padded(start + k) * window[k], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        data.extend_from_slice(&buf[..bins]);
    }

    Ok(ComplexSpectrogram {
        frames,
        bins,
        data,
        config: cfg.clone(),
        num_samples: n,
    })
}

/// Inverse STFT by weighted overlap-add; output length is the analysed
/// signal length recorded in `s`.
pub fn istft(s: &ComplexSpectrogram) -> Result<Waveform> {
    let cfg = s.config();
    cfg.validate()?;
    if s.bins() != cfg.num_bins() {
        return Err(Error::InvalidStftConfig(format!(
            "spectrogram has {} subbands but configuration implies {}",
            s.bins(),
            cfg.num_bins()
        )));
    }

    let win = cfg.window_len();
    let hop = cfg.hop_len();
    let fft_len = cfg.fft_len();
    let pad = cfg.pad_len();
    let bins = s.bins();
    let out_len = (s.frames().saturating_sub(1)) * hop + win;

    let analysis = cfg.window.analysis(win);
    let synthesis = cfg.window.synthesis(win);
    let ifft = plan(fft_len, true);
    let mut scratch = vec![Complex64::new(0.0, 0.0); ifft.get_inplace_scratch_len()];
    let mut buf = vec![Complex64::new(0.0, 0.0); fft_len];
    let mut acc = vec![0.0; out_len];
    let mut norm = vec![0.0; out_len];
    let scale = 1.0 / fft_len as f64;

    for t in 0..s.frames() {
        let frame = s.frame(t);
        buf[..bins].copy_from_slice(frame);
        for k in 1..fft_len - bins + 1 {
            buf[fft_len - k] = frame[k].conj();
        }
        ifft.process_with_scratch(&mut buf, &mut scratch);
        let start = t * hop;
        for k in 0..win {
            acc[start + k] += buf[k].re * scale * synthesis[k];
            norm[start + k] += analysis[k] * synthesis[k];
        }
    }

    let peak = norm.iter().cloned().fold(0.0, f64::max);
    let floor = peak * 1e-10;
    let samples = (0..s.num_samples())
        .map(|i| {
            let j = i + pad;
            if j < out_len && norm[j] > floor {
                acc[j] / norm[j]
            } else {
                0.0
            }
        })
        .collect();
    Waveform::new(samples, cfg.sample_rate)
}

/// `|s|^c` elementwise.
pub fn compress_magnitude(s: &ComplexSpectrogram, c: f64) -> Result<MagnitudeSpectrogram> {
    check_exponent(c)?;
    let data = s.data().iter().map(|z| z.norm().powf(c)).collect();
    MagnitudeSpectrogram::new(s.frames(), s.bins(), data, c)
}

/// Scales each coefficient of `g` by the mask; phase passes through.
pub fn apply_magnitude_mask(
    mask: &SpectralMask,
    g: &ComplexSpectrogram,
) -> Result<ComplexSpectrogram> {
    if mask.shape() != g.shape() {
        return Err(Error::ShapeMismatch {
            left: mask.shape(),
            right: g.shape(),
        });
    }
    Ok(g.with_data(
        g.data()
            .iter()
            .zip(mask.values())
            .map(|(z, m)| z * *m)
            .collect(),
    ))
}

/// Applies a mask defined on `|g|^c` magnitudes: the output satisfies
/// `|out|^c = mask * |g|^c` and keeps the phase of `g`.
pub fn apply_compressed_mask(
    mask: &SpectralMask,
    g: &ComplexSpectrogram,
    c: f64,
) -> Result<ComplexSpectrogram> {
    check_exponent(c)?;
    if mask.shape() != g.shape() {
        return Err(Error::ShapeMismatch {
            left: mask.shape(),
            right: g.shape(),
        });
    }
    Ok(g.with_data(
        g.data()
            .iter()
            .zip(mask.values())
            .map(|(z, m)| z * m.powf(1.0 / c))
            .collect(),
    ))
}
