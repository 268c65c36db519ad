//! Synthetic far-field conversation scenes with a known decomposition.
//!
//! Sources are generated in the time domain, analysed once, and every room
//! effect is then applied per subband as a short multi-frame filter. The
//! direct path of speaker `n` is a pure delay of `ceil(D_n / (a·H))` frames
//! scaled by its direct gain; the reverberant tail occupies lags
//! `delay + 1 .. tail_frames` with exponentially decaying random taps. Since
//! the generative model is exactly the narrowband one the estimator assumes,
//! ground truth is available to machine precision.
//!
//! The far-field mixture handed to the estimator stands in for a separated
//! target stream:
//!
//! ```text
//! G = direct_q + nondirect_q + I
//! I = ρ · Σ_{n≠q} (direct_n + nondirect_n) + V
//! ```
//!
//! where `ρ` is the residual-interference gain. Raw microphone channels
//! (without `ρ`) are produced alongside.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dse::{delay_frames, DEFAULT_SPEED_OF_SOUND};
use crate::error::{Error, Result};
use crate::spectral::{stft, ComplexSpectrogram, StftConfig, Waveform};

const SOURCE_LEVEL: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    /// Gaussian noise gated into speech-like bursts and pauses.
    NoiseBursts,
    /// Repeated linear frequency sweeps.
    Chirp,
    /// Gaussian noise with a 4 Hz amplitude envelope.
    ModulatedNoise,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeakerSpec {
    pub source: SourceKind,
    pub distance_m: f64,
    pub direct_gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReverbSpec {
    /// Total filter length K in frames, direct path included.
    pub tail_frames: usize,
    /// Per-frame amplitude decay of the tail.
    pub decay_rate: f64,
    pub tap_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub seed: u64,
    pub duration_s: f64,
    #[serde(default)]
    pub target_index: usize,
    #[serde(default = "default_num_mics")]
    pub num_mics: usize,
    #[serde(default = "default_speed_of_sound")]
    pub speed_of_sound_mps: f64,
    /// Target-to-noise ratio; `None` disables noise.
    #[serde(default)]
    pub noise_snr_db: Option<f64>,
    /// Cross-talk level in the close-talk channel relative to the target;
    /// `None` means no leakage.
    #[serde(default)]
    pub leakage_db: Option<f64>,
    /// Gain of the non-target speakers left in the far-field mixture.
    #[serde(default)]
    pub residual_interference_db: f64,
    /// Confine the target to even subbands and all interference (speakers
    /// and noise) to odd subbands.
    #[serde(default)]
    pub band_partition: bool,
    #[serde(default)]
    pub reverb: Option<ReverbSpec>,
    #[serde(default)]
    pub stft: StftConfig,
    pub speakers: Vec<SpeakerSpec>,
}

fn default_num_mics() -> usize {
    1
}

fn default_speed_of_sound() -> f64 {
    DEFAULT_SPEED_OF_SOUND
}

impl SceneSpec {
    /// One target speaker, no reverb, no noise.
    pub fn single_speaker(seed: u64, distance_m: f64, direct_gain: f64) -> Self {
        Self {
            seed,
            duration_s: 2.0,
            target_index: 0,
            num_mics: 1,
            speed_of_sound_mps: DEFAULT_SPEED_OF_SOUND,
            noise_snr_db: None,
            leakage_db: None,
            residual_interference_db: 0.0,
            band_partition: false,
            reverb: None,
            stft: StftConfig::default(),
            speakers: vec![SpeakerSpec {
                source: SourceKind::NoiseBursts,
                distance_m,
                direct_gain,
            }],
        }
    }

    pub fn num_speakers(&self) -> usize {
        self.speakers.len()
    }

    pub fn target(&self) -> &SpeakerSpec {
        &self.speakers[self.target_index]
    }

    pub fn delay_frames_of(&self, speaker: usize) -> Result<usize> {
        delay_frames(
            self.speakers[speaker].distance_m,
            self.speed_of_sound_mps,
            self.stft.hop_seconds(),
        )
    }

    pub fn num_samples(&self) -> usize {
        (self.duration_s * self.stft.sample_rate as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScene(msg));
        self.stft.validate()?;
        if self.speakers.is_empty() {
            return bad("at least one speaker is required".into());
        }
        if self.num_mics == 0 {
            return bad("at least one microphone is required".into());
        }
        if self.target_index >= self.speakers.len() {
            return bad(format!(
                "target index {} out of range for {} speakers",
                self.target_index,
                self.speakers.len()
            ));
        }
        if !(self.speed_of_sound_mps > 0.0 && self.speed_of_sound_mps.is_finite()) {
            return bad(format!(
                "speed of sound {} must be > 0",
                self.speed_of_sound_mps
            ));
        }
        if !(self.duration_s.is_finite() && self.num_samples() >= self.stft.window_len()) {
            return bad(format!(
                "duration {} s is shorter than one {}-sample window",
                self.duration_s,
                self.stft.window_len()
            ));
        }
        for (n, s) in self.speakers.iter().enumerate() {
            if !(s.distance_m >= 0.0 && s.distance_m.is_finite()) {
                return bad(format!(
                    "speaker {n}: distance {} must be >= 0",
                    s.distance_m
                ));
            }
            if !s.direct_gain.is_finite() {
                return bad(format!("speaker {n}: direct gain must be finite"));
            }
        }
        for (name, v) in [
            ("noise_snr_db", self.noise_snr_db),
            ("leakage_db", self.leakage_db),
            (
                "residual_interference_db",
                Some(self.residual_interference_db),
            ),
        ] {
            if let Some(v) = v {
                if !v.is_finite() {
                    return bad(format!("{name} must be finite"));
                }
            }
        }
        if let Some(reverb) = &self.reverb {
            if !(reverb.decay_rate >= 0.0 && reverb.decay_rate < 1.0) {
                return bad(format!(
                    "decay rate {} is outside [0, 1)",
                    reverb.decay_rate
                ));
            }
            for n in 0..self.speakers.len() {
                let delay = self.delay_frames_of(n)?;
                if reverb.tail_frames <= delay {
                    return bad(format!(
                        "speaker {n}: tail of {} frames does not extend past the {delay}-frame direct delay",
                        reverb.tail_frames
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Narrowband filters of the target speaker at the reference microphone, in
/// the `X = h^H Ỹ` convention.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruthFilters {
    pub bins: usize,
    /// Number of direct taps L (delay + 1).
    pub true_order: usize,
    pub delay_frames: usize,
    /// `bins × true_order`, frame lag fastest.
    pub direct: Vec<Complex64>,
    /// Tail length K; zero without reverb.
    pub tail_frames: usize,
    /// `bins × tail_frames`, zero for lags up to the direct delay.
    pub reverb: Vec<Complex64>,
}

impl GroundTruthFilters {
    pub fn direct_tap(&self, f: usize, lag: usize) -> Complex64 {
        self.direct[f * self.true_order + lag]
    }

    pub fn reverb_tap(&self, f: usize, lag: usize) -> Complex64 {
        self.reverb[f * self.tail_frames + lag]
    }

    /// Lag of the strongest direct tap in subband `f`.
    pub fn dominant_direct_lag(&self, f: usize) -> usize {
        (0..self.true_order)
            .max_by(|&a, &b| {
                self.direct_tap(f, a)
                    .norm()
                    .total_cmp(&self.direct_tap(f, b).norm())
            })
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct SceneBundle {
    /// Stand-in for the separated target stream, `direct + nondirect + I`.
    pub far_mixture: ComplexSpectrogram,
    pub direct_sound: ComplexSpectrogram,
    pub nondirect: ComplexSpectrogram,
    pub interference: ComplexSpectrogram,
    /// Only the noise part of `interference`.
    pub noise: ComplexSpectrogram,
    pub close_talk: ComplexSpectrogram,
    pub dry_source: ComplexSpectrogram,
    /// Raw microphone channels: all speakers' reverberant speech plus noise.
    pub mic_signals: Vec<ComplexSpectrogram>,
    pub filters: GroundTruthFilters,
    pub spec: SceneSpec,
}

impl SceneBundle {
    /// `direct + nondirect`, the far-field mixture without interference.
    pub fn reverberant_target(&self) -> ComplexSpectrogram {
        self.direct_sound.add(&self.nondirect)
    }
}

/// SplitMix64 finaliser used to derive independent sub-stream seeds.
fn mix_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED69));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STREAM_SOURCE: u64 = 1;
const STREAM_REVERB: u64 = 2;
const STREAM_NOISE: u64 = 3;

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

/// Time-domain dry source of `len` samples.
pub fn generate_source(kind: SourceKind, len: usize, sample_rate: u32, seed: u64) -> Waveform {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sr = sample_rate as f64;
    let samples = match kind {
        SourceKind::NoiseBursts => {
            let mut out = vec![0.0; len];
            let mut pos = 0usize;
            let mut active = true;
            while pos < len {
                let seconds = if active {
                    rng.gen_range(0.15..0.5)
                } else {
                    rng.gen_range(0.05..0.25)
                };
                let end = (pos + (seconds * sr) as usize).min(len);
                if active {
                    for s in &mut out[pos..end] {
                        *s = SOURCE_LEVEL * gaussian(&mut rng);
                    }
                }
                pos = end;
                active = !active;
            }
            out
        }
        SourceKind::Chirp => {
            let sweep_s = 0.5;
            let f0 = 200.0;
            let f1 = 0.45 * sr;
            let phase0 = rng.gen_range(0.0..std::f64::consts::TAU);
            (0..len)
                .map(|i| {
                    let t = (i as f64 / sr) % sweep_s;
                    let phase =
                        std::f64::consts::TAU * (f0 * t + 0.5 * (f1 - f0) / sweep_s * t * t);
                    SOURCE_LEVEL * (phase + phase0).sin()
                })
                .collect()
        }
        SourceKind::ModulatedNoise => {
            let phase0 = rng.gen_range(0.0..std::f64::consts::TAU);
            (0..len)
                .map(|i| {
                    let env =
                        0.55 + 0.45 * (std::f64::consts::TAU * 4.0 * i as f64 / sr + phase0).sin();
                    SOURCE_LEVEL * env * gaussian(&mut rng)
                })
                .collect()
        }
    };
    Waveform::new(samples, sample_rate).expect("generated samples are finite")
}

/// `out(t,f) = Σ_l conj(h_l(f)) · s(t-l, f)` with taps `bins × order`.
fn narrowband_filter(
    s: &ComplexSpectrogram,
    taps: &[Complex64],
    order: usize,
) -> ComplexSpectrogram {
    let (frames, bins) = s.shape();
    let mut out = vec![Complex64::new(0.0, 0.0); frames * bins];
    for t in 0..frames {
        for f in 0..bins {
            let h = &taps[f * order..(f + 1) * order];
            let mut acc = Complex64::new(0.0, 0.0);
            for (lag, tap) in h.iter().enumerate().take(order.min(t + 1)) {
                if tap.re != 0.0 || tap.im != 0.0 {
                    acc += tap.conj() * s.get(t - lag, f);
                }
            }
            out[t * bins + f] = acc;
        }
    }
    s.with_data(out)
}

fn zero_bins(s: &mut ComplexSpectrogram, keep: impl Fn(usize) -> bool) {
    let bins = s.bins();
    for (i, z) in s.data_mut().iter_mut().enumerate() {
        if !keep(i % bins) {
            *z = Complex64::new(0.0, 0.0);
        }
    }
}

struct SpeakerPath {
    direct_taps: Vec<Complex64>,
    order: usize,
    reverb_taps: Vec<Complex64>,
    tail: usize,
}

fn speaker_path(spec: &SceneSpec, speaker: usize, mic: usize, bins: usize) -> Result<SpeakerPath> {
    let delay = spec.delay_frames_of(speaker)?;
    let order = delay + 1;
    let gain = spec.speakers[speaker].direct_gain;
    let mut direct_taps = vec![Complex64::new(0.0, 0.0); bins * order];
    for f in 0..bins {
        direct_taps[f * order + delay] = Complex64::new(gain, 0.0);
    }

    let (reverb_taps, tail) = match &spec.reverb {
        Some(reverb) => {
            let tail = reverb.tail_frames;
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(
                reverb.tap_seed,
                STREAM_REVERB,
                (speaker as u64) << 32 | mic as u64,
            ));
            let mut taps = vec![Complex64::new(0.0, 0.0); bins * tail];
            for f in 0..bins {
                for lag in delay + 1..tail {
                    let envelope = gain.abs() * reverb.decay_rate.powi((lag - delay) as i32);
                    taps[f * tail + lag] = complex_gaussian(&mut rng) * envelope;
                }
            }
            (taps, tail)
        }
        None => (Vec::new(), 0),
    };

    Ok(SpeakerPath {
        direct_taps,
        order,
        reverb_taps,
        tail,
    })
}

fn power_gain_for(reference_energy: f64, signal_energy: f64, ratio_db: f64) -> f64 {
    // gain such that reference / (gain² · signal) = 10^(ratio_db/10)
    (reference_energy / (signal_energy * 10f64.powf(ratio_db / 10.0))).sqrt()
}

/// Silence kept at both ends of every source. Frame shifts of a spectrogram
/// only correspond to a time-domain delay when the frames that touch the
/// reflected padding, and the frames pushed past the end, carry nothing.
fn edge_guard_samples(spec: &SceneSpec) -> Result<usize> {
    let mut span = spec.reverb.as_ref().map_or(0, |r| r.tail_frames);
    for n in 0..spec.num_speakers() {
        span = span.max(spec.delay_frames_of(n)? + 1);
    }
    let cfg = &spec.stft;
    let guard = span * cfg.hop_len() + cfg.window_len() + cfg.pad_len();
    Ok(guard.min(spec.num_samples() / 4))
}

/// Generates a scene with its full ground-truth decomposition.
pub fn synthesize_scene(spec: &SceneSpec) -> Result<SceneBundle> {
    spec.validate()?;
    let cfg = &spec.stft;
    let len = spec.num_samples();
    let bins = cfg.num_bins();
    let q = spec.target_index;
    let n_speakers = spec.num_speakers();

    let guard = edge_guard_samples(spec)?;
    let mut dry = Vec::with_capacity(n_speakers);
    for (n, speaker) in spec.speakers.iter().enumerate() {
        let mut samples = generate_source(
            speaker.source,
            len,
            cfg.sample_rate,
            mix_seed(spec.seed, STREAM_SOURCE, n as u64),
        )
        .into_samples();
        samples[..guard].fill(0.0);
        samples[len - guard..].fill(0.0);
        let wave = Waveform::new(samples, cfg.sample_rate)?;
        let mut s = stft(&wave, cfg)?;
        if spec.band_partition {
            if n == q {
                zero_bins(&mut s, |f| f % 2 == 0);
            } else {
                zero_bins(&mut s, |f| f % 2 == 1);
            }
        }
        dry.push(s);
    }
    let zero = dry[q].scaled(Complex64::new(0.0, 0.0));

    // Per-speaker, per-mic direct and reverberant components.
    let mut direct_parts = Vec::with_capacity(n_speakers);
    let mut reverb_parts = Vec::with_capacity(n_speakers);
    let mut target_filters = None;
    for (n, source) in dry.iter().enumerate() {
        let mut direct_mics = Vec::with_capacity(spec.num_mics);
        let mut reverb_mics = Vec::with_capacity(spec.num_mics);
        for p in 0..spec.num_mics {
            let path = speaker_path(spec, n, p, bins)?;
            direct_mics.push(narrowband_filter(source, &path.direct_taps, path.order));
            reverb_mics.push(if path.tail > 0 {
                narrowband_filter(source, &path.reverb_taps, path.tail)
            } else {
                zero.clone()
            });
            if n == q && p == 0 {
                target_filters = Some(GroundTruthFilters {
                    bins,
                    true_order: path.order,
                    delay_frames: path.order - 1,
                    direct: path.direct_taps,
                    tail_frames: path.tail,
                    reverb: path.reverb_taps,
                });
            }
        }
        direct_parts.push(direct_mics);
        reverb_parts.push(reverb_mics);
    }
    let filters = target_filters.expect("target speaker has a reference-mic path");

    let residual = 10f64.powf(spec.residual_interference_db / 20.0);
    let mut mic_signals = Vec::with_capacity(spec.num_mics);
    let mut noise_ref = zero.clone();
    let mut interference = zero.clone();
    for p in 0..spec.num_mics {
        let target_p = direct_parts[q][p].add(&reverb_parts[q][p]);
        let noise = match spec.noise_snr_db {
            Some(snr_db) => {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(mix_seed(spec.seed, STREAM_NOISE, p as u64));
                let mut v = zero.with_data(
                    (0..zero.data().len())
                        .map(|_| complex_gaussian(&mut rng))
                        .collect(),
                );
                if spec.band_partition {
                    zero_bins(&mut v, |f| f % 2 == 1);
                }
                let target_energy = target_p.energy();
                if target_energy == 0.0 {
                    return Err(Error::InvalidScene(
                        "target is silent, noise level cannot be calibrated".into(),
                    ));
                }
                let g = power_gain_for(target_energy, v.energy(), snr_db);
                v.scaled(Complex64::new(g, 0.0))
            }
            None => zero.clone(),
        };

        let mut mic = target_p;
        let mut others = zero.clone();
        for n in (0..n_speakers).filter(|&n| n != q) {
            let r = direct_parts[n][p].add(&reverb_parts[n][p]);
            mic = mic.add(&r);
            others = others.add(&r);
        }
        mic = mic.add(&noise);
        mic_signals.push(mic);

        if p == 0 {
            interference = others.scaled(Complex64::new(residual, 0.0)).add(&noise);
            noise_ref = noise;
        }
    }

    let direct_sound = direct_parts[q][0].clone();
    let nondirect = reverb_parts[q][0].clone();
    let far_mixture = direct_sound.add(&nondirect).add(&interference);

    let dry_source = dry[q].clone();
    let close_talk = match spec.leakage_db {
        Some(leak_db) if n_speakers > 1 => {
            let mut leak = zero.clone();
            for n in (0..n_speakers).filter(|&n| n != q) {
                leak = leak.add(&dry[n]);
            }
            let leak_energy = leak.energy();
            if leak_energy > 0.0 && dry_source.energy() > 0.0 {
                // leak_db is the leakage level relative to the target.
                let g = power_gain_for(dry_source.energy(), leak_energy, -leak_db);
                dry_source.add(&leak.scaled(Complex64::new(g, 0.0)))
            } else {
                dry_source.clone()
            }
        }
        _ => dry_source.clone(),
    };

    Ok(SceneBundle {
        far_mixture,
        direct_sound,
        nondirect,
        interference,
        noise: noise_ref,
        close_talk,
        dry_source,
        mic_signals,
        filters,
        spec: spec.clone(),
    })
}

/// Fraction of T-F bins where both `|a|²` and `|b|²` exceed `threshold`.
pub fn wdo_overlap_ratio(
    a: &ComplexSpectrogram,
    b: &ComplexSpectrogram,
    threshold: f64,
) -> Result<f64> {
    a.check_same_shape(b)?;
    let total = a.data().len();
    if total == 0 {
        return Ok(0.0);
    }
    let both = a
        .data()
        .iter()
        .zip(b.data())
        .filter(|(x, y)| x.norm_sqr() > threshold && y.norm_sqr() > threshold)
        .count();
    Ok(both as f64 / total as f64)
}
