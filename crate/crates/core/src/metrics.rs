//! Reference-based quality metrics used to score estimates against known
//! ground truth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    compress_magnitude, istft, ComplexSpectrogram, MagnitudeSpectrogram, Waveform,
};

/// SI-SDR values are clamped to ±this many dB; exact matches report the cap.
pub const SI_SDR_CAP_DB: f64 = 100.0;

pub const DEFAULT_LSD_FLOOR: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub si_sdr_db: f64,
    pub lsd_db: f64,
    pub spectral_cosine: f64,
}

impl MetricReport {
    /// Whether SI-SDR hit the upper cap (numerically exact match).
    pub fn is_exact(&self) -> bool {
        self.si_sdr_db >= SI_SDR_CAP_DB
    }
}

/// Scale-invariant signal-to-distortion ratio in dB.
pub fn si_sdr(estimate: &Waveform, reference: &Waveform) -> Result<f64> {
    si_sdr_samples(estimate.samples(), reference.samples())
}

pub fn si_sdr_samples(estimate: &[f64], reference: &[f64]) -> Result<f64> {
    if estimate.len() != reference.len() {
        return Err(Error::LengthMismatch {
            left: estimate.len(),
            right: reference.len(),
        });
    }
    let ref_energy: f64 = reference.iter().map(|r| r * r).sum();
    if ref_energy == 0.0 {
        return Err(Error::ZeroReference);
    }
    let dot: f64 = estimate.iter().zip(reference).map(|(e, r)| e * r).sum();
    let scale = dot / ref_energy;
    let mut target_energy = 0.0;
    let mut error_energy = 0.0;
    for (e, r) in estimate.iter().zip(reference) {
        let target = scale * r;
        target_energy += target * target;
        error_energy += (e - target) * (e - target);
    }
    if error_energy == 0.0 {
        return Ok(if target_energy > 0.0 {
            SI_SDR_CAP_DB
        } else {
            -SI_SDR_CAP_DB
        });
    }
    if target_energy == 0.0 {
        return Ok(-SI_SDR_CAP_DB);
    }
    Ok((10.0 * (target_energy / error_energy).log10()).clamp(-SI_SDR_CAP_DB, SI_SDR_CAP_DB))
}

/// SI-SDR between two spectrograms after synthesis.
pub fn si_sdr_spectrogram(
    estimate: &ComplexSpectrogram,
    reference: &ComplexSpectrogram,
) -> Result<f64> {
    si_sdr(&istft(estimate)?, &istft(reference)?)
}

/// RMS over bins of `10·log10((|a|² + floor) / (|b|² + floor))`.
pub fn log_spectral_distance(
    a: &ComplexSpectrogram,
    b: &ComplexSpectrogram,
    floor: f64,
) -> Result<f64> {
    a.check_same_shape(b)?;
    if !(floor > 0.0 && floor.is_finite()) {
        return Err(Error::param("floor", format!("{floor} must be > 0")));
    }
    let n = a.data().len();
    if n == 0 {
        return Ok(0.0);
    }
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| {
            let d = 10.0 * ((x.norm_sqr() + floor) / (y.norm_sqr() + floor)).log10();
            d * d
        })
        .sum();
    Ok((sum / n as f64).sqrt())
}

/// Frobenius cosine similarity between magnitude spectrograms.
pub fn spectral_cosine(a: &MagnitudeSpectrogram, b: &MagnitudeSpectrogram) -> Result<f64> {
    crate::losses::cosine_similarity(a, b)
}

/// All metrics for an estimate/reference pair sharing one STFT setup.
pub fn evaluate(
    estimate: &ComplexSpectrogram,
    reference: &ComplexSpectrogram,
    compression: f64,
) -> Result<MetricReport> {
    let si_sdr_db = si_sdr_spectrogram(estimate, reference)?;
    let lsd_db = log_spectral_distance(estimate, reference, DEFAULT_LSD_FLOOR)?;
    let spectral_cosine = spectral_cosine(
        &compress_magnitude(estimate, compression)?,
        &compress_magnitude(reference, compression)?,
    )?;
    Ok(MetricReport {
        si_sdr_db,
        lsd_db,
        spectral_cosine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::StftConfig;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(len: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn si_sdr_exact_and_scaled() {
        let r = random(1000, 1);
        assert_eq!(si_sdr_samples(&r, &r).unwrap(), SI_SDR_CAP_DB);
        let doubled: Vec<f64> = r.iter().map(|v| 2.0 * v).collect();
        assert!(si_sdr_samples(&doubled, &r).unwrap() >= SI_SDR_CAP_DB - 1e-9);
    }

    #[test]
    fn si_sdr_with_orthogonal_noise_at_100_to_1() {
        let r = random(4096, 2);
        let mut n = random(4096, 3);
        // Remove the component of n along r, then set power to 1/100 of r.
        let rr: f64 = r.iter().map(|v| v * v).sum();
        let nr: f64 = n.iter().zip(&r).map(|(a, b)| a * b).sum();
        for (x, y) in n.iter_mut().zip(&r) {
            *x -= nr / rr * y;
        }
        let nn: f64 = n.iter().map(|v| v * v).sum();
        let g = (rr / 100.0 / nn).sqrt();
        let est: Vec<f64> = r.iter().zip(&n).map(|(a, b)| a + g * b).collect();
        assert!((si_sdr_samples(&est, &r).unwrap() - 20.0).abs() < 0.01);
    }

    #[test]
    fn si_sdr_errors() {
        assert!(matches!(
            si_sdr_samples(&[1.0, 2.0], &[0.0, 0.0]),
            Err(Error::ZeroReference)
        ));
        assert!(matches!(
            si_sdr_samples(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    fn spec(values: &[Complex64]) -> ComplexSpectrogram {
        ComplexSpectrogram::from_data(1, values.len(), values.to_vec(), StftConfig::default(), 0)
            .unwrap()
    }

    #[test]
    fn lsd_examples() {
        let a = spec(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)]);
        assert_eq!(log_spectral_distance(&a, &a, 1e-12).unwrap(), 0.0);
        let b = spec(&[
            Complex64::new(10f64.sqrt(), 0.0),
            Complex64::new(0.0, 2.0 * 10f64.sqrt()),
        ]);
        assert!((log_spectral_distance(&b, &a, 1e-12).unwrap() - 10.0).abs() < 1e-9);
        assert!(log_spectral_distance(&a, &b, 0.0).is_err());
    }

    #[test]
    fn lsd_matches_bin_by_bin_computation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut draw = || -> Vec<Complex64> {
            (0..60)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        };
        let (av, bv) = (draw(), draw());
        let floor = 1e-3;
        let mut acc = 0.0;
        for i in 0..av.len() {
            let pa = av[i].re * av[i].re + av[i].im * av[i].im;
            let pb = bv[i].re * bv[i].re + bv[i].im * bv[i].im;
            let d = 10.0 * ((pa + floor) / (pb + floor)).log10();
            acc += d * d;
        }
        let expected = (acc / av.len() as f64).sqrt();
        let got = log_spectral_distance(&spec(&av), &spec(&bv), floor).unwrap();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn spectral_cosine_examples() {
        let a = MagnitudeSpectrogram::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let b = MagnitudeSpectrogram::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((spectral_cosine(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(spectral_cosine(&a, &b).unwrap(), 0.0);
        let x = MagnitudeSpectrogram::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let y = MagnitudeSpectrogram::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert!((spectral_cosine(&x, &y).unwrap() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }
}
