//! Waveform-level evaluation and loss reporting.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::losses::{cossim_loss, mca_loss, mse_loss, LossConfig};
use crate::metrics::{
    log_spectral_distance, si_sdr, spectral_cosine, MetricReport, DEFAULT_LSD_FLOOR,
};
use crate::pipeline::audio::read_wav;
use crate::pipeline::manifest::Manifest;
use crate::spectral::{compress_magnitude, stft, StftConfig, Waveform};

fn check_pair(a: &Waveform, b: &Waveform) -> Result<()> {
    if a.sample_rate() != b.sample_rate() {
        return Err(Error::SampleRateMismatch {
            expected: b.sample_rate(),
            actual: a.sample_rate(),
        });
    }
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// SI-SDR on the waveforms; LSD and spectral cosine on their STFTs.
pub fn evaluate_waves(
    estimate: &Waveform,
    reference: &Waveform,
    stft_cfg: &StftConfig,
    compression: f64,
) -> Result<MetricReport> {
    check_pair(estimate, reference)?;
    let si_sdr_db = si_sdr(estimate, reference)?;
    let e = stft(estimate, stft_cfg)?;
    let r = stft(reference, stft_cfg)?;
    let lsd_db = log_spectral_distance(&e, &r, DEFAULT_LSD_FLOOR)?;
    let cosine = spectral_cosine(
        &compress_magnitude(&e, compression)?,
        &compress_magnitude(&r, compression)?,
    )?;
    Ok(MetricReport {
        si_sdr_db,
        lsd_db,
        spectral_cosine: cosine,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub utterance_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Scores each record's output against its `reference_path`.
pub fn evaluate_manifest(
    manifest: &Manifest,
    stft_cfg: &StftConfig,
    compression: f64,
) -> Vec<EvalRow> {
    manifest
        .records
        .iter()
        .map(|rec| {
            let outcome = (|| {
                let reference = rec.reference_path.as_ref().ok_or_else(|| {
                    Error::InvalidManifest(format!("{}: no reference_path", rec.utterance_id))
                })?;
                let est = read_wav(&manifest.resolve(&rec.output_path))?;
                let reference = read_wav(&manifest.resolve(reference))?;
                evaluate_waves(&est, &reference, stft_cfg, compression)
            })();
            match outcome {
                Ok(m) => EvalRow {
                    utterance_id: rec.utterance_id.clone(),
                    metrics: Some(m),
                    error: None,
                },
                Err(e) => EvalRow {
                    utterance_id: rec.utterance_id.clone(),
                    metrics: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

pub fn format_table(rows: &[EvalRow]) -> String {
    let width = rows
        .iter()
        .map(|r| r.utterance_id.len())
        .max()
        .unwrap_or(0)
        .max("utterance".len());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>10}  {:>10}  {:>8}",
        "utterance", "si_sdr_db", "lsd_db", "cosine"
    );
    for r in rows {
        match (&r.metrics, &r.error) {
            (Some(m), _) => {
                let _ = writeln!(
                    out,
                    "{:<width$}  {:>10.3}  {:>10.3}  {:>8.5}",
                    r.utterance_id, m.si_sdr_db, m.lsd_db, m.spectral_cosine
                );
            }
            (None, err) => {
                let _ = writeln!(
                    out,
                    "{:<width$}  error: {}",
                    r.utterance_id,
                    err.as_deref().unwrap_or("unknown")
                );
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub mse: f64,
    pub cossim: f64,
    pub mca: f64,
    pub alpha: f64,
    pub compression: f64,
}

/// Losses between two waveforms' compressed magnitude spectrograms.
pub fn loss_between_waves(
    a: &Waveform,
    b: &Waveform,
    stft_cfg: &StftConfig,
    compression: f64,
    cfg: &LossConfig,
) -> Result<LossReport> {
    check_pair(a, b)?;
    let ma = compress_magnitude(&stft(a, stft_cfg)?, compression)?;
    let mb = compress_magnitude(&stft(b, stft_cfg)?, compression)?;
    Ok(LossReport {
        mse: mse_loss(&ma, &mb)?,
        cossim: cossim_loss(&ma, &mb)?,
        mca: mca_loss(&ma, &mb, cfg)?,
        alpha: cfg.alpha,
        compression,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(seed: u64) -> Waveform {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Waveform::new(
            (0..4000).map(|_| rng.gen_range(-0.5..0.5)).collect(),
            16_000,
        )
        .unwrap()
    }

    #[test]
    fn identical_waves_score_perfectly() {
        let w = noise(1);
        let cfg = StftConfig::default();
        let m = evaluate_waves(&w, &w, &cfg, 0.3).unwrap();
        assert!(m.is_exact());
        assert_eq!(m.lsd_db, 0.0);
        assert!((m.spectral_cosine - 1.0).abs() < 1e-12);
        let l = loss_between_waves(&w, &w, &cfg, 0.3, &LossConfig::default()).unwrap();
        assert_eq!(l.mse, 0.0);
        assert!(l.mca.abs() < 1e-12);
    }

    #[test]
    fn mismatched_pairs_are_rejected() {
        let cfg = StftConfig::default();
        let a = noise(1);
        let b = Waveform::new(a.samples()[..100].to_vec(), 16_000).unwrap();
        assert!(evaluate_waves(&a, &b, &cfg, 0.3).is_err());
        let c = Waveform::new(a.samples().to_vec(), 8_000).unwrap();
        assert!(loss_between_waves(&a, &c, &cfg, 0.3, &LossConfig::default()).is_err());
    }

    #[test]
    fn table_lists_rows_and_errors() {
        let rows = vec![
            EvalRow {
                utterance_id: "u1".into(),
                metrics: Some(MetricReport {
                    si_sdr_db: 12.5,
                    lsd_db: 1.25,
                    spectral_cosine: 0.9,
                }),
                error: None,
            },
            EvalRow {
                utterance_id: "u2".into(),
                metrics: None,
                error: Some("missing".into()),
            },
        ];
        let table = format_table(&rows);
        assert!(table.contains("12.500"));
        assert!(table.contains("u2         error: missing"));
    }
}
