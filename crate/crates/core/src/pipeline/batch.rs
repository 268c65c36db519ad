//! Pseudo-label generation over a manifest.
//!
//! Each record is processed independently: read both WAVs, gate the
//! close-talk channel with the speaker's segments, analyse, estimate,
//! synthesise, and write a 32-bit float WAV plus a JSON sidecar holding the
//! exact configuration used. A failing record is reported and never aborts
//! the batch. The report lists records in manifest order.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dse::{dse_estimate, DseConfig, FitDiagnostics};
use crate::error::{Error, Result};
use crate::pipeline::audio::{read_wav, write_wav_f32};
use crate::pipeline::manifest::{Manifest, ManifestRecord};
use crate::pipeline::segments::{mask_by_timestamps, SegmentList};
use crate::spectral::{istft, stft, StftConfig, Waveform};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchOptions {
    pub stft: StftConfig,
    pub dse: DseConfig,
    /// Worker threads; 0 lets the runtime decide.
    pub workers: usize,
    /// Include wall-clock timings in the report. Off by default so that
    /// reports are byte-reproducible.
    pub record_timings: bool,
}

impl BatchOptions {
    pub fn new(stft: StftConfig, distance_m: f64) -> Self {
        let dse = DseConfig::for_stft(distance_m, &stft);
        Self {
            stft,
            dse,
            workers: 0,
            record_timings: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordReport {
    pub utterance_id: String,
    pub status: RecordStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<FitDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub succeeded: usize,
    pub failed: usize,
    pub filter_order: usize,
    pub options: BatchOptions,
    pub records: Vec<RecordReport>,
}

impl BatchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }
}

/// Sidecar written next to every pseudo-label WAV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelSidecar {
    pub utterance_id: String,
    pub far_field_path: PathBuf,
    pub close_talk_path: PathBuf,
    pub segments_path: PathBuf,
    pub speaker_id: String,
    pub stft: StftConfig,
    pub dse: DseConfig,
    pub diagnostics: FitDiagnostics,
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension("json")
}

fn check_rate(w: &Waveform, cfg: &StftConfig) -> Result<()> {
    if w.sample_rate() != cfg.sample_rate {
        return Err(Error::SampleRateMismatch {
            expected: cfg.sample_rate,
            actual: w.sample_rate(),
        });
    }
    Ok(())
}

fn process_record(
    manifest: &Manifest,
    rec: &ManifestRecord,
    opts: &BatchOptions,
) -> Result<(PathBuf, FitDiagnostics)> {
    let far = read_wav(&manifest.resolve(&rec.far_field_path))?;
    let close = read_wav(&manifest.resolve(&rec.close_talk_path))?;
    check_rate(&far, &opts.stft)?;
    check_rate(&close, &opts.stft)?;

    let (far, close) = if far.len() != close.len() {
        log::warn!(
            "{}: far-field has {} samples, close-talk {}; truncating to the shorter",
            rec.utterance_id,
            far.len(),
            close.len()
        );
        let n = far.len().min(close.len());
        (
            Waveform::new(far.samples()[..n].to_vec(), far.sample_rate())?,
            Waveform::new(close.samples()[..n].to_vec(), close.sample_rate())?,
        )
    } else {
        (far, close)
    };

    let segments = SegmentList::read(&manifest.resolve(&rec.segments_path))?;
    let close = mask_by_timestamps(&close, &segments, &rec.speaker_id)?;

    let g = stft(&far, &opts.stft)?;
    let y = stft(&close, &opts.stft)?;
    let est = dse_estimate(&g, &y, &opts.dse)?;
    let label = istft(&est.estimate)?;

    let output = manifest.resolve(&rec.output_path);
    write_wav_f32(&output, &label)?;
    let sidecar = LabelSidecar {
        utterance_id: rec.utterance_id.clone(),
        far_field_path: rec.far_field_path.clone(),
        close_talk_path: rec.close_talk_path.clone(),
        segments_path: rec.segments_path.clone(),
        speaker_id: rec.speaker_id.clone(),
        stft: opts.stft.clone(),
        dse: opts.dse.clone(),
        diagnostics: est.diagnostics.clone(),
    };
    let side = sidecar_path(&output);
    let text = serde_json::to_string_pretty(&sidecar).expect("sidecar serialises") + "\n";
    std::fs::write(&side, text).map_err(|e| Error::io(&side, e))?;
    Ok((rec.output_path.clone(), est.diagnostics))
}

/// Runs estimation for every record. Only configuration problems fail the
/// whole call; record-level failures land in the report.
pub fn run_dse_batch(manifest: &Manifest, opts: &BatchOptions) -> Result<BatchReport> {
    opts.stft.validate()?;
    opts.dse.validate()?;
    let filter_order = opts.dse.order()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::param("workers", e.to_string()))?;

    let records: Vec<RecordReport> = pool.install(|| {
        manifest
            .records
            .par_iter()
            .map(|rec| {
                let started = Instant::now();
                let outcome = process_record(manifest, rec, opts);
                let elapsed_ms = opts
                    .record_timings
                    .then(|| started.elapsed().as_secs_f64() * 1e3);
                match outcome {
                    Ok((output_path, diagnostics)) => RecordReport {
                        utterance_id: rec.utterance_id.clone(),
                        status: RecordStatus::Ok,
                        error: None,
                        output_path: Some(output_path),
                        diagnostics: Some(diagnostics),
                        elapsed_ms,
                    },
                    Err(e) => {
                        log::error!("{}: {e}", rec.utterance_id);
                        RecordReport {
                            utterance_id: rec.utterance_id.clone(),
                            status: RecordStatus::Failed,
                            error: Some(e.to_string()),
                            output_path: None,
                            diagnostics: None,
                            elapsed_ms,
                        }
                    }
                }
            })
            .collect()
    });

    let failed = records
        .iter()
        .filter(|r| r.status == RecordStatus::Failed)
        .count();
    Ok(BatchReport {
        succeeded: records.len() - failed,
        failed,
        filter_order,
        options: opts.clone(),
        records,
    })
}
