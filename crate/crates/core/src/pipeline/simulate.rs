//! Writes a synthesised scene to disk as WAV files plus a ground-truth
//! sidecar, a segment list and a one-record manifest ready for `dse`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::audio::write_wav_f32;
use crate::pipeline::config::scene_spec_to_toml;
use crate::pipeline::manifest::{Manifest, ManifestRecord};
use crate::pipeline::segments::{Segment, SegmentList};
use crate::scene::{synthesize_scene, SceneBundle, SceneSpec};
use crate::spectral::istft;

pub const FAR_FIELD_WAV: &str = "far_field.wav";
pub const CLOSE_TALK_WAV: &str = "close_talk.wav";
pub const DIRECT_WAV: &str = "direct.wav";
pub const DRY_WAV: &str = "dry.wav";
pub const SEGMENTS_FILE: &str = "segments.jsonl";
pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const TRUTH_FILE: &str = "truth.json";
pub const SCENE_FILE: &str = "scene.toml";
pub const LABEL_WAV: &str = "pseudo_label.wav";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthSidecar {
    pub spec: SceneSpec,
    pub target_speaker_id: String,
    pub delay_frames: usize,
    pub true_order: usize,
    pub tail_frames: usize,
    pub num_samples: usize,
    pub frames: usize,
    pub bins: usize,
    /// Role → file name, relative to the scene directory.
    pub files: BTreeMap<String, PathBuf>,
}

pub fn speaker_id(index: usize) -> String {
    format!("spk{index}")
}

/// Synthesises `spec` and writes it under `dir`.
pub fn write_scene(spec: &SceneSpec, dir: &Path) -> Result<(SceneBundle, GroundTruthSidecar)> {
    let bundle = synthesize_scene(spec)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut files = BTreeMap::new();
    let mut emit =
        |role: &str, name: String, s: &crate::spectral::ComplexSpectrogram| -> Result<()> {
            write_wav_f32(&dir.join(&name), &istft(s)?)?;
            files.insert(role.to_string(), PathBuf::from(name));
            Ok(())
        };
    emit("far_field", FAR_FIELD_WAV.into(), &bundle.far_mixture)?;
    emit("close_talk", CLOSE_TALK_WAV.into(), &bundle.close_talk)?;
    emit("direct", DIRECT_WAV.into(), &bundle.direct_sound)?;
    emit("dry", DRY_WAV.into(), &bundle.dry_source)?;
    for (p, mic) in bundle.mic_signals.iter().enumerate() {
        emit(&format!("mic_{p}"), format!("mic_{p}.wav"), mic)?;
    }

    let target = speaker_id(spec.target_index);
    let segments = SegmentList::new(vec![Segment {
        speaker_id: target.clone(),
        start_s: 0.0,
        end_s: spec.num_samples() as f64 / spec.stft.sample_rate as f64,
    }])?;
    segments.write(&dir.join(SEGMENTS_FILE))?;
    files.insert("segments".into(), SEGMENTS_FILE.into());

    let manifest = Manifest::new(
        vec![ManifestRecord {
            utterance_id: format!("scene_{}", spec.seed),
            far_field_path: FAR_FIELD_WAV.into(),
            close_talk_path: CLOSE_TALK_WAV.into(),
            segments_path: SEGMENTS_FILE.into(),
            speaker_id: target.clone(),
            output_path: LABEL_WAV.into(),
            reference_path: Some(DIRECT_WAV.into()),
        }],
        dir,
    )?;
    manifest.write(&dir.join(MANIFEST_FILE))?;
    files.insert("manifest".into(), MANIFEST_FILE.into());

    let scene_path = dir.join(SCENE_FILE);
    std::fs::write(&scene_path, scene_spec_to_toml(spec)?)
        .map_err(|e| Error::io(&scene_path, e))?;
    files.insert("scene".into(), SCENE_FILE.into());

    let truth = GroundTruthSidecar {
        spec: spec.clone(),
        target_speaker_id: target,
        delay_frames: bundle.filters.delay_frames,
        true_order: bundle.filters.true_order,
        tail_frames: bundle.filters.tail_frames,
        num_samples: spec.num_samples(),
        frames: bundle.far_mixture.frames(),
        bins: bundle.far_mixture.bins(),
        files,
    };
    let truth_path = dir.join(TRUTH_FILE);
    let text = serde_json::to_string_pretty(&truth).expect("sidecar serialises") + "\n";
    std::fs::write(&truth_path, text).map_err(|e| Error::io(&truth_path, e))?;
    Ok((bundle, truth))
}
