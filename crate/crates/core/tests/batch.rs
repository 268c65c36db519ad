use std::path::{Path, PathBuf};

use dse_core::pipeline::batch::{sidecar_path, LabelSidecar};
use dse_core::pipeline::simulate::{write_scene, CLOSE_TALK_WAV, FAR_FIELD_WAV, SEGMENTS_FILE};
use dse_core::pipeline::{
    evaluate_manifest, run_dse_batch, write_wav_f32, BatchOptions, Manifest, ManifestRecord,
    RecordStatus,
};
use dse_core::{SceneSpec, StftConfig, Waveform};

fn record(id: &str, dir: &str) -> ManifestRecord {
    ManifestRecord {
        utterance_id: id.into(),
        far_field_path: PathBuf::from(dir).join(FAR_FIELD_WAV),
        close_talk_path: PathBuf::from(dir).join(CLOSE_TALK_WAV),
        segments_path: PathBuf::from(dir).join(SEGMENTS_FILE),
        speaker_id: "spk0".into(),
        output_path: PathBuf::from(dir).join("label.wav"),
        reference_path: Some(PathBuf::from(dir).join("direct.wav")),
    }
}

fn scene(root: &Path, name: &str, seed: u64, distance: f64) {
    write_scene(
        &SceneSpec::single_speaker(seed, distance, 0.7),
        &root.join(name),
    )
    .unwrap();
}

#[test]
fn empty_manifest_yields_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let m = Manifest::new(vec![], dir.path()).unwrap();
    let report = run_dse_batch(&m, &BatchOptions::new(StftConfig::default(), 5.0)).unwrap();
    assert_eq!((report.succeeded, report.failed), (0, 0));
    assert_eq!(report.filter_order, 4);
    assert!(report.records.is_empty());
}

#[test]
fn failures_are_isolated_and_counted() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    for (i, d) in ["a", "b", "c", "d"].iter().enumerate() {
        scene(root, d, i as u64, 3.0);
    }
    // b: far-field at another sample rate.
    write_wav_f32(
        &root.join("b").join(FAR_FIELD_WAV),
        &Waveform::zeros(8000, 8_000),
    )
    .unwrap();
    // c: close-talk missing.
    std::fs::remove_file(root.join("c").join(CLOSE_TALK_WAV)).unwrap();
    // d: segment list is not JSON.
    std::fs::write(root.join("d").join(SEGMENTS_FILE), "{not json\n").unwrap();

    let records = ["a", "b", "c", "d"].iter().map(|d| record(d, d)).collect();
    let m = Manifest::new(records, root).unwrap();
    let mut opts = BatchOptions::new(StftConfig::default(), 3.0);
    opts.workers = 3;
    let report = run_dse_batch(&m, &opts).unwrap();
    assert_eq!(report.succeeded, 1);
    assert_eq!(report.failed, 3);
    let ids: Vec<_> = report
        .records
        .iter()
        .map(|r| r.utterance_id.as_str())
        .collect();
    assert_eq!(ids, ["a", "b", "c", "d"]);
    assert_eq!(report.records[0].status, RecordStatus::Ok);
    assert!(report.records[1]
        .error
        .as_ref()
        .unwrap()
        .contains("sample rate"));
    assert!(report.records[1..]
        .iter()
        .all(|r| r.status == RecordStatus::Failed && r.error.is_some()));
    assert!(root.join("a/label.wav").exists());
    assert!(!root.join("b/label.wav").exists());
}

#[test]
fn simulated_scenes_are_recovered_and_provenance_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let names = ["s0", "s1", "s2"];
    for (i, d) in names.iter().enumerate() {
        scene(root, d, 40 + i as u64, 1.0 + 2.0 * i as f64);
    }
    let m = Manifest::new(names.iter().map(|d| record(d, d)).collect(), root).unwrap();
    let opts = BatchOptions::new(StftConfig::default(), 5.0);
    let report = run_dse_batch(&m, &opts).unwrap();
    assert_eq!(report.failed, 0);

    for row in evaluate_manifest(&m, &opts.stft, 0.3) {
        let metrics = row.metrics.unwrap();
        assert!(
            metrics.si_sdr_db >= 40.0,
            "{}: {}",
            row.utterance_id,
            metrics.si_sdr_db
        );
    }
    let side: LabelSidecar = serde_json::from_str(
        &std::fs::read_to_string(sidecar_path(&root.join("s0/label.wav"))).unwrap(),
    )
    .unwrap();
    assert_eq!(side.dse, opts.dse);
    assert_eq!(side.stft, opts.stft);
    assert_eq!(side.diagnostics.order, 4);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    scene(root, "x", 5, 4.0);
    let m = Manifest::new(vec![record("x", "x")], root).unwrap();
    let opts = BatchOptions::new(StftConfig::default(), 5.0);
    let first = run_dse_batch(&m, &opts).unwrap().to_json();
    let wav1 = std::fs::read(root.join("x/label.wav")).unwrap();
    let second = run_dse_batch(&m, &opts).unwrap().to_json();
    let wav2 = std::fs::read(root.join("x/label.wav")).unwrap();
    assert_eq!(first, second);
    assert_eq!(wav1, wav2);
    assert!(!first.contains("elapsed_ms"));
}
