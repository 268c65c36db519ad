//! File formats and batch orchestration around the estimator.

pub mod audio;
pub mod batch;
pub mod config;
pub mod eval;
pub mod manifest;
pub mod segments;
pub mod simulate;

pub use audio::{read_wav, write_wav_f32, write_wav_i16};
pub use batch::{run_dse_batch, BatchOptions, BatchReport, RecordReport, RecordStatus};
pub use config::{read_scene_spec, scene_spec_from_toml, scene_spec_to_toml};
pub use eval::{
    evaluate_manifest, evaluate_waves, format_table, loss_between_waves, EvalRow, LossReport,
};
pub use manifest::{Manifest, ManifestRecord};
pub use segments::{mask_by_timestamps, Segment, SegmentList};
pub use simulate::{write_scene, GroundTruthSidecar};
