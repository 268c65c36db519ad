//! Batch manifests: one JSON record per line. Relative paths resolve
//! against the manifest's directory.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub utterance_id: String,
    pub far_field_path: PathBuf,
    pub close_talk_path: PathBuf,
    pub segments_path: PathBuf,
    /// Speaker whose segments gate the close-talk channel.
    pub speaker_id: String,
    pub output_path: PathBuf,
    /// Ground-truth direct sound, when known; used by evaluation only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_path: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Manifest {
    pub records: Vec<ManifestRecord>,
    pub base_dir: PathBuf,
}

impl Manifest {
    pub fn new(records: Vec<ManifestRecord>, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &records {
            if r.utterance_id.is_empty() {
                return Err(Error::InvalidManifest("empty utterance_id".into()));
            }
            if !seen.insert(r.utterance_id.as_str()) {
                return Err(Error::InvalidManifest(format!(
                    "duplicate utterance_id `{}`",
                    r.utterance_id
                )));
            }
            for (name, p) in [
                ("far_field_path", &r.far_field_path),
                ("close_talk_path", &r.close_talk_path),
                ("segments_path", &r.segments_path),
                ("output_path", &r.output_path),
            ] {
                if p.as_os_str().is_empty() {
                    return Err(Error::InvalidManifest(format!(
                        "{}: empty {name}",
                        r.utterance_id
                    )));
                }
            }
        }
        Ok(Self {
            records,
            base_dir: base_dir.into(),
        })
    }

    pub fn parse_jsonl(text: &str, base_dir: impl Into<PathBuf>, origin: &Path) -> Result<Self> {
        let mut records = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            records.push(serde_json::from_str(line).map_err(|e| Error::Parse {
                path: origin.to_path_buf(),
                reason: format!("line {}: {e}", n + 1),
            })?);
        }
        Self::new(records, base_dir)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse_jsonl(&text, base, path)
    }

    pub fn to_jsonl(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialise") + "\n")
            .collect()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_jsonl()).map_err(|e| Error::io(path, e))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str) -> ManifestRecord {
        ManifestRecord {
            utterance_id: id.into(),
            far_field_path: "far.wav".into(),
            close_talk_path: "close.wav".into(),
            segments_path: "segs.jsonl".into(),
            speaker_id: "spk0".into(),
            output_path: format!("out/{id}.wav").into(),
            reference_path: None,
        }
    }

    #[test]
    fn parses_and_resolves_relative_paths() {
        let m = Manifest::new(vec![record("u1"), record("u2")], "/data").unwrap();
        let text = m.to_jsonl();
        let back = Manifest::parse_jsonl(&text, "/data", Path::new("m.jsonl")).unwrap();
        assert_eq!(back, m);
        assert_eq!(
            back.resolve(&back.records[0].far_field_path),
            PathBuf::from("/data/far.wav")
        );
        assert_eq!(
            back.resolve(Path::new("/abs.wav")),
            PathBuf::from("/abs.wav")
        );
    }

    #[test]
    fn rejects_duplicates_and_empty_paths() {
        assert!(Manifest::new(vec![record("u1"), record("u1")], "").is_err());
        let mut r = record("u1");
        r.output_path = PathBuf::new();
        assert!(Manifest::new(vec![r], "").is_err());
    }

    #[test]
    fn empty_manifest_is_valid() {
        let m = Manifest::parse_jsonl("\n\n", "", Path::new("m")).unwrap();
        assert!(m.is_empty());
    }
}
