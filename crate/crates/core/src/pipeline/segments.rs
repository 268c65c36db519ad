//! Speaker-tagged time segments and timestamp masking.
//!
//! Segment lists are stored one JSON object per line:
//!
//! ```text
//! {"speaker_id":"spk0","start_s":0.25,"end_s":1.5}
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Waveform;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub speaker_id: String,
    pub start_s: f64,
    pub end_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SegmentList {
    entries: Vec<Segment>,
}

impl SegmentList {
    pub fn new(entries: Vec<Segment>) -> Result<Self> {
        let mut last_end: BTreeMap<&str, f64> = BTreeMap::new();
        for (i, s) in entries.iter().enumerate() {
            if !(s.start_s.is_finite()
                && s.end_s.is_finite()
                && s.start_s >= 0.0
                && s.start_s < s.end_s)
            {
                return Err(Error::InvalidSegments(format!(
                    "entry {i} ({}): need 0 <= start < end, got [{}, {})",
                    s.speaker_id, s.start_s, s.end_s
                )));
            }
            if let Some(&end) = last_end.get(s.speaker_id.as_str()) {
                if s.start_s < end {
                    return Err(Error::InvalidSegments(format!(
                        "entry {i} ({}): starts at {} before the previous segment ends at {end}",
                        s.speaker_id, s.start_s
                    )));
                }
            }
            last_end.insert(&s.speaker_id, s.end_s);
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Segment] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains_speaker(&self, speaker: &str) -> bool {
        self.entries.iter().any(|s| s.speaker_id == speaker)
    }

    pub fn for_speaker<'a>(&'a self, speaker: &'a str) -> impl Iterator<Item = &'a Segment> + 'a {
        self.entries.iter().filter(move |s| s.speaker_id == speaker)
    }

    pub fn parse_jsonl(text: &str, origin: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let seg: Segment = serde_json::from_str(line).map_err(|e| Error::Parse {
                path: origin.to_path_buf(),
                reason: format!("line {}: {e}", n + 1),
            })?;
            entries.push(seg);
        }
        Self::new(entries)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_jsonl(&text, path)
    }

    pub fn to_jsonl(&self) -> String {
        self.entries
            .iter()
            .map(|s| serde_json::to_string(s).expect("segments serialise") + "\n")
            .collect()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_jsonl()).map_err(|e| Error::io(path, e))
    }
}

/// Keeps samples inside `speaker`'s segments and zeroes everything else.
///
/// An empty list masks everything. A non-empty list without `speaker` is an
/// error. Segments running past the end of the waveform are clipped.
pub fn mask_by_timestamps(w: &Waveform, segs: &SegmentList, speaker: &str) -> Result<Waveform> {
    if !segs.is_empty() && !segs.contains_speaker(speaker) {
        return Err(Error::UnknownSpeaker(speaker.to_string()));
    }
    let sr = w.sample_rate() as f64;
    let len = w.len();
    let mut keep = vec![false; len];
    for seg in segs.for_speaker(speaker) {
        let start = (seg.start_s * sr).round() as usize;
        let end = (seg.end_s * sr).round() as usize;
        if end > len {
            log::warn!(
                "segment [{}, {}) s of {} runs past the {:.3} s waveform; clipping",
                seg.start_s,
                seg.end_s,
                speaker,
                w.duration_s()
            );
        }
        let (start, end) = (start.min(len), end.min(len));
        keep[start..end].iter_mut().for_each(|k| *k = true);
    }
    let samples = w
        .samples()
        .iter()
        .zip(&keep)
        .map(|(&s, &k)| if k { s } else { 0.0 })
        .collect();
    Waveform::new(samples, w.sample_rate())
}
