//! Human-readable configuration documents (TOML, units in key names).

use std::path::Path;

use crate::error::{Error, Result};
use crate::scene::SceneSpec;

pub fn scene_spec_from_toml(text: &str, origin: &Path) -> Result<SceneSpec> {
    let spec: SceneSpec = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        reason: e.to_string(),
    })?;
    spec.validate()?;
    Ok(spec)
}

pub fn read_scene_spec(path: &Path) -> Result<SceneSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    scene_spec_from_toml(&text, path)
}

pub fn scene_spec_to_toml(spec: &SceneSpec) -> Result<String> {
    toml::to_string_pretty(spec).map_err(|e| Error::param("scene", e.to_string()))
}
