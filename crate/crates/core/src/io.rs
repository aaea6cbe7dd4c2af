//! JSON and text file helpers with path-carrying errors.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{FamilySpec, IndexedFamily};
use crate::metric::{build_space, FiniteMetricSpace, SpaceSpec};
use crate::profile::ScaleProfile;

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn read_space(path: &Path) -> Result<FiniteMetricSpace> {
    build_space(&read_json::<SpaceSpec>(path)?)
}

pub fn read_family(path: &Path, space: &FiniteMetricSpace) -> Result<IndexedFamily> {
    IndexedFamily::from_spec(read_json::<FamilySpec>(path)?, space)
}

pub fn read_profile(path: &Path) -> Result<ScaleProfile> {
    ScaleProfile::from_csv(&read_text(path)?)
}
