//! Run manifests: what was run, on which inputs, producing which outputs.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use sepprob::{Error, Result};

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub args: Vec<String>,
    pub seeds: Vec<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub started_unix: u64,
    pub finished_unix: u64,
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub fn digest(path: &Path) -> Result<FileDigest> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

/// `results.json` gets `results.json.manifest.json` beside it.
pub fn manifest_path(first_output: &Path) -> PathBuf {
    let mut name = first_output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    first_output.with_file_name(name)
}

pub fn write_manifest(
    command: &str,
    args: Vec<String>,
    seeds: Vec<u64>,
    inputs: &[PathBuf],
    outputs: &[PathBuf],
    started_unix: u64,
) -> Result<Option<PathBuf>> {
    let Some(first) = outputs.first() else {
        return Ok(None);
    };
    let m = RunManifest {
        tool: "sepprob".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        args,
        seeds,
        inputs: inputs.iter().map(|p| digest(p)).collect::<Result<_>>()?,
        outputs: outputs.iter().map(|p| digest(p)).collect::<Result<_>>()?,
        started_unix,
        finished_unix: unix_now(),
    };
    let path = manifest_path(first);
    let text = serde_json::to_string_pretty(&m).expect("serializable") + "\n";
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(Some(path))
}
