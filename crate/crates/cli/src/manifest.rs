//! Run manifests: the resolved arguments plus sha256 digests of every input
//! and artifact, written next to the command's main output.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::settings::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
    /// Contains wall-clock timings, so a replay gives a different digest.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub volatile: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub arguments: Value,
    pub inputs: Vec<FileDigest>,
    pub artifacts: Vec<FileDigest>,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| kgalign::Error::Io { path: path.to_path_buf(), source: e })?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn digest(role: &str, path: &Path) -> Result<FileDigest, CliError> {
    Ok(FileDigest {
        role: role.to_string(),
        path: path.display().to_string(),
        sha256: sha256_file(path)?,
        volatile: false,
    })
}

impl Manifest {
    pub fn new(command: &str, seed: Option<u64>, arguments: Value) -> Self {
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            arguments,
            inputs: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn input(&mut self, role: &str, path: &Path) -> Result<(), CliError> {
        self.inputs.push(digest(role, path)?);
        Ok(())
    }

    pub fn artifact(&mut self, role: &str, path: &Path) -> Result<(), CliError> {
        self.artifacts.push(digest(role, path)?);
        Ok(())
    }

    pub fn volatile_artifact(&mut self, role: &str, path: &Path) -> Result<(), CliError> {
        let mut d = digest(role, path)?;
        d.volatile = true;
        self.artifacts.push(d);
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_json(path, self)
    }
}

/// `out.tsv` -> `out.tsv.<suffix>`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| kgalign::Error::Io { path: path.to_path_buf(), source: e }.into())
}
