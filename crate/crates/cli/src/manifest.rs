//! Run manifests: the reproducibility record every command drops next to
//! its outputs.
//!
//! A manifest captures the resolved configuration, every seed, and a
//! SHA-256 digest of every input file — enough to rerun the command and
//! obtain byte-identical outputs. It deliberately carries no timestamps
//! or host details, so a faithful rerun also reproduces the manifest
//! itself. Each output directory holds exactly one `manifest.json`; a
//! run that fails midway still writes one, marked `failed`, so partial
//! output sets are never mistaken for complete ones.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{io_error, CliError};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Failed,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub tool_version: &'static str,
    /// Fully resolved options, after config files and flag overrides.
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<InputDigest>,
    /// Files created in the output directory, in creation order.
    pub outputs: Vec<String>,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunManifest {
    pub fn new(command: &'static str, config: serde_json::Value, seeds: Vec<u64>) -> Self {
        RunManifest {
            command,
            tool_version: env!("CARGO_PKG_VERSION"),
            config,
            seeds,
            inputs: Vec::new(),
            outputs: Vec::new(),
            status: RunStatus::Failed,
            error: None,
        }
    }

    /// Digest an input file and add it to the record. Fails — before any
    /// output is produced — when the file cannot be read.
    pub fn record_input(&mut self, path: &Path) -> Result<(), CliError> {
        let digest = sha256_hex(path)?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: digest,
        });
        Ok(())
    }

    pub fn record_output(&mut self, name: &str) {
        self.outputs.push(name.to_string());
    }

    fn write(&self, out_dir: &Path) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        let path = out_dir.join(MANIFEST_NAME);
        std::fs::write(&path, bytes).map_err(|e| io_error(&path, e))
    }
}

/// Create the output directory, run the command body, and always leave a
/// manifest behind: `ok` listing the outputs on success, `failed` with
/// the error message otherwise.
pub fn with_manifest(
    out_dir: &Path,
    mut manifest: RunManifest,
    body: impl FnOnce(&mut RunManifest) -> Result<(), CliError>,
) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;
    match body(&mut manifest) {
        Ok(()) => {
            manifest.status = RunStatus::Ok;
            manifest.write(out_dir)
        }
        Err(err) => {
            manifest.status = RunStatus::Failed;
            manifest.error = Some(err.to_string());
            if let Err(write_err) = manifest.write(out_dir) {
                eprintln!("warning: could not record the failure: {write_err}");
            }
            Err(err)
        }
    }
}

/// Write one output file and record it in the manifest.
pub fn write_output(
    manifest: &mut RunManifest,
    out_dir: &Path,
    name: &str,
    bytes: &[u8],
) -> Result<(), CliError> {
    let path = out_dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| io_error(&path, e))?;
    manifest.record_output(name);
    Ok(())
}

fn sha256_hex(path: &Path) -> Result<String, CliError> {
    let mut file = File::open(path).map_err(|e| io_error(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 65536];
    loop {
        let n = file.read(&mut buf).map_err(|e| io_error(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(digest.len() * 2);
    for byte in digest {
        use std::fmt::Write;
        write!(hex, "{byte:02x}").expect("writing to a String cannot fail");
    }
    Ok(hex)
}
