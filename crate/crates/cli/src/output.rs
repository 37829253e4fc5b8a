//! Atomic file output and the run manifest.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::CliError;

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex(&Sha256::digest(data))
}

/// Writes through a temporary file in the same directory and renames it into
/// place, so an interrupted run never leaves a truncated file behind.
pub fn write_atomic(path: &Path, data: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(data)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct FileHash {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config: String,
    pub version: String,
    pub platform: String,
    pub wall_clock_unix: u64,
    pub files: Vec<FileHash>,
    /// Hash over the config echo, version, platform and every file hash.
    /// Wall-clock time is excluded so repeated runs agree.
    pub manifest_hash: String,
}

/// Collects output files for one run, then writes the manifest last.
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<FileHash>,
}

impl OutputSet {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), files: Vec::new() }
    }

    pub fn write(&mut self, name: &str, data: &[u8]) -> Result<(), CliError> {
        write_atomic(&self.dir.join(name), data)?;
        self.files.push(FileHash { file: name.to_string(), sha256: sha256_hex(data), bytes: data.len() });
        Ok(())
    }

    pub fn finish(mut self, config: &ExperimentConfig) -> Result<RunManifest, CliError> {
        self.files.sort_by(|a, b| a.file.cmp(&b.file));
        let version = env!("CARGO_PKG_VERSION").to_string();
        let platform = format!("{}-{}", std::env::consts::ARCH, std::env::consts::OS);
        let mut h = Sha256::new();
        h.update(config.echo().as_bytes());
        h.update(version.as_bytes());
        h.update(platform.as_bytes());
        for f in &self.files {
            h.update(f.file.as_bytes());
            h.update(f.sha256.as_bytes());
        }
        let manifest = RunManifest {
            config: config.echo(),
            version,
            platform,
            wall_clock_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            files: self.files,
            manifest_hash: hex(&h.finalize()),
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        write_atomic(&self.dir.join("manifest.json"), json.as_bytes())?;
        Ok(manifest)
    }
}
