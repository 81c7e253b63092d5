use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub tool_version: String,
    pub inputs: Vec<FileHash>,
    pub seeds: Vec<u64>,
    pub parameters: serde_json::Value,
    pub notes: Vec<String>,
    pub wall_time_s: f64,
    pub outputs: Vec<FileHash>,
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> honesty::Result<FileHash> {
    Ok(FileHash { path: path.to_path_buf(), sha256: sha256_bytes(&std::fs::read(path)?) })
}

/// Hashes of every regular file directly inside `dir`, sorted by name.
pub fn hash_dir(dir: &Path) -> honesty::Result<Vec<FileHash>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.file_name().is_some_and(|n| n != "manifest.json"))
        .collect();
    files.sort();
    files.iter().map(|p| hash_file(p)).collect()
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value) -> Self {
        RunManifest {
            command: command.into(),
            args: std::env::args().collect(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            inputs: Vec::new(),
            seeds: Vec::new(),
            parameters,
            notes: Vec::new(),
            wall_time_s: 0.0,
            outputs: Vec::new(),
        }
    }

    pub fn write(&mut self, path: &Path, outputs: &[PathBuf], started: std::time::Instant) -> honesty::Result<()> {
        self.outputs = outputs.iter().map(|p| hash_file(p)).collect::<honesty::Result<_>>()?;
        self.wall_time_s = started.elapsed().as_secs_f64();
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
