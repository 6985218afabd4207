//! Run manifest: every file a command writes, with its seed and config hash.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub command: String,
    /// Seed that generated the content; `None` for deterministic outputs.
    pub seed: Option<u64>,
    pub root_seed: u64,
    pub config_hash: String,
}

/// Entries keyed by path relative to the output directory. Commands that
/// share an output directory add to one manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Manifest {
    pub files: BTreeMap<String, FileEntry>,
}

/// Writes files into one output directory and records them.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    command: String,
    root_seed: u64,
    config_hash: String,
    manifest: Manifest,
}

impl OutputDir {
    pub fn open(root: &Path, command: &str, root_seed: u64, config_hash: &str) -> Result<Self> {
        fs::create_dir_all(root)
            .map_err(|e| CliError::io(format!("cannot create {}", root.display()), e))?;
        let existing = root.join(MANIFEST_NAME);
        let manifest = match fs::read_to_string(&existing) {
            Ok(text) => serde_json::from_str(&text).map_err(|e| {
                CliError::Data(format!("unreadable manifest {}: {e}", existing.display()))
            })?,
            Err(_) => Manifest::default(),
        };
        Ok(OutputDir {
            root: root.to_path_buf(),
            command: command.to_string(),
            root_seed,
            config_hash: config_hash.to_string(),
            manifest,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8], seed: Option<u64>) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, bytes)
            .map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))?;
        self.manifest.files.insert(
            name.to_string(),
            FileEntry {
                command: self.command.clone(),
                seed,
                root_seed: self.root_seed,
                config_hash: self.config_hash.clone(),
            },
        );
        Ok(())
    }

    pub fn write_json<T: Serialize>(
        &mut self,
        name: &str,
        value: &T,
        seed: Option<u64>,
    ) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value).expect("output serializes");
        bytes.push(b'\n');
        self.write(name, &bytes, seed)
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    /// Writes the manifest itself.
    pub fn finish(self) -> Result<Manifest> {
        let path = self.path(MANIFEST_NAME);
        let mut bytes = serde_json::to_vec_pretty(&self.manifest).expect("manifest serializes");
        bytes.push(b'\n');
        fs::write(&path, bytes)
            .map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))?;
        Ok(self.manifest)
    }
}
