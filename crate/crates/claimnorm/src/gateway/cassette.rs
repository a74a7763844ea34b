//! JSON Lines request/response store for deterministic replay.
//!
//! One entry per line, append-only; loading applies last-writer-wins per
//! digest. Re-recording an identical response is a no-op, so a deterministic
//! backend recorded twice leaves one entry.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CassetteEntry {
    pub request_digest: String,
    pub response_text: String,
    pub recorded_at: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CassetteError {
    #[error("cannot open cassette {0}: {1}")]
    Io(String, String),
    #[error("malformed cassette line {0}: {1}")]
    Malformed(usize, String),
}

#[derive(Debug)]
pub struct CassetteStore {
    path: PathBuf,
    entries: HashMap<String, String>,
}

impl CassetteStore {
    /// Load an existing cassette; the file must exist.
    pub fn load(path: &Path) -> Result<Self, CassetteError> {
        let file = File::open(path)
            .map_err(|e| CassetteError::Io(path.display().to_string(), e.to_string()))?;
        Self::read(path, file)
    }

    /// Load a cassette, creating an empty one when the file is absent.
    pub fn open_or_create(path: &Path) -> Result<Self, CassetteError> {
        if path.exists() {
            Self::load(path)
        } else {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent).map_err(|e| {
                        CassetteError::Io(path.display().to_string(), e.to_string())
                    })?;
                }
            }
            File::create(path)
                .map_err(|e| CassetteError::Io(path.display().to_string(), e.to_string()))?;
            Ok(Self {
                path: path.to_path_buf(),
                entries: HashMap::new(),
            })
        }
    }

    fn read(path: &Path, file: File) -> Result<Self, CassetteError> {
        let mut entries = HashMap::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line =
                line.map_err(|e| CassetteError::Io(path.display().to_string(), e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: CassetteEntry = serde_json::from_str(&line)
                .map_err(|e| CassetteError::Malformed(idx + 1, e.to_string()))?;
            entries.insert(entry.request_digest, entry.response_text);
        }
        Ok(Self {
            path: path.to_path_buf(),
            entries,
        })
    }

    pub fn get(&self, digest: &str) -> Option<&str> {
        self.entries.get(digest).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Append an entry unless the digest already holds this exact response.
    /// Returns true when a line was written.
    pub fn upsert(&mut self, digest: &str, response_text: &str) -> Result<bool, CassetteError> {
        if self.entries.get(digest).map(String::as_str) == Some(response_text) {
            return Ok(false);
        }
        let entry = CassetteEntry {
            request_digest: digest.to_string(),
            response_text: response_text.to_string(),
            recorded_at: chrono::Utc::now().to_rfc3339(),
        };
        let line = serde_json::to_string(&entry)
            .map_err(|e| CassetteError::Io(self.path.display().to_string(), e.to_string()))?;
        let mut file = OpenOptions::new()
            .append(true)
            .create(true)
            .open(&self.path)
            .map_err(|e| CassetteError::Io(self.path.display().to_string(), e.to_string()))?;
        writeln!(file, "{line}")
            .map_err(|e| CassetteError::Io(self.path.display().to_string(), e.to_string()))?;
        self.entries
            .insert(digest.to_string(), response_text.to_string());
        Ok(true)
    }
}
