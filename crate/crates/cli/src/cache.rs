//! Append-only result cache keyed by command, canonical inputs and tolerance.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::record::OutputRecord;

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    records: Vec<OutputRecord>,
    checksum: String,
}

fn checksum(key: &str, records: &[OutputRecord]) -> String {
    let body = serde_json::to_string(records).expect("records serialize");
    let mut h = Sha256::new();
    h.update(key.as_bytes());
    h.update(b"\n");
    h.update(body.as_bytes());
    hex::encode(h.finalize())
}

pub struct Cache {
    path: PathBuf,
    entries: HashMap<String, Vec<OutputRecord>>,
    /// Lines that failed to parse or whose checksum did not match.
    pub corrupted: usize,
}

impl Cache {
    pub fn open(path: &Path) -> std::io::Result<Cache> {
        let mut entries = HashMap::new();
        let mut corrupted = 0;
        match fs::read_to_string(path) {
            Ok(text) => {
                for line in text.lines().filter(|l| !l.trim().is_empty()) {
                    match serde_json::from_str::<Entry>(line) {
                        Ok(e) if checksum(&e.key, &e.records) == e.checksum => {
                            entries.insert(e.key, e.records);
                        }
                        _ => corrupted += 1,
                    }
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(e),
        }
        Ok(Cache { path: path.to_path_buf(), entries, corrupted })
    }

    pub fn get(&self, key: &str) -> Option<&Vec<OutputRecord>> {
        self.entries.get(key)
    }

    /// Appends one entry, rewriting the file through a temporary file renamed into place.
    pub fn insert(&mut self, key: &str, records: &[OutputRecord]) -> std::io::Result<()> {
        let entry = Entry {
            key: key.to_string(),
            records: records.to_vec(),
            checksum: checksum(key, records),
        };
        let line = serde_json::to_string(&entry).expect("entry serializes");
        let mut existing = match fs::read(&self.path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e),
        };
        if !existing.is_empty() && !existing.ends_with(b"\n") {
            existing.push(b'\n');
        }
        let dir = match self.path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
        tmp.write_all(&existing)?;
        tmp.write_all(line.as_bytes())?;
        tmp.write_all(b"\n")?;
        tmp.flush()?;
        tmp.persist(&self.path).map_err(|e| e.error)?;
        self.entries.insert(key.to_string(), records.to_vec());
        Ok(())
    }
}
