//! On-disk memo of count tables: one JSON file per key.
//!
//! Each file records the schema and module versions it was written with and
//! a SHA-256 of its payload. Entries from another version are ignored and
//! recomputed; a payload that does not match its checksum is an error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const MODULE_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CACHE_ENV: &str = "PATTERNLAB_CACHE";

#[derive(Serialize, Deserialize)]
struct Entry {
    schema_version: u32,
    module_version: String,
    key: String,
    checksum: String,
    payload: serde_json::Value,
}

fn checksum(payload: &serde_json::Value) -> String {
    // serde_json's Value keeps object keys sorted, so this is canonical
    let bytes = serde_json::to_vec(payload).expect("values always serialize");
    hex::encode(Sha256::digest(&bytes))
}

#[derive(Clone, Debug)]
pub struct DiskCache {
    dir: PathBuf,
}

impl DiskCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| CliError::io(format!("creating cache dir {}", dir.display()), e))?;
        Ok(DiskCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// File holding `key`. Keys contain `|` and `;`, so the name is a
    /// readable prefix plus a hash of the full key.
    pub fn path_for(&self, key: &str) -> PathBuf {
        let readable: String = key
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
            .take(80)
            .collect();
        let digest = hex::encode(Sha256::digest(key.as_bytes()));
        self.dir.join(format!("{readable}-{}.json", &digest[..16]))
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        let path = self.path_for(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(CliError::io(format!("reading {}", path.display()), e)),
        };
        let corrupt = |reason: String| CliError::CacheCorrupt {
            path: path.clone(),
            reason,
        };
        let entry: Entry = serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;
        if entry.schema_version != SCHEMA_VERSION || entry.module_version != MODULE_VERSION {
            return Ok(None);
        }
        if entry.key != key {
            return Err(corrupt(format!("holds key {:?}", entry.key)));
        }
        if checksum(&entry.payload) != entry.checksum {
            return Err(corrupt("checksum mismatch".into()));
        }
        serde_json::from_value(entry.payload)
            .map(Some)
            .map_err(|e| corrupt(e.to_string()))
    }

    /// Writes through a temporary file and a rename, so readers never see
    /// a partial entry.
    pub fn put<T: Serialize>(&self, key: &str, value: &T) -> Result<()> {
        let payload = serde_json::to_value(value).expect("cache payloads serialize");
        let entry = Entry {
            schema_version: SCHEMA_VERSION,
            module_version: MODULE_VERSION.to_string(),
            key: key.to_string(),
            checksum: checksum(&payload),
            payload,
        };
        let path = self.path_for(key);
        let io_err = |e| CliError::io(format!("writing {}", path.display()), e);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io_err)?;
        tmp.write_all(&serde_json::to_vec_pretty(&entry).expect("entries serialize")).map_err(io_err)?;
        tmp.persist(&path).map_err(|e| io_err(e.error))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cache() -> (tempfile::TempDir, DiskCache) {
        let dir = tempfile::tempdir().unwrap();
        let c = DiskCache::open(dir.path().join("c")).unwrap();
        (dir, c)
    }

    #[test]
    fn round_trip() {
        let (_d, c) = cache();
        assert_eq!(c.get::<Vec<String>>("a|b").unwrap(), None);
        c.put("a|b", &vec!["1".to_string(), "2".to_string()]).unwrap();
        assert_eq!(c.get::<Vec<String>>("a|b").unwrap(), Some(vec!["1".into(), "2".into()]));
        assert_ne!(c.path_for("a|b"), c.path_for("a;b"));
    }

    #[test]
    fn tampering_is_detected() {
        let (_d, c) = cache();
        c.put("k", &vec!["60".to_string()]).unwrap();
        let path = c.path_for("k");
        let text = fs::read_to_string(&path).unwrap().replace("\"60\"", "\"61\"");
        fs::write(&path, text).unwrap();
        assert!(matches!(c.get::<Vec<String>>("k"), Err(CliError::CacheCorrupt { .. })));
        fs::write(&path, "{not json").unwrap();
        assert!(matches!(c.get::<Vec<String>>("k"), Err(CliError::CacheCorrupt { .. })));
    }

    #[test]
    fn other_versions_are_recomputed() {
        let (_d, c) = cache();
        c.put("k", &1u32).unwrap();
        let path = c.path_for("k");
        let text = fs::read_to_string(&path).unwrap().replace("\"schema_version\": 1", "\"schema_version\": 0");
        fs::write(&path, text).unwrap();
        assert_eq!(c.get::<u32>("k").unwrap(), None);
    }
}
