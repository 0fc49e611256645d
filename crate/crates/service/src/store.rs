//! Keyed document store for jobs, sessions and audio.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("storage unavailable: {0}")]
    Unavailable(String),
    #[error("invalid key `{0}`")]
    BadKey(String),
    #[error("corrupt document {collection}/{key}: {reason}")]
    Corrupt {
        collection: String,
        key: String,
        reason: String,
    },
}

pub const JOBS: &str = "jobs";
pub const SESSIONS: &str = "sessions";
pub const AUDIO: &str = "audio";

pub trait DocumentStore: Send + Sync {
    fn put(&self, collection: &str, key: &str, doc: &[u8]) -> Result<(), StoreError>;
    fn get(&self, collection: &str, key: &str) -> Result<Option<Vec<u8>>, StoreError>;
    fn keys(&self, collection: &str) -> Result<Vec<String>, StoreError>;
}

/// Keys become file names, so only `[A-Za-z0-9_-]` is accepted.
fn check_key(key: &str) -> Result<(), StoreError> {
    if key.is_empty()
        || key.len() > 128
        || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
    {
        return Err(StoreError::BadKey(key.to_string()));
    }
    Ok(())
}

pub fn put_json<T: Serialize>(
    store: &dyn DocumentStore,
    collection: &str,
    key: &str,
    doc: &T,
) -> Result<(), StoreError> {
    let bytes = serde_json::to_vec_pretty(doc).expect("documents serialize");
    store.put(collection, key, &bytes)
}

pub fn get_json<T: DeserializeOwned>(
    store: &dyn DocumentStore,
    collection: &str,
    key: &str,
) -> Result<Option<T>, StoreError> {
    match store.get(collection, key)? {
        None => Ok(None),
        Some(bytes) => serde_json::from_slice(&bytes)
            .map(Some)
            .map_err(|e| StoreError::Corrupt {
                collection: collection.to_string(),
                key: key.to_string(),
                reason: e.to_string(),
            }),
    }
}

#[derive(Debug, Default)]
pub struct MemoryStore {
    docs: Mutex<HashMap<(String, String), Vec<u8>>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }
}

impl DocumentStore for MemoryStore {
    fn put(&self, collection: &str, key: &str, doc: &[u8]) -> Result<(), StoreError> {
        check_key(key)?;
        self.docs
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert((collection.to_string(), key.to_string()), doc.to_vec());
        Ok(())
    }

    fn get(&self, collection: &str, key: &str) -> Result<Option<Vec<u8>>, StoreError> {
        check_key(key)?;
        Ok(self
            .docs
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .get(&(collection.to_string(), key.to_string()))
            .cloned())
    }

    fn keys(&self, collection: &str) -> Result<Vec<String>, StoreError> {
        let mut keys: Vec<String> = self
            .docs
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .keys()
            .filter(|(c, _)| c == collection)
            .map(|(_, k)| k.clone())
            .collect();
        keys.sort();
        Ok(keys)
    }
}

/// One file per document under `<root>/<collection>/<key>`. Writes go
/// through a temp file and a rename, so readers never see partial documents.
#[derive(Debug)]
pub struct FileStore {
    root: PathBuf,
}

impl FileStore {
    pub fn open(root: &Path) -> Result<Self, StoreError> {
        std::fs::create_dir_all(root)
            .map_err(|e| StoreError::Unavailable(format!("{}: {e}", root.display())))?;
        Ok(FileStore {
            root: root.to_path_buf(),
        })
    }

    fn path(&self, collection: &str, key: &str) -> PathBuf {
        self.root.join(collection).join(key)
    }
}

fn unavailable(path: &Path, e: std::io::Error) -> StoreError {
    StoreError::Unavailable(format!("{}: {e}", path.display()))
}

impl DocumentStore for FileStore {
    fn put(&self, collection: &str, key: &str, doc: &[u8]) -> Result<(), StoreError> {
        check_key(key)?;
        let dir = self.root.join(collection);
        std::fs::create_dir_all(&dir).map_err(|e| unavailable(&dir, e))?;
        let path = self.path(collection, key);
        let tmp = dir.join(format!(".{key}.tmp"));
        let mut f = std::fs::File::create(&tmp).map_err(|e| unavailable(&tmp, e))?;
        f.write_all(doc)
            .and_then(|_| f.sync_all())
            .map_err(|e| unavailable(&tmp, e))?;
        std::fs::rename(&tmp, &path).map_err(|e| unavailable(&path, e))
    }

    fn get(&self, collection: &str, key: &str) -> Result<Option<Vec<u8>>, StoreError> {
        check_key(key)?;
        let path = self.path(collection, key);
        match std::fs::read(&path) {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(unavailable(&path, e)),
        }
    }

    fn keys(&self, collection: &str) -> Result<Vec<String>, StoreError> {
        let dir = self.root.join(collection);
        let entries = match std::fs::read_dir(&dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(unavailable(&dir, e)),
        };
        let mut keys = Vec::new();
        for entry in entries {
            let name = entry.map_err(|e| unavailable(&dir, e))?.file_name();
            let name = name.to_string_lossy();
            if !name.starts_with('.') {
                keys.push(name.into_owned());
            }
        }
        keys.sort();
        Ok(keys)
    }
}
