use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Result;

pub const CACHE_ENV: &str = "RESONANCES_CACHE_DIR";

/// Result store keyed by a canonical description of the computation.
#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    payload: Vec<(String, String)>,
}

/// First 8 bytes of SHA-256 as a big-endian integer.
pub fn key_hash(key: &str) -> u64 {
    let d = Sha256::digest(key.as_bytes());
    u64::from_be_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// Cache under `RESONANCES_CACHE_DIR`, if set and nonempty.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn slot(&self, hash: u64, probe: usize) -> PathBuf {
        self.dir.join(format!("{hash:016x}-{probe}.json"))
    }

    fn read(path: &Path) -> Option<Entry> {
        serde_json::from_str(&fs::read_to_string(path).ok()?).ok()
    }

    /// Named payload files for `key`; hash collisions are told apart by
    /// comparing the full key.
    pub fn get(&self, key: &str) -> Option<Vec<(String, String)>> {
        let h = key_hash(key);
        for probe in 0.. {
            let path = self.slot(h, probe);
            if !path.exists() {
                return None;
            }
            if let Some(e) = Self::read(&path) {
                if e.key == key {
                    return Some(e.payload);
                }
            }
        }
        None
    }

    pub fn put(&self, key: &str, payload: &[(String, String)]) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let h = key_hash(key);
        let mut probe = 0;
        loop {
            let path = self.slot(h, probe);
            if !path.exists() || Self::read(&path).is_some_and(|e| e.key == key) {
                break;
            }
            probe += 1;
        }
        let entry = Entry { key: key.into(), payload: payload.to_vec() };
        let text = serde_json::to_string(&entry).expect("cache entry serializes");
        let path = self.slot(h, probe);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, text)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colliding_slots_are_probed() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        // plant a foreign entry in the slot of "a"
        fs::create_dir_all(dir.path()).unwrap();
        let foreign = Entry { key: "other".into(), payload: vec![("x".into(), "1".into())] };
        fs::write(c.slot(key_hash("a"), 0), serde_json::to_string(&foreign).unwrap()).unwrap();
        assert!(c.get("a").is_none());
        c.put("a", &[("y".into(), "2".into())]).unwrap();
        assert_eq!(c.get("a").unwrap(), vec![("y".to_string(), "2".to_string())]);
        assert!(c.slot(key_hash("a"), 1).exists());
    }
}
