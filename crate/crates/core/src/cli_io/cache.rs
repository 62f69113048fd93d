//! Content-addressed result cache. Files are named by the SHA-256 of the
//! normalized job config plus the engine version and hold exported bytes.
//! Writers go through a private temp file and an atomic rename, and never
//! replace an existing entry.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::JobConfig;
use crate::error::{Error, Result};
use crate::ENGINE_VERSION;

pub const CACHE_ENV: &str = "QSTEEN_CACHE";

pub fn cache_dir_from_env() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    /// No cache path configured.
    Disabled,
    /// The cache could not be used; output was computed directly.
    Unavailable(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CachedOutput {
    pub bytes: Vec<u8>,
    pub status: CacheStatus,
}

#[derive(Serialize)]
struct KeyMaterial<'a> {
    engine: &'a str,
    config: &'a JobConfig,
}

/// Hex SHA-256 over every config field except the cache location.
pub fn cache_key(cfg: &JobConfig) -> Result<String> {
    let mut cfg = cfg.normalized()?;
    cfg.cache_path = None;
    let material = serde_json::to_vec(&KeyMaterial {
        engine: ENGINE_VERSION,
        config: &cfg,
    })
    .expect("config serializes");
    Ok(hex::encode(Sha256::digest(&material)))
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

fn store(dir: &Path, key: &str, bytes: &[u8]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let target = dir.join(key);
    if target.exists() {
        return Ok(());
    }
    let tmp = dir.join(format!(
        ".{key}.{}.{}.tmp",
        std::process::id(),
        TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let written = fs::File::create(&tmp).and_then(|mut f| {
        f.write_all(bytes)?;
        f.sync_all()
    });
    let result = written.and_then(|()| fs::rename(&tmp, &target));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Serves `cfg` from the cache under `cfg.cache_path`, or runs `compute` and
/// stores its bytes. Cache I/O failures are logged and bypassed.
pub fn cache_get_or_compute<F>(cfg: &JobConfig, compute: F) -> Result<CachedOutput>
where
    F: FnOnce() -> Result<Vec<u8>>,
{
    let Some(dir) = cfg.cache_path.clone() else {
        return Ok(CachedOutput {
            bytes: compute()?,
            status: CacheStatus::Disabled,
        });
    };
    let key = cache_key(cfg)?;
    let path = dir.join(&key);
    match fs::read(&path) {
        Ok(bytes) => {
            log::debug!("cache hit {}", path.display());
            return Ok(CachedOutput {
                bytes,
                status: CacheStatus::Hit,
            });
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
        Err(e) => log::warn!("{}", Error::CacheIo(format!("reading {}: {e}", path.display()))),
    }
    let bytes = compute()?;
    let status = match store(&dir, &key, &bytes) {
        Ok(()) => CacheStatus::Miss,
        Err(e) => {
            let err = Error::CacheIo(format!("writing {}: {e}", path.display()));
            log::warn!("{err}; result not cached");
            CacheStatus::Unavailable(err.to_string())
        }
    };
    Ok(CachedOutput { bytes, status })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_covers_fields_but_not_location() {
        let a = JobConfig::oline(4, 1);
        let mut b = a.clone();
        b.truncation_order = 16;
        assert_ne!(cache_key(&a).unwrap(), cache_key(&b).unwrap());
        let mut c = a.clone();
        c.cache_path = Some("/somewhere".into());
        assert_eq!(cache_key(&a).unwrap(), cache_key(&c).unwrap());
        let mut d = a.clone();
        d.k = None;
        assert_eq!(cache_key(&a).unwrap(), cache_key(&d).unwrap());
        assert_eq!(cache_key(&a).unwrap().len(), 64);
    }

    #[test]
    fn disabled_without_path() {
        let out = cache_get_or_compute(&JobConfig::oline(2, 1), || Ok(b"abc".to_vec())).unwrap();
        assert_eq!(out.status, CacheStatus::Disabled);
        assert_eq!(out.bytes, b"abc");
    }
}
