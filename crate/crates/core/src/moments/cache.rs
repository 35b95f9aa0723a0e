//! Process-wide cache of exact Legendre coefficient tables, optionally
//! persisted to disk.
//!
//! A table of degree `D` serves every request up to `D`. The in-memory copy
//! admits concurrent readers; a larger table replaces it under the write
//! lock. On disk each table lives in `legendre-<D>.bin`, written to a
//! temporary file and renamed into place so concurrent processes never
//! observe a partial file.

use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use super::legendre::LegendreTable;

/// Environment variable naming the on-disk cache directory.
pub const CACHE_DIR_ENV: &str = "SEPPROB_CACHE_DIR";

/// Tables above this degree are kept in memory only; their files would run
/// to hundreds of megabytes and rebuild faster than they load.
pub const MAX_PERSISTED_DEGREE: usize = 1200;

static MEMORY: RwLock<Option<Arc<LegendreTable>>> = RwLock::new(None);
static DIR: RwLock<Option<PathBuf>> = RwLock::new(None);

/// Sets the on-disk cache directory for this process. `None` falls back to
/// `SEPPROB_CACHE_DIR`, and to memory only when that is unset.
pub fn set_cache_dir(dir: Option<PathBuf>) {
    *DIR.write().expect("cache dir lock") = dir;
}

/// The directory in effect, if any.
pub fn cache_dir() -> Option<PathBuf> {
    if let Some(d) = DIR.read().expect("cache dir lock").clone() {
        return Some(d);
    }
    std::env::var_os(CACHE_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

/// A table covering at least `degree`.
pub fn table(degree: usize) -> Arc<LegendreTable> {
    if let Some(t) = MEMORY.read().expect("cache lock").as_ref() {
        if t.degree() >= degree {
            return Arc::clone(t);
        }
    }
    let dir = cache_dir();
    let loaded = dir.as_deref().and_then(|d| load_at_least(d, degree));
    let fresh = loaded.is_none();
    let t = Arc::new(loaded.unwrap_or_else(|| LegendreTable::build(degree)));
    if fresh && degree <= MAX_PERSISTED_DEGREE {
        if let Some(d) = dir.as_deref() {
            // The cache is an optimisation: failing to write it is not an
            // error for the computation that asked.
            let _ = store(d, &t);
        }
    }
    let mut slot = MEMORY.write().expect("cache lock");
    match slot.as_ref() {
        Some(existing) if existing.degree() >= t.degree() => Arc::clone(existing),
        _ => {
            *slot = Some(Arc::clone(&t));
            t
        }
    }
}

fn file_name(degree: usize) -> String {
    format!("legendre-{degree}.bin")
}

fn cached_degrees(dir: &Path) -> Vec<usize> {
    let Ok(entries) = fs::read_dir(dir) else {
        return Vec::new();
    };
    let mut out: Vec<usize> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let name = e.file_name().into_string().ok()?;
            name.strip_prefix("legendre-")?.strip_suffix(".bin")?.parse().ok()
        })
        .collect();
    out.sort_unstable();
    out
}

fn load_at_least(dir: &Path, degree: usize) -> Option<LegendreTable> {
    let d = cached_degrees(dir).into_iter().find(|&d| d >= degree)?;
    let f = fs::File::open(dir.join(file_name(d))).ok()?;
    LegendreTable::read_from(BufReader::new(f))
        .ok()
        .filter(|t| t.degree() == d)
}

/// Writes `t` atomically into `dir`.
pub fn store(dir: &Path, t: &LegendreTable) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let target = dir.join(file_name(t.degree()));
    let tmp = tempfile_in(dir)?;
    {
        let f = fs::OpenOptions::new().write(true).truncate(true).open(&tmp)?;
        let mut w = BufWriter::new(f);
        t.write_to(&mut w)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    }
    match fs::rename(&tmp, &target) {
        Ok(()) => Ok(target),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

fn tempfile_in(dir: &Path) -> std::io::Result<PathBuf> {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0);
    for attempt in 0..100u32 {
        let p = dir.join(format!(".legendre-{}-{nanos}-{attempt}.tmp", std::process::id()));
        match fs::OpenOptions::new().write(true).create_new(true).open(&p) {
            Ok(_) => return Ok(p),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e),
        }
    }
    Err(std::io::Error::new(
        std::io::ErrorKind::AlreadyExists,
        "could not create a temporary cache file",
    ))
}
