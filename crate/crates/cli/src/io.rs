use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use mccle_core::dataset::{read_dataset, DatasetHeader};
use mccle_core::models::deserialize_params;
use mccle_core::{Checkpoint, ModelKind, Sample};
use serde::Serialize;

use crate::failure::{CliResult, Failure};

/// Fails early when `path` cannot be created: its parent must be an existing,
/// writable directory, and the path itself must not be a directory.
pub fn ensure_writable(path: &Path) -> CliResult<()> {
    if path.is_dir() {
        return Err(Failure::unwritable(path, "is a directory"));
    }
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    match fs::metadata(&parent) {
        Ok(m) if m.is_dir() && !m.permissions().readonly() => Ok(()),
        Ok(m) if !m.is_dir() => Err(Failure::unwritable(path, "parent is not a directory")),
        Ok(_) => Err(Failure::unwritable(path, "parent directory is read-only")),
        Err(e) => Err(Failure::unwritable(path, e)),
    }
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| Failure::unwritable(dir, e))?;
    let probe = dir.join(".mccle-write-probe");
    fs::write(&probe, b"").map_err(|e| Failure::unwritable(dir, e))?;
    let _ = fs::remove_file(probe);
    Ok(())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| Failure::unwritable(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Failure::new(1, "runtime", e.to_string()))?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

pub fn load_dataset(path: &Path) -> CliResult<(DatasetHeader, Vec<Sample>)> {
    let file = fs::File::open(path).map_err(|e| Failure::input(path, e))?;
    read_dataset(BufReader::new(file)).map_err(|e| {
        let f = Failure::from(e);
        Failure::new(f.code, f.kind, format!("{}: {}", path.display(), f.message))
    })
}

pub fn load_checkpoint(path: &Path, expected: Option<ModelKind>) -> CliResult<Checkpoint> {
    let bytes = fs::read(path).map_err(|e| Failure::input(path, e))?;
    deserialize_params(&bytes, expected).map_err(|e| {
        let f = Failure::from(e);
        Failure::new(f.code, f.kind, format!("{}: {}", path.display(), f.message))
    })
}

/// `<path><suffix>`, e.g. `data.jsonl` → `data.jsonl.meta.json`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
