//! On-disk tower cache.
//!
//! A cache file is one JSON object
//! `{"format": "renormlab-tower", "version": 1, "checksum": <sha256>, "payload": {...}}`
//! where the checksum covers the compact serialization of the payload.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::{ChainSpec, LevelAction, Tower};
use crate::backend::Backend;
use crate::error::{Error, Result};
use crate::perm::Permutation;

pub const CACHE_FORMAT: &str = "renormlab-tower";
pub const CACHE_VERSION: u64 = 1;

fn checksum(payload: &Value) -> String {
    hex::encode(Sha256::digest(payload.to_string().as_bytes()))
}

fn identity_of<B: Backend>(backend: &B, spec: &ChainSpec) -> Value {
    json!({"backend": backend.describe(), "chain": spec.kind.as_str()})
}

/// File name derived from the backend parameters and the chain kind.
pub fn cache_path<B: Backend>(dir: &Path, backend: &B, spec: &ChainSpec) -> PathBuf {
    let digest = checksum(&identity_of(backend, spec));
    dir.join(format!("tower-{}-{}.json", backend.name(), &digest[..16]))
}

pub fn to_json<B: Backend>(tower: &Tower<B>) -> Value {
    let levels: Vec<Value> = tower
        .levels()
        .iter()
        .map(|l| {
            json!({
                "level": l.level(),
                "size": l.size(),
                "generator_perms": l.generator_perms(),
                "projection": l.projection(),
                "representatives": l.representatives().iter().map(|r| tower.backend().encode(r)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut payload = identity_of(tower.backend(), tower.spec());
    payload["levels"] = Value::Array(levels);
    json!({
        "format": CACHE_FORMAT,
        "version": CACHE_VERSION,
        "checksum": checksum(&payload),
        "payload": payload,
    })
}

/// Writes to a temporary file in the same directory, then renames.
pub fn save<B: Backend>(tower: &Tower<B>, path: &Path) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(to_json(tower).to_string().as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CacheCorrupt(msg.into())
}

pub fn from_json<B: Backend>(backend: B, spec: &ChainSpec, doc: &Value) -> Result<Tower<B>> {
    match doc.get("format").and_then(Value::as_str) {
        Some(CACHE_FORMAT) => {}
        other => return Err(Error::CacheVersionMismatch(format!("unknown cache format {other:?}"))),
    }
    match doc.get("version").and_then(Value::as_u64) {
        Some(CACHE_VERSION) => {}
        _ => {
            return Err(Error::CacheVersionMismatch(format!(
                "expected version {CACHE_VERSION}, found {}",
                doc.get("version").unwrap_or(&Value::Null)
            )))
        }
    }
    let payload = doc.get("payload").ok_or_else(|| corrupt("missing payload"))?;
    let stored = doc.get("checksum").and_then(Value::as_str).ok_or_else(|| corrupt("missing checksum"))?;
    if stored != checksum(payload) {
        return Err(corrupt("checksum mismatch"));
    }
    let expected = identity_of(&backend, spec);
    if payload.get("backend") != expected.get("backend") || payload.get("chain") != expected.get("chain") {
        return Err(corrupt("cache was written for a different backend or chain"));
    }
    let raw_levels = payload.get("levels").and_then(Value::as_array).ok_or_else(|| corrupt("missing levels"))?;
    let mut levels: Vec<LevelAction<B>> = Vec::with_capacity(raw_levels.len());
    for (l, raw) in raw_levels.iter().enumerate() {
        let field = |name: &str| raw.get(name).ok_or_else(|| corrupt(format!("level {l}: missing {name}")));
        if field("level")?.as_u64() != Some(l as u64) {
            return Err(corrupt(format!("level {l} out of order")));
        }
        let size = field("size")?.as_u64().ok_or_else(|| corrupt("bad size"))? as usize;
        let perms: Vec<Vec<u32>> = serde_json::from_value(field("generator_perms")?.clone())
            .map_err(|e| corrupt(format!("level {l}: {e}")))?;
        let perms = perms
            .into_iter()
            .map(|p| match Permutation::from_images(p) {
                Ok(p) if p.degree() == size => Ok(p),
                _ => Err(corrupt(format!("level {l}: bad generator permutation"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let projection: Option<Vec<u32>> = serde_json::from_value(field("projection")?.clone())
            .map_err(|e| corrupt(format!("level {l}: {e}")))?;
        match (&projection, levels.last()) {
            (None, None) => {}
            (Some(p), Some(below)) if p.len() == size && p.iter().all(|&x| (x as usize) < below.size()) => {}
            _ => return Err(corrupt(format!("level {l}: bad projection"))),
        }
        let reps = field("representatives")?
            .as_array()
            .ok_or_else(|| corrupt("bad representatives"))?
            .iter()
            .map(|r| backend.decode(r).map_err(|e| corrupt(format!("level {l}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if reps.len() != size || perms.len() != backend.generators().len() {
            return Err(corrupt(format!("level {l}: size mismatch")));
        }
        levels.push(LevelAction::from_parts(&backend, l, reps, perms, projection)?);
    }
    if levels.is_empty() {
        return Err(corrupt("no levels"));
    }
    let mut spec = spec.clone();
    spec.max_level = levels.len() - 1;
    Ok(Tower::from_levels(backend, spec, levels))
}

/// Reads a cache file; `Ok(None)` when it does not exist.
pub fn load<B: Backend>(backend: B, spec: &ChainSpec, path: &Path) -> Result<Option<Tower<B>>> {
    let text = match fs::read(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let doc: Value = serde_json::from_slice(&text).map_err(|e| corrupt(format!("unreadable cache: {e}")))?;
    from_json(backend, spec, &doc).map(Some)
}

/// The tower to `spec.max_level`, from the cache when it holds enough
/// levels. Returns the tower and whether the cache was used.
pub fn load_or_build<B: Backend + Clone>(backend: B, spec: &ChainSpec, dir: Option<&Path>) -> Result<(Tower<B>, bool)> {
    spec.check(&backend)?;
    let Some(dir) = dir else {
        return Ok((Tower::build(backend, spec.clone())?, false));
    };
    let path = cache_path(dir, &backend, spec);
    if let Some(mut tower) = load(backend.clone(), spec, &path)? {
        if tower.depth() >= spec.max_level {
            tower.levels.truncate(spec.max_level + 1);
            tower.spec.max_level = spec.max_level;
            tower.spec.max_index = spec.max_index;
            return Ok((tower, true));
        }
        tower.spec.max_index = spec.max_index;
        tower.extend_to(spec.max_level)?;
        save(&tower, &path)?;
        return Ok((tower, false));
    }
    let tower = Tower::build(backend, spec.clone())?;
    save(&tower, &path)?;
    Ok((tower, false))
}
