//! Checksum-pinned dataset cache.
//!
//! Each dataset is a canonical CSV whose SHA-256 is pinned here. A cached file
//! that validates is used as is. Missing files come from an HTTP mirror when
//! one is configured (`--mirror` or `MEDSTACK_MIRROR`), otherwise from the copy
//! compiled into the binary.

use std::io::Read;
use std::path::{Path, PathBuf};

use medstack_core::{Dataset, DatasetSchema};
use sha2::{Digest, Sha256};

use crate::error::{io, HarnessError, Result};

pub const CACHE_ENV: &str = "MEDSTACK_CACHE";
pub const MIRROR_ENV: &str = "MEDSTACK_MIRROR";

pub struct DatasetSource {
    pub name: &'static str,
    pub file_name: &'static str,
    pub sha256: &'static str,
    pub bundled: &'static [u8],
}

pub const SOURCES: &[DatasetSource] = &[
    DatasetSource {
        name: "pima",
        file_name: "pima.csv",
        sha256: "bf81d06e0c0512662862248241ab46d7c29258c6ceaad32f3cab56b52a17fdab",
        bundled: include_bytes!("../../../data/pima.csv"),
    },
    DatasetSource {
        name: "wdbc",
        file_name: "wdbc.csv",
        sha256: "c3a2a3f438711903c351adaeadeec5d97d85977c47c6b6a1fd0791a616e81018",
        bundled: include_bytes!("../../../data/wdbc.csv"),
    },
    DatasetSource {
        name: "statlog-heart",
        file_name: "statlog-heart.csv",
        sha256: "093a9463a30671789e039bf0061adaebcc9b0d1f663e5d440cea514618d82378",
        bundled: include_bytes!("../../../data/statlog-heart.csv"),
    },
];

pub fn source(name: &str) -> Result<&'static DatasetSource> {
    SOURCES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| HarnessError::UnknownDataset(name.to_string()))
}

/// `$MEDSTACK_CACHE`, or `./medstack-cache`.
pub fn default_cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("medstack-cache"))
}

pub fn default_mirror() -> Option<String> {
    std::env::var(MIRROR_ENV).ok().filter(|s| !s.is_empty())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Cache,
    Mirror,
    Bundled,
}

#[derive(Debug, Clone)]
pub struct Fetched {
    pub name: String,
    pub path: PathBuf,
    pub origin: Origin,
}

/// Ensures every named dataset sits validated in `cache`, returning the paths.
pub fn fetch_datasets(names: &[String], cache: &Path, mirror: Option<&str>) -> Result<Vec<Fetched>> {
    names.iter().map(|n| fetch_one(n, cache, mirror)).collect()
}

fn fetch_one(name: &str, cache: &Path, mirror: Option<&str>) -> Result<Fetched> {
    let src = source(name)?;
    let path = cache.join(src.file_name);
    if path.exists() {
        let bytes = std::fs::read(&path).map_err(io(&path))?;
        verify(&path, &bytes, src.sha256)?;
        return Ok(Fetched {
            name: name.to_string(),
            path,
            origin: Origin::Cache,
        });
    }
    let (bytes, origin) = match mirror {
        Some(base) => (download(base, src, cache)?, Origin::Mirror),
        None => (src.bundled.to_vec(), Origin::Bundled),
    };
    let label = match origin {
        Origin::Mirror => PathBuf::from(format!("{} (downloaded)", src.file_name)),
        _ => PathBuf::from(format!("{} (bundled)", src.file_name)),
    };
    verify(&label, &bytes, src.sha256)?;
    std::fs::create_dir_all(cache).map_err(io(cache))?;
    let tmp = cache.join(format!(".{}.part", src.file_name));
    std::fs::write(&tmp, &bytes).map_err(io(&tmp))?;
    std::fs::rename(&tmp, &path).map_err(io(&path))?;
    Ok(Fetched {
        name: name.to_string(),
        path,
        origin,
    })
}

fn verify(path: &Path, bytes: &[u8], expected: &str) -> Result<()> {
    let found = sha256_hex(bytes);
    if found != expected {
        return Err(HarnessError::Checksum {
            path: path.to_path_buf(),
            expected: expected.to_string(),
            found,
        });
    }
    Ok(())
}

fn download(base: &str, src: &DatasetSource, cache: &Path) -> Result<Vec<u8>> {
    let url = format!("{}/{}", base.trim_end_matches('/'), src.file_name);
    let fail = |message: String| HarnessError::Network {
        url: url.clone(),
        message,
        file: src.file_name.to_string(),
        sha256: src.sha256.to_string(),
        cache: cache.to_path_buf(),
    };
    let response = ureq::get(&url).call().map_err(|e| fail(e.to_string()))?;
    let mut bytes = Vec::new();
    response
        .into_body()
        .into_reader()
        .read_to_end(&mut bytes)
        .map_err(|e| fail(e.to_string()))?;
    Ok(bytes)
}

/// Loads a fetched dataset with its built-in schema.
pub fn load(fetched: &Fetched) -> Result<(Dataset, DatasetSchema)> {
    let schema = DatasetSchema::builtin(&fetched.name).ok_or_else(|| HarnessError::UnknownDataset(fetched.name.clone()))?;
    let data = medstack_core::data::load_csv(&fetched.path, &schema)?;
    Ok((data, schema))
}
