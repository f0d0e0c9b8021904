//! On-disk cache of branching matrices.
//!
//! One JSON file per descriptor, named by format version and a hash of the
//! descriptor text. The directory defaults to the platform cache dir and
//! can be overridden with `COMMPROB_CACHE`. Any problem reading a file is
//! a miss; any problem writing one is a warning.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::branching::{BranchingMatrix, StateInfo};
use crate::error::{Error, Result};

pub const CACHE_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "COMMPROB_CACHE";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub version: u32,
    pub descriptor: String,
    pub order: u64,
    pub states: Vec<StateInfo>,
    /// Row-major `counts`, decimal strings.
    pub matrix: Vec<String>,
    pub root_index: usize,
}

impl CacheRecord {
    pub fn from_matrix(descriptor: &str, b: &BranchingMatrix) -> CacheRecord {
        CacheRecord {
            version: CACHE_VERSION,
            descriptor: descriptor.to_string(),
            order: b.group_order() as u64,
            states: b.states().to_vec(),
            matrix: b.dense().into_iter().flatten().map(|c| c.to_string()).collect(),
            root_index: b.root(),
        }
    }

    /// Rebuilds the matrix, validating every invariant.
    pub fn to_matrix(&self) -> Result<BranchingMatrix> {
        let m = self.states.len();
        if self.version != CACHE_VERSION {
            return Err(Error::InvalidInput(format!("cache version {} != {CACHE_VERSION}", self.version)));
        }
        if self.matrix.len() != m * m {
            return Err(Error::InvalidInput(format!("{} entries for {m} states", self.matrix.len())));
        }
        let mut columns = vec![Vec::new(); m];
        for (idx, s) in self.matrix.iter().enumerate() {
            let c: u64 = s.parse().map_err(|_| Error::InvalidInput(format!("bad matrix entry {s:?}")))?;
            if c != 0 {
                columns[idx % m].push((idx / m, c));
            }
        }
        let b = BranchingMatrix::from_parts(self.states.clone(), columns, self.root_index)?;
        if b.group_order() as u64 != self.order {
            return Err(Error::InvalidInput("root order disagrees with the recorded order".into()));
        }
        Ok(b)
    }
}

pub fn file_name(descriptor: &str) -> String {
    let digest = Sha256::digest(descriptor.as_bytes());
    let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    format!("v{CACHE_VERSION}-{hex}.json")
}

/// A cache directory, or none when caching is off.
#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn at(dir: impl Into<PathBuf>) -> Cache {
        Cache { dir: Some(dir.into()) }
    }

    pub fn disabled() -> Cache {
        Cache { dir: None }
    }

    /// `$COMMPROB_CACHE`, else `<platform cache dir>/commprob`.
    pub fn from_env() -> Cache {
        let dir = std::env::var_os(CACHE_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .or_else(|| dirs::cache_dir().map(|d| d.join("commprob")));
        Cache { dir }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn path_for(&self, descriptor: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(file_name(descriptor)))
    }

    /// The cached matrix for `descriptor`, if a valid one exists.
    pub fn load(&self, descriptor: &str) -> Option<BranchingMatrix> {
        let path = self.path_for(descriptor)?;
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                log::warn!("cannot read cache file {}: {e}", path.display());
                return None;
            }
        };
        let record: CacheRecord = match serde_json::from_str(&text) {
            Ok(r) => r,
            Err(e) => {
                log::warn!("ignoring corrupt cache file {}: {e}", path.display());
                return None;
            }
        };
        if record.version != CACHE_VERSION || record.descriptor != descriptor {
            log::debug!("cache file {} is for another version or descriptor", path.display());
            return None;
        }
        match record.to_matrix() {
            Ok(b) => Some(b),
            Err(e) => {
                log::warn!("ignoring invalid cache file {}: {e}", path.display());
                None
            }
        }
    }

    /// Writes the matrix; failures only warn.
    pub fn store(&self, descriptor: &str, b: &BranchingMatrix) {
        let Some(path) = self.path_for(descriptor) else { return };
        if let Err(e) = self.try_store(&path, descriptor, b) {
            log::warn!("cache disabled for {descriptor}: cannot write {}: {e}", path.display());
        }
    }

    fn try_store(&self, path: &Path, descriptor: &str, b: &BranchingMatrix) -> Result<()> {
        let dir = path.parent().expect("cache path has a parent");
        fs::create_dir_all(dir)?;
        let json = serde_json::to_string(&CacheRecord::from_matrix(descriptor, b))
            .map_err(|e| Error::Internal(e.to_string()))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(json.as_bytes())?;
        tmp.persist(path).map_err(|e| Error::from(e.error))?;
        Ok(())
    }

    /// Loads the matrix or computes and stores it.
    pub fn get_or_build(
        &self,
        descriptor: &str,
        build: impl FnOnce() -> Result<BranchingMatrix>,
    ) -> Result<(BranchingMatrix, bool)> {
        if let Some(b) = self.load(descriptor) {
            return Ok((b, true));
        }
        let b = build()?;
        self.store(descriptor, &b);
        Ok((b, false))
    }
}
