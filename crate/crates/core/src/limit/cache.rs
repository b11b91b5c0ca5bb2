//! On-disk quantile tables.
//!
//! ```text
//! functional=H0
//! kappa_zero=true
//! r=0
//! d=0
//! grid_T=2000
//! n_rep=50000
//! seed=42
//! mean=5.0012345678901234e-1
//! q 1.0000000000000000e-2 2.4...e-2
//! ...
//! checksum <sha256 hex of every preceding byte>
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::table::{build_table, QuantileTable};
use super::{FunctionalId, Hypothesis, PROBABILITY_GRID};
use crate::error::{Error, Result};
use crate::parallel::Execution;

pub const CACHE_DIR_ENV: &str = "TRENDSTAT_CACHE_DIR";
const EXTENSION: &str = "tbl";

/// Everything that determines a table's contents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TableKey {
    pub id: FunctionalId,
    pub grid: usize,
    pub n_rep: usize,
    pub seed: u64,
}

impl TableKey {
    pub fn of(table: &QuantileTable) -> Self {
        Self { id: table.id, grid: table.grid, n_rep: table.n_rep, seed: table.seed }
    }

    pub fn file_name(&self) -> String {
        format!(
            "{}_k{}_r{}_d{}_T{}_n{}_s{}.{EXTENSION}",
            self.id.hypothesis,
            u8::from(self.id.kappa_zero),
            self.id.r,
            self.id.d,
            self.grid,
            self.n_rep,
            self.seed
        )
    }
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn serialize(table: &QuantileTable) -> String {
    let mut body = String::new();
    let id = table.id;
    body.push_str(&format!("functional={}\n", id.hypothesis));
    body.push_str(&format!("kappa_zero={}\n", id.kappa_zero));
    body.push_str(&format!("r={}\n", id.r));
    body.push_str(&format!("d={}\n", id.d));
    body.push_str(&format!("grid_T={}\n", table.grid));
    body.push_str(&format!("n_rep={}\n", table.n_rep));
    body.push_str(&format!("seed={}\n", table.seed));
    body.push_str(&format!("mean={}\n", float(table.mean)));
    for &(p, v) in &table.quantiles {
        body.push_str(&format!("q {} {}\n", float(p), float(v)));
    }
    let digest = hex::encode(Sha256::digest(body.as_bytes()));
    body.push_str(&format!("checksum {digest}\n"));
    body
}

pub fn parse(text: &str, origin: &str) -> Result<QuantileTable> {
    let malformed = |reason: String| Error::MalformedTable { path: origin.to_string(), reason };
    let marker = text.rfind("checksum ").ok_or_else(|| malformed("missing checksum".into()))?;
    let (body, tail) = text.split_at(marker);
    let stored = tail.trim_start_matches("checksum ").trim();
    if hex::encode(Sha256::digest(body.as_bytes())) != stored {
        return Err(Error::ChecksumMismatch { path: origin.to_string() });
    }

    let mut fields = std::collections::HashMap::new();
    let mut quantiles = Vec::new();
    for line in body.lines() {
        if let Some(rest) = line.strip_prefix("q ") {
            let mut parts = rest.split_whitespace();
            let (Some(p), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(malformed(format!("bad quantile line {line:?}")));
            };
            let p: f64 = p.parse().map_err(|_| malformed(format!("bad probability {p:?}")))?;
            let v: f64 = v.parse().map_err(|_| malformed(format!("bad value {v:?}")))?;
            quantiles.push((p, v));
        } else if let Some((k, v)) = line.split_once('=') {
            fields.insert(k.to_string(), v.to_string());
        } else if !line.is_empty() {
            return Err(malformed(format!("unexpected line {line:?}")));
        }
    }
    let get = |k: &str| fields.get(k).ok_or_else(|| malformed(format!("missing {k}")));
    fn num<T: std::str::FromStr>(s: &str, k: &str, origin: &str) -> Result<T> {
        s.parse().map_err(|_| Error::MalformedTable { path: origin.to_string(), reason: format!("bad {k}") })
    }
    let hypothesis: Hypothesis = get("functional")?.parse()?;
    let id = FunctionalId {
        hypothesis,
        kappa_zero: num(get("kappa_zero")?, "kappa_zero", origin)?,
        r: num(get("r")?, "r", origin)?,
        d: num(get("d")?, "d", origin)?,
    };
    if quantiles.is_empty() {
        return Err(malformed("no quantiles".into()));
    }
    Ok(QuantileTable {
        id,
        grid: num(get("grid_T")?, "grid_T", origin)?,
        n_rep: num(get("n_rep")?, "n_rep", origin)?,
        seed: num(get("seed")?, "seed", origin)?,
        quantiles,
        mean: num(get("mean")?, "mean", origin)?,
        created_at: None,
    })
}

/// Directory of table files. Writes go through a temporary file and a
/// rename; there is a single writer per table.
#[derive(Debug, Clone)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// `$TRENDSTAT_CACHE_DIR`, else `$HOME/.cache/trendstat`, else `./.trendstat-cache`.
    pub fn from_env() -> Self {
        if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
            return Self::new(dir);
        }
        match std::env::var_os("HOME") {
            Some(home) => Self::new(Path::new(&home).join(".cache").join("trendstat")),
            None => Self::new(".trendstat-cache"),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &TableKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    pub fn save(&self, table: &QuantileTable) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(&TableKey::of(table));
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serialize(table))?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    pub fn load_path(path: &Path) -> Result<QuantileTable> {
        let text = fs::read_to_string(path)?;
        let mut table = parse(&text, &path.display().to_string())?;
        table.created_at = fs::metadata(path)
            .and_then(|m| m.modified())
            .ok()
            .and_then(|t| t.duration_since(std::time::UNIX_EPOCH).ok())
            .map(|d| d.as_secs());
        Ok(table)
    }

    pub fn load(&self, key: &TableKey) -> Result<QuantileTable> {
        let path = self.path_for(key);
        if !path.exists() {
            return Err(Error::TableNotBuilt(key.file_name()));
        }
        let table = Self::load_path(&path)?;
        if TableKey::of(&table) != *key {
            return Err(Error::MalformedTable {
                path: path.display().to_string(),
                reason: "contents do not match the file name".into(),
            });
        }
        Ok(table)
    }

    /// Loads the table or builds and stores it. The flag reports a cache hit.
    pub fn get_or_build(&self, key: &TableKey, exec: Execution) -> Result<(QuantileTable, bool)> {
        match self.load(key) {
            Ok(table) => Ok((table, true)),
            Err(Error::TableNotBuilt(_)) => {
                let table = build_table(key.id, key.grid, key.n_rep, key.seed, &PROBABILITY_GRID, exec)?;
                self.save(&table)?;
                Ok((table, false))
            }
            Err(e) => Err(e),
        }
    }

    /// Every table file in the cache with its parse outcome, sorted by name.
    pub fn list(&self) -> Result<Vec<(PathBuf, Result<QuantileTable>)>> {
        if !self.dir.exists() {
            return Ok(Vec::new());
        }
        let mut paths: Vec<PathBuf> = fs::read_dir(&self.dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == EXTENSION))
            .collect();
        paths.sort();
        Ok(paths
            .into_iter()
            .map(|p| {
                let t = Self::load_path(&p);
                (p, t)
            })
            .collect())
    }
}
