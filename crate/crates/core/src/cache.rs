//! On-disk cache of `μ` computations, keyed by `(k, method, budget)`.
//! Entries are re-verified before reuse; anything that fails is dropped.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::error::Result;
use crate::mu::{Frontier, MuResult};

pub const DEFAULT_CACHE_FILE: &str = ".dpchroma-cache.json";

#[derive(Debug, Default, Serialize, Deserialize)]
struct CacheFile {
    entries: BTreeMap<String, MuResult>,
}

#[derive(Debug)]
pub struct Cache {
    path: PathBuf,
    file: CacheFile,
}

fn key(k: usize, method: &str, budget: u64) -> String {
    format!("k={k};method={method};budget={budget}")
}

impl Cache {
    /// Open the cache; a missing or unreadable file starts empty.
    pub fn open(path: impl AsRef<Path>) -> Self {
        let path = path.as_ref().to_path_buf();
        let file = fs::read_to_string(&path)
            .ok()
            .and_then(|s| serde_json::from_str(&s).ok())
            .unwrap_or_default();
        Cache { path, file }
    }

    pub fn len(&self) -> usize {
        self.file.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.file.entries.is_empty()
    }

    /// A cached result whose certificate still verifies under `budget`.
    pub fn get(&mut self, k: usize, method: &str, budget: u64) -> Option<MuResult> {
        let key = key(k, method, budget);
        let hit = self.file.entries.get(&key)?.clone();
        let valid = hit.k == k
            && Certificate::from_mu_result(&hit)
                .verify(budget)
                .is_ok_and(|r| r.verified);
        if valid {
            Some(hit)
        } else {
            self.file.entries.remove(&key);
            None
        }
    }

    /// The furthest saved search frontier for `k`, across all budgets.
    pub fn frontier(&self, k: usize, method: &str) -> Option<Frontier> {
        let prefix = format!("k={k};method={method};");
        self.file
            .entries
            .iter()
            .filter(|(key, r)| key.starts_with(&prefix) && r.k == k)
            .filter_map(|(_, r)| r.frontier.clone())
            .max_by_key(|f| (f.t, f.next_branch))
    }

    pub fn put(&mut self, method: &str, budget: u64, result: &MuResult) {
        self.file
            .entries
            .insert(key(result.k, method, budget), result.clone());
    }

    pub fn save(&self) -> Result<()> {
        let mut s = serde_json::to_string_pretty(&self.file)?;
        s.push('\n');
        fs::write(&self.path, s)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocking::ColumnClass;
    use crate::mu::{mu_exact, DEFAULT_NODE_BUDGET};

    #[test]
    fn round_trip_and_revalidation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        let r = mu_exact(2, DEFAULT_NODE_BUDGET).unwrap();
        let mut c = Cache::open(&path);
        assert!(c.is_empty());
        c.put("exact", 10, &r);
        c.save().unwrap();

        let mut c = Cache::open(&path);
        assert_eq!(c.get(2, "exact", 10), Some(r.clone()));
        assert_eq!(c.get(2, "exact", 11), None);

        // poisoned entry is rejected and dropped
        let mut bad = r;
        bad.witness_columns = vec![ColumnClass::identity(2); 2];
        c.put("exact", 10, &bad);
        assert_eq!(c.get(2, "exact", 10), None);
        assert!(c.is_empty());
    }

    #[test]
    fn corrupt_file_starts_empty() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        fs::write(&path, "not json").unwrap();
        assert!(Cache::open(&path).is_empty());
    }
}
