//! Runtime settings read from a `key = value` file.
//!
//! ```text
//! # enumeration limits
//! tree_cap = 8
//! forest_cap = 8
//! threads = 4
//! cache_dir = /tmp/oeis
//! sum2_n_max = 30
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are an
//! error so typos do not go unnoticed. Sampling always uses ChaCha8 seeded
//! through `seed_from_u64`, which is not configurable.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::identities::SuiteConfig;
use crate::oracle::{Oracle, DEFAULT_FOREST_CAP, DEFAULT_TREE_CAP};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub tree_cap: u32,
    pub forest_cap: u32,
    pub threads: usize,
    pub cache_dir: PathBuf,
    /// Largest `n` (trees on `n + 1` vertices) for the census comparison.
    pub census_n_max: u32,
    pub suite: SuiteConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tree_cap: DEFAULT_TREE_CAP,
            forest_cap: DEFAULT_FOREST_CAP,
            threads: 1,
            cache_dir: default_cache_dir(),
            census_n_max: 6,
            suite: SuiteConfig::default(),
        }
    }
}

/// `$XDG_CACHE_HOME/treecount`, else `$HOME/.cache/treecount`, else a
/// directory under the working directory.
pub fn default_cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
        return PathBuf::from(dir).join("treecount");
    }
    if let Some(home) = std::env::var_os("HOME").filter(|d| !d.is_empty()) {
        return PathBuf::from(home).join(".cache").join("treecount");
    }
    PathBuf::from(".treecount-cache")
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Applies one setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let s = &mut self.suite;
        match key {
            "tree_cap" => self.tree_cap = number(key, value)?,
            "forest_cap" => self.forest_cap = number(key, value)?,
            "threads" => {
                self.threads = number(key, value)?;
                s.threads = self.threads;
            }
            "cache_dir" => self.cache_dir = PathBuf::from(value),
            "census_n_max" => self.census_n_max = number(key, value)?,
            "sum1_n_max" => s.sum1_n_max = number(key, value)?,
            "sum1_kl_max" => s.sum1_kl_max = number(key, value)?,
            "general_kl_max" => s.general_kl_max = number(key, value)?,
            "general_mn_min" => s.general_mn_min = number(key, value)?,
            "general_mn_max" => s.general_mn_max = number(key, value)?,
            "chu_n_max" => s.chu_n_max = number(key, value)?,
            "abel_n_max" => s.abel_n_max = number(key, value)?,
            "sum2_n_max" => s.sum2_n_max = number(key, value)?,
            "abel_spec_n_max" => s.abel_spec_n_max = number(key, value)?,
            "chen_n_max" => s.chen_n_max = number(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn oracle(&self) -> Oracle {
        Oracle {
            tree_cap: self.tree_cap,
            forest_cap: self.forest_cap,
            threads: self.threads.max(1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_overrides() {
        let c = Config::parse("# limits\ntree_cap = 9\n\nthreads=3\ncache_dir = /tmp/x\nsum2_n_max = 0\n").unwrap();
        assert_eq!(c.tree_cap, 9);
        assert_eq!(c.threads, 3);
        assert_eq!(c.suite.threads, 3);
        assert_eq!(c.cache_dir, PathBuf::from("/tmp/x"));
        assert_eq!(c.suite.sum2_n_max, 0);
        assert_eq!(c.forest_cap, DEFAULT_FOREST_CAP);
        assert_eq!(c.oracle().tree_cap, 9);
    }

    #[test]
    fn parse_errors() {
        assert!(Config::parse("bogus = 1").is_err());
        assert!(Config::parse("tree_cap").is_err());
        assert!(Config::parse("tree_cap = many").is_err());
        assert!(Config::parse("general_mn_min = -6").is_ok());
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("treecount.conf");
        fs::write(&path, "chen_n_max = 3\n").unwrap();
        assert_eq!(Config::load(&path).unwrap().suite.chen_n_max, 3);
        assert!(Config::load(&dir.path().join("missing")).is_err());
    }
}
