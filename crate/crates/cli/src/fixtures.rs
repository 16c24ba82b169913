//! JSON fixtures for results that are expensive to recompute: Siegel
//! polynomials confirmed by the density oracle, and Schottky theta
//! differences. Each file records how its values were produced.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub oracle: String,
    pub depth: u32,
    pub date: String,
}

impl Provenance {
    pub fn today(oracle: &str, depth: u32) -> Self {
        Self { oracle: oracle.to_string(), depth, date: chrono::Utc::now().format("%Y-%m-%d").to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiegelFixture {
    pub p: u64,
    pub gram: String,
    pub coeffs: Vec<String>,
    /// Evaluation points `X = p^{-k}` of the density oracle.
    pub ks: Vec<u32>,
    pub densities: Vec<String>,
    /// Whether the depth used was confirmed one level deeper.
    pub confirmed: bool,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchottkyFixture {
    pub provenance: Provenance,
    pub values: BTreeMap<String, i64>,
}

#[derive(Debug, Clone)]
pub struct FixtureStore {
    dir: PathBuf,
    recheck: bool,
}

impl FixtureStore {
    pub fn new(dir: impl Into<PathBuf>, recheck: bool) -> Self {
        Self { dir: dir.into(), recheck }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// The stored value, unless absent, unreadable or a recheck is forced.
    pub fn load<T: DeserializeOwned>(&self, name: &str) -> Option<T> {
        if self.recheck {
            return None;
        }
        let text = fs::read_to_string(self.dir.join(name)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store<T: Serialize>(&self, name: &str, value: &T) -> io::Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
        fs::write(path, text + "\n")
    }
}

pub fn siegel_name(p: u64, gram: &str) -> String {
    format!("siegel/p{p}_{}.json", gram.replace(';', "_"))
}

pub const SCHOTTKY_NAME: &str = "schottky.json";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_recheck() {
        let dir = tempfile::tempdir().unwrap();
        let fixture = SiegelFixture {
            p: 2,
            gram: "2,0;0,8".into(),
            coeffs: vec!["1".into(), "0".into(), "8".into()],
            ks: vec![2, 3, 4, 5],
            densities: vec!["27/32".into(), "945/1024".into(), "31185/32768".into(), "1019745/1048576".into()],
            confirmed: true,
            provenance: Provenance::today("density", 4),
        };
        let name = siegel_name(2, "2,0;0,8");
        FixtureStore::new(dir.path(), false).store(&name, &fixture).unwrap();
        assert_eq!(FixtureStore::new(dir.path(), false).load::<SiegelFixture>(&name), Some(fixture));
        assert_eq!(FixtureStore::new(dir.path(), true).load::<SiegelFixture>(&name), None);
        assert_eq!(FixtureStore::new(dir.path(), false).load::<SiegelFixture>("missing.json"), None);
    }
}
