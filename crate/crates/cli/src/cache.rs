//! Root cache keyed by a hash of the model data.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use gaudin_cm::bethe::{validate_roots, BetheRoots, BetheSystem};
use gaudin_cm::linalg::C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Sector;

pub const CACHE_ENV: &str = "GAUDIN_CM_CACHE";
const CACHE_SCHEMA: u32 = 1;

/// Everything the Bethe equations depend on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheKey {
    pub family: String,
    pub geometry: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub z: Vec<C64>,
    pub xi: C64,
    pub hbar: C64,
}

impl CacheKey {
    pub fn of(sector: &Sector) -> Self {
        match sector {
            Sector::Boundary { spec, .. } => Self {
                family: spec.tag.to_string(),
                geometry: spec.geometry.to_string(),
                n: spec.n(),
                m: spec.excitations,
                z: spec.z.clone(),
                xi: spec.xi,
                hbar: spec.hbar,
            },
            Sector::Periodic { z, omega, hbar, m } => Self {
                family: "periodic".into(),
                geometry: "N".into(),
                n: z.len(),
                m: *m,
                z: z.clone(),
                xi: *omega,
                hbar: *hbar,
            },
        }
    }

    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("plain data serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: CacheKey,
    pub roots: Vec<BetheRoots>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootCache {
    pub schema_version: u32,
    pub entries: BTreeMap<String, CacheEntry>,
}

impl Default for RootCache {
    fn default() -> Self {
        Self {
            schema_version: CACHE_SCHEMA,
            entries: BTreeMap::new(),
        }
    }
}

/// `--cache` wins over the environment override.
pub fn resolve_path(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

impl RootCache {
    /// A missing file is an empty cache; an unreadable one is discarded with a warning.
    pub fn load(path: &Path) -> Self {
        let Ok(text) = std::fs::read_to_string(path) else {
            return Self::default();
        };
        match serde_json::from_str::<Self>(&text) {
            Ok(c) if c.schema_version == CACHE_SCHEMA => c,
            Ok(c) => {
                eprintln!("warning: ignoring cache {} with schema {}", path.display(), c.schema_version);
                Self::default()
            }
            Err(e) => {
                eprintln!("warning: ignoring corrupt cache {}: {e}", path.display());
                Self::default()
            }
        }
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_string_pretty(self).expect("plain data serializes") + "\n")?;
        std::fs::rename(tmp, path)
    }

    /// Cached roots, provided the key matches and every set still solves the
    /// equations under `gate`.
    pub fn lookup(&self, key: &CacheKey, system: &dyn BetheSystem, gate: f64) -> Option<Vec<BetheRoots>> {
        let entry = self.entries.get(&key.digest())?;
        if &entry.key != key {
            return None;
        }
        entry
            .roots
            .iter()
            .map(|r| validate_roots(system, &r.mu, gate).map(|_| r.clone()))
            .collect()
    }

    pub fn insert(&mut self, key: CacheKey, roots: Vec<BetheRoots>) {
        self.entries.insert(key.digest(), CacheEntry { key, roots });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gaudin_cm::bethe::BoundarySystem;
    use gaudin_cm::calogero::RootKind;
    use gaudin_cm::{GaudinSpec, SuperalgebraTag};

    fn sector(xi: f64) -> Sector {
        let spec = GaudinSpec::two_n(
            SuperalgebraTag::GL11,
            vec![C64::new(1.0, 0.0)],
            C64::new(xi, 0.0),
            C64::new(1.0, 0.0),
            1,
        )
        .unwrap();
        Sector::Boundary { kind: RootKind::C, spec }
    }

    #[test]
    fn digest_separates_models() {
        assert_eq!(CacheKey::of(&sector(1.0)).digest(), CacheKey::of(&sector(1.0)).digest());
        assert_ne!(CacheKey::of(&sector(1.0)).digest(), CacheKey::of(&sector(2.0)).digest());
    }

    #[test]
    fn stale_roots_are_rejected() {
        let s = sector(1.0);
        let Sector::Boundary { spec, .. } = &s else { unreachable!() };
        let sys = BoundarySystem::new(spec.clone()).unwrap();
        let key = CacheKey::of(&s);
        let mut cache = RootCache::default();
        let good = BetheRoots {
            mu: vec![C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)],
            residual: 0.0,
            admissible: true,
        };
        cache.insert(key.clone(), vec![good.clone()]);
        assert_eq!(cache.lookup(&key, &sys, 1e-10), Some(vec![good]));
        let bad = BetheRoots {
            mu: vec![C64::new(0.3, 0.0)],
            residual: 0.0,
            admissible: true,
        };
        cache.insert(key.clone(), vec![bad]);
        assert_eq!(cache.lookup(&key, &sys, 1e-10), None);
    }
}
