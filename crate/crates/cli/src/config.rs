//! Campaign configuration and its materialization into model instances.

use std::path::Path;

use gaudin_cm::bethe::{seed_strategy, SEED_STRATEGIES};
use gaudin_cm::calogero::RootKind;
use gaudin_cm::linalg::C64;
use gaudin_cm::model::random_points;
use gaudin_cm::{GaudinSpec, SuperalgebraTag};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("unsupported schema version {0} (expected {SCHEMA_VERSION})")]
    Schema(u32),
    #[error("{0}")]
    Invalid(String),
}

/// A real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Real(f64),
    Complex([f64; 2]),
}

impl Number {
    pub fn value(self) -> C64 {
        match self {
            Self::Real(x) => C64::new(x, 0.0),
            Self::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPoints {
    pub seed: u64,
    #[serde(default = "default_radius")]
    pub radius: f64,
}

fn default_radius() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Points {
    Explicit(Vec<Number>),
    Random { random: RandomPoints },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub root_system: String,
    #[serde(default)]
    pub superalgebra: Option<String>,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub z: Points,
    #[serde(default)]
    pub xi: Option<Number>,
    #[serde(default)]
    pub hbar: Option<Number>,
    /// Twist, A-type only.
    #[serde(default)]
    pub omega: Option<Number>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub bethe: f64,
    pub collapse: f64,
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            bethe: 1e-10,
            collapse: 1e-7,
            identity: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Seeds {
    pub rng: u64,
    pub newton_count: usize,
    pub strategies: Vec<String>,
}

impl Default for Seeds {
    fn default() -> Self {
        Self {
            rng: 0,
            newton_count: 64,
            strategies: vec!["mixed".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub cases: Vec<CaseConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default)]
    pub output: Option<String>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

impl CampaignConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cfg: Self = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.display().to_string(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Campaign-wide settings; per-case problems are reported, not raised.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Schema(self.schema_version));
        }
        let t = &self.tolerances;
        for (name, v) in [("bethe", t.bethe), ("collapse", t.collapse), ("identity", t.identity)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::Invalid(format!("tolerance `{name}` must be positive")));
            }
        }
        if self.seeds.strategies.is_empty() {
            return Err(ConfigError::Invalid("at least one seed strategy is required".into()));
        }
        for s in &self.seeds.strategies {
            if seed_strategy(s).is_none() {
                return Err(ConfigError::Invalid(format!(
                    "unknown seed strategy `{s}` (known: {})",
                    SEED_STRATEGIES.join(", ")
                )));
            }
        }
        Ok(())
    }
}

/// A case after parsing names and drawing random points.
#[derive(Debug, Clone, PartialEq)]
pub enum Sector {
    Boundary { kind: RootKind, spec: GaudinSpec },
    Periodic { z: Vec<C64>, omega: C64, hbar: C64, m: usize },
}

fn draw_points(points: &Points, n: usize) -> Result<Vec<C64>, String> {
    match points {
        Points::Explicit(z) if z.len() != n => Err(format!("N = {n} but {} points given", z.len())),
        Points::Explicit(z) => Ok(z.iter().map(|x| x.value()).collect()),
        Points::Random { random } if !(random.radius > 0.0 && random.radius.is_finite()) => {
            Err("random radius must be positive".into())
        }
        Points::Random { random } => Ok(random_points(
            &mut ChaCha8Rng::seed_from_u64(random.seed),
            n,
            random.radius,
        )),
    }
}

impl CaseConfig {
    pub fn materialize(&self) -> Result<Sector, String> {
        let kind: RootKind = self.root_system.parse().map_err(|e: gaudin_cm::Error| e.to_string())?;
        let z = draw_points(&self.z, self.n)?;
        let hbar = self.hbar.map_or(C64::new(1.0, 0.0), Number::value);
        if kind == RootKind::A {
            let omega = self.omega.ok_or("A-type cases need `omega`")?.value();
            if self.m > self.n {
                return Err(format!("excitation number {} exceeds N = {}", self.m, self.n));
            }
            return Ok(Sector::Periodic { z, omega, hbar, m: self.m });
        }
        if self.omega.is_some() {
            return Err("`omega` applies to A-type cases only".into());
        }
        let tag: SuperalgebraTag = self
            .superalgebra
            .as_deref()
            .ok_or("`superalgebra` is required")?
            .parse()
            .map_err(|e: gaudin_cm::Error| e.to_string())?;
        let forced = C64::new(tag.origin_xi(), 0.0);
        let spec = match kind {
            RootKind::B => {
                if let Some(x) = self.xi.map(Number::value).filter(|x| *x != forced) {
                    return Err(format!("B fixes xi = {forced}, got {x}"));
                }
                GaudinSpec::two_n_plus_one(tag, z, hbar, self.m)
            }
            RootKind::C => {
                let xi = self.xi.ok_or("C cases need `xi`")?.value();
                GaudinSpec::two_n(tag, z, xi, hbar, self.m)
            }
            RootKind::D => GaudinSpec::two_n(tag, z, self.xi.map_or(forced, Number::value), hbar, self.m),
            RootKind::A => unreachable!(),
        }
        .map_err(|e| e.to_string())?;
        gaudin_cm::duality::check_binding(kind, &spec).map_err(|e| e.to_string())?;
        Ok(Sector::Boundary { kind, spec })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(json: &str) -> CaseConfig {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn numbers_accept_reals_and_pairs() {
        let c = case(r#"{"root_system":"C","superalgebra":"gl11","N":2,"M":1,"z":[1,[0.5,2]],"xi":1}"#);
        let Sector::Boundary { spec, .. } = c.materialize().unwrap() else {
            panic!()
        };
        assert_eq!(spec.z, vec![C64::new(1.0, 0.0), C64::new(0.5, 2.0)]);
    }

    #[test]
    fn random_points_are_reproducible() {
        let c = case(r#"{"root_system":"D","superalgebra":"gl20","N":3,"M":1,"z":{"random":{"seed":5}}}"#);
        assert_eq!(c.materialize().unwrap(), c.materialize().unwrap());
    }

    #[test]
    fn invariant_violations_are_reasons() {
        for bad in [
            r#"{"root_system":"C","superalgebra":"gl11","N":2,"M":1,"z":[1]}"#,
            r#"{"root_system":"C","superalgebra":"gl11","N":1,"M":2,"z":[1],"xi":0}"#,
            r#"{"root_system":"B","superalgebra":"gl11","N":1,"M":1,"z":[1],"xi":1}"#,
            r#"{"root_system":"D","superalgebra":"gl11","N":1,"M":1,"z":[1],"xi":0.5}"#,
            r#"{"root_system":"C","superalgebra":"gl11","N":2,"M":1,"z":[1,-1],"xi":0}"#,
            r#"{"root_system":"A","N":2,"M":1,"z":[1,2]}"#,
            r#"{"root_system":"E","superalgebra":"gl11","N":1,"M":1,"z":[1]}"#,
        ] {
            assert!(case(bad).materialize().is_err(), "{bad}");
        }
    }

    #[test]
    fn campaign_validation() {
        let mut cfg: CampaignConfig = serde_json::from_str(r#"{"cases":[]}"#).unwrap();
        assert!(cfg.validate().is_ok());
        cfg.seeds.strategies = vec!["nope".into()];
        assert!(cfg.validate().is_err());
        cfg.seeds = Seeds::default();
        cfg.schema_version = 9;
        assert!(cfg.validate().is_err());
    }
}
