//! Model data shared by the quantum and classical sides.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::Grading;
use crate::linalg::C64;

/// Relative separation below which two marked points are treated as colliding.
pub const POLE_TOL: f64 = 1e-12;

/// The three superalgebras with `m + n = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SuperalgebraTag {
    #[serde(rename = "gl20")]
    GL20,
    #[serde(rename = "gl11")]
    GL11,
    #[serde(rename = "gl02")]
    GL02,
}

impl SuperalgebraTag {
    pub const ALL: [SuperalgebraTag; 3] = [Self::GL20, Self::GL11, Self::GL02];

    pub fn grading(self) -> Grading {
        match self {
            Self::GL20 => Grading { m: 2, n: 0 },
            Self::GL11 => Grading { m: 1, n: 1 },
            Self::GL02 => Grading { m: 0, n: 2 },
        }
    }

    /// `(p(1), p(2))`.
    pub fn parities(self) -> (i32, i32) {
        match self {
            Self::GL20 => (0, 0),
            Self::GL11 => (0, 1),
            Self::GL02 => (1, 1),
        }
    }

    /// `((-1)^{p(1)}, (-1)^{p(2)})`.
    pub fn signs(self) -> (f64, f64) {
        let (p1, p2) = self.parities();
        (sign(p1), sign(p2))
    }

    /// `p(1) - p(2)`: the boundary parameter used with an extra site at the origin.
    pub fn origin_xi(self) -> f64 {
        let (p1, p2) = self.parities();
        f64::from(p1 - p2)
    }
}

fn sign(p: i32) -> f64 {
    if p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl fmt::Display for SuperalgebraTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::GL20 => "gl20",
            Self::GL11 => "gl11",
            Self::GL02 => "gl02",
        })
    }
}

impl FromStr for SuperalgebraTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['(', ')', '|', ' '], "").as_str() {
            "gl20" => Ok(Self::GL20),
            "gl11" => Ok(Self::GL11),
            "gl02" => Ok(Self::GL02),
            _ => Err(Error::InvalidSpec(format!("unknown superalgebra `{s}`"))),
        }
    }
}

/// Marked points `±z_i` (2N) or `±z_i, 0` (2N+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Geometry {
    TwoN,
    TwoNPlusOne,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TwoN => "2N",
            Self::TwoNPlusOne => "2N+1",
        })
    }
}

/// One boundary Gaudin model instance together with its excitation number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaudinSpec {
    pub tag: SuperalgebraTag,
    pub z: Vec<C64>,
    pub xi: C64,
    pub hbar: C64,
    pub geometry: Geometry,
    pub excitations: usize,
}

impl GaudinSpec {
    /// Model with `2N` marked points and a free boundary parameter.
    pub fn two_n(tag: SuperalgebraTag, z: Vec<C64>, xi: C64, hbar: C64, excitations: usize) -> Result<Self> {
        let s = Self {
            tag,
            z,
            xi,
            hbar,
            geometry: Geometry::TwoN,
            excitations,
        };
        s.validate()?;
        Ok(s)
    }

    /// Model with `2N+1` marked points; `ξ` is fixed to `p(1) - p(2)`.
    pub fn two_n_plus_one(tag: SuperalgebraTag, z: Vec<C64>, hbar: C64, excitations: usize) -> Result<Self> {
        let s = Self {
            tag,
            z,
            xi: C64::new(tag.origin_xi(), 0.0),
            hbar,
            geometry: Geometry::TwoNPlusOne,
            excitations,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn grading(&self) -> Grading {
        self.tag.grading()
    }

    pub fn validate(&self) -> Result<()> {
        if self.z.is_empty() {
            return Err(Error::InvalidSpec("at least one marked point is required".into()));
        }
        if self.hbar.norm() == 0.0 || !self.hbar.is_finite() {
            return Err(Error::InvalidSpec("hbar must be finite and nonzero".into()));
        }
        if !self.xi.is_finite() {
            return Err(Error::InvalidSpec("xi must be finite".into()));
        }
        if self.geometry == Geometry::TwoNPlusOne && self.xi != C64::new(self.tag.origin_xi(), 0.0) {
            return Err(Error::InvalidSpec(format!(
                "xi is fixed to {} with 2N+1 marked points",
                self.tag.origin_xi()
            )));
        }
        if self.excitations > self.n() {
            return Err(Error::InvalidSpec(format!(
                "excitation number {} exceeds N = {}",
                self.excitations,
                self.n()
            )));
        }
        check_points(&self.z)
    }
}

/// `z_i ≠ 0`, `z_i ≠ ±z_j`, all finite.
pub fn check_points(z: &[C64]) -> Result<()> {
    let scale = z.iter().fold(0.0_f64, |m, x| m.max(x.norm())).max(1.0);
    let tol = POLE_TOL * scale;
    for (i, zi) in z.iter().enumerate() {
        if !zi.is_finite() {
            return Err(Error::InvalidSpec(format!("z_{} is not finite", i + 1)));
        }
        if zi.norm() <= tol {
            return Err(Error::Pole(format!("z_{} = 0", i + 1)));
        }
        for (j, zj) in z.iter().enumerate().skip(i + 1) {
            if (zi - zj).norm() <= tol || (zi + zj).norm() <= tol {
                return Err(Error::Pole(format!("z_{} = ±z_{}", i + 1, j + 1)));
            }
        }
    }
    Ok(())
}

/// Uniform draw from the disc `|w| < radius`.
pub fn random_in_disc<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> C64 {
    let rho = radius * rng.gen::<f64>().sqrt();
    C64::from_polar(rho, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `n` points in the disc `|z| < radius` with `|z_i|`, `|z_i - z_j|` and
/// `|z_i + z_j|` all at least `0.1·radius`.
pub fn random_points<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> Vec<C64> {
    let sep = 0.1 * radius;
    let mut out: Vec<C64> = Vec::with_capacity(n);
    while out.len() < n {
        let z = random_in_disc(rng, radius);
        if z.norm() >= sep && out.iter().all(|w| (z - w).norm() >= sep && (z + w).norm() >= sep) {
            out.push(z);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, r};

    #[test]
    fn tag_round_trip() {
        for t in SuperalgebraTag::ALL {
            assert_eq!(t.to_string().parse::<SuperalgebraTag>().unwrap(), t);
        }
        assert_eq!("gl(1|1)".parse::<SuperalgebraTag>().unwrap(), SuperalgebraTag::GL11);
        assert!("gl21".parse::<SuperalgebraTag>().is_err());
    }

    #[test]
    fn spec_rejects_collisions() {
        let t = SuperalgebraTag::GL20;
        assert!(GaudinSpec::two_n(t, vec![r(1.0), r(-1.0)], r(0.0), r(1.0), 0).is_err());
        assert!(GaudinSpec::two_n(t, vec![r(0.0)], r(0.0), r(1.0), 0).is_err());
        assert!(GaudinSpec::two_n(t, vec![r(1.0)], r(0.0), r(0.0), 0).is_err());
        assert!(GaudinSpec::two_n(t, vec![r(1.0)], r(0.0), r(1.0), 2).is_err());
        assert!(GaudinSpec::two_n(t, vec![c(1.0, 0.3), r(2.0)], r(0.4), r(1.0), 2).is_ok());
    }

    #[test]
    fn origin_geometry_fixes_xi() {
        let s = GaudinSpec::two_n_plus_one(SuperalgebraTag::GL11, vec![r(1.0)], r(1.0), 1).unwrap();
        assert_eq!(s.xi, r(-1.0));
        let mut bad = s.clone();
        bad.xi = r(0.5);
        assert!(bad.validate().is_err());
    }
}
