//! Bethe equations, eigenvalue formulas and a multi-start damped Newton solver.
//!
//! Each equation family is a [`BetheSystem`]; seed generators implement
//! [`SeedStrategy`] and are looked up by name through [`seed_strategy`].

use rand::{Rng, SeedableRng};
use rug::Float;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calogero::companion_roots;
use crate::error::{Error, Result};
use crate::linalg::{multiset_distance, CMat, C64, ONE, ZERO};
use crate::precision::{mp_g, mp_sum, polish_roots, MpComplex, PREC};
use crate::model::{GaudinSpec, Geometry, SuperalgebraTag};

/// Relative distance to a pole below which a root set is inadmissible.
pub const ADMISSIBLE_TOL: f64 = 1e-6;
/// Canonical root sets closer than this are the same solution.
pub const DEDUP_TOL: f64 = 1e-8;

/// A candidate or verified set of Bethe roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheRoots {
    pub mu: Vec<C64>,
    pub residual: f64,
    pub admissible: bool,
}

/// One family of Bethe equations together with its eigenvalue formula.
pub trait BetheSystem: Send + Sync {
    fn name(&self) -> String;
    /// Number of unknowns `M`.
    fn excitations(&self) -> usize;
    /// Marked points, used for seeding and scaling.
    fn points(&self) -> &[C64];
    /// `LHS - RHS` of each equation.
    fn residual(&self, mu: &[C64]) -> Result<Vec<C64>>;
    /// `∂F_l/∂μ_k`.
    fn jacobian(&self, mu: &[C64]) -> Result<CMat>;
    /// Eigenvalues of the Hamiltonians attached to the marked points.
    fn eigenvalues(&self, mu: &[C64]) -> Result<Vec<C64>>;
    /// Representative of the solution's symmetry orbit, sorted.
    fn canonicalize(&self, mu: &[C64]) -> Vec<C64>;
    /// Pole avoidance with relative tolerance `tol`.
    fn admissible(&self, mu: &[C64], tol: f64) -> bool;
    /// [`BetheSystem::residual`] at extended precision.
    fn residual_mp(&self, mu: &[MpComplex]) -> Vec<MpComplex>;
    /// [`BetheSystem::eigenvalues`] at extended precision.
    fn eigenvalues_mp(&self, mu: &[MpComplex]) -> Vec<MpComplex>;
    /// Exact single-root candidates when the equations decouple.
    fn exact_candidates(&self) -> Option<Vec<C64>> {
        None
    }
}

fn g(a: C64, b: C64) -> C64 {
    ONE / (a - b) + ONE / (a + b)
}

fn dg_da(a: C64, b: C64) -> C64 {
    -(ONE / ((a - b) * (a - b))) - ONE / ((a + b) * (a + b))
}

fn dg_db(a: C64, b: C64) -> C64 {
    ONE / ((a - b) * (a - b)) - ONE / ((a + b) * (a + b))
}

fn scale_of(z: &[C64]) -> f64 {
    z.iter().fold(0.0_f64, |m, x| m.max(x.norm())).max(1e-300)
}

fn sort_roots(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

/// `μ` or `-μ`, whichever has positive real part (positive imaginary part on
/// the imaginary axis).
pub fn mirror_representative(mu: C64) -> C64 {
    if mu.re > 0.0 || (mu.re == 0.0 && mu.im > 0.0) {
        mu
    } else {
        -mu
    }
}

/// Boundary Gaudin model with `2N` or `2N+1` marked points.
#[derive(Debug, Clone)]
pub struct BoundarySystem {
    pub spec: GaudinSpec,
}

impl BoundarySystem {
    pub fn new(spec: GaudinSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec })
    }

    fn check_poles(&self, mu: &[C64]) -> Result<()> {
        let tol = 1e-14 * scale_of(&self.spec.z);
        for (l, a) in mu.iter().enumerate() {
            if !a.is_finite() || a.norm() <= tol {
                return Err(Error::Pole(format!("mu_{} = 0", l + 1)));
            }
            for zk in &self.spec.z {
                if (a - zk).norm() <= tol || (a + zk).norm() <= tol {
                    return Err(Error::Pole(format!("mu_{} = ±z", l + 1)));
                }
            }
            for (k, b) in mu.iter().enumerate() {
                if k != l && ((a - b).norm() <= tol || (a + b).norm() <= tol) {
                    return Err(Error::Pole(format!("mu_{} = ±mu_{}", l + 1, k + 1)));
                }
            }
        }
        Ok(())
    }
}

impl BetheSystem for BoundarySystem {
    fn name(&self) -> String {
        format!("boundary-{}-{}", self.spec.tag, self.spec.geometry)
    }

    fn excitations(&self) -> usize {
        self.spec.excitations
    }

    fn points(&self) -> &[C64] {
        &self.spec.z
    }

    fn residual(&self, mu: &[C64]) -> Result<Vec<C64>> {
        self.check_poles(mu)?;
        let (s1, s2) = self.spec.tag.signs();
        let cc = s1 + s2;
        let xi = self.spec.xi;
        Ok(mu
            .iter()
            .enumerate()
            .map(|(l, &a)| {
                let sz: C64 = self.spec.z.iter().map(|&zk| g(a, zk)).sum();
                let sm: C64 = mu
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != l)
                    .map(|(_, &b)| g(a, b))
                    .sum();
                let master = match self.spec.geometry {
                    Geometry::TwoN => xi * 2.0 / a + sz * s1 - (ONE / a + sm) * cc,
                    Geometry::TwoNPlusOne => sz * s1 - sm * cc,
                };
                master * s1
            })
            .collect())
    }

    fn jacobian(&self, mu: &[C64]) -> Result<CMat> {
        self.check_poles(mu)?;
        let (s1, s2) = self.spec.tag.signs();
        let cc = s1 + s2;
        let xi = self.spec.xi;
        let m = mu.len();
        let mut j = CMat::zeros(m, m);
        for l in 0..m {
            let a = mu[l];
            let dz: C64 = self.spec.z.iter().map(|&zk| dg_da(a, zk)).sum();
            let dm: C64 = (0..m).filter(|&k| k != l).map(|k| dg_da(a, mu[k])).sum();
            let diag = match self.spec.geometry {
                Geometry::TwoN => -xi * 2.0 / (a * a) + dz * s1 - (-ONE / (a * a) + dm) * cc,
                Geometry::TwoNPlusOne => dz * s1 - dm * cc,
            };
            j[(l, l)] = diag * s1;
            for k in 0..m {
                if k != l {
                    j[(l, k)] = -dg_db(a, mu[k]) * cc * s1;
                }
            }
        }
        Ok(j)
    }

    fn eigenvalues(&self, mu: &[C64]) -> Result<Vec<C64>> {
        self.check_poles(mu)?;
        let z = &self.spec.z;
        let (s1, _) = self.spec.tag.signs();
        let (p1, p2) = self.spec.tag.parities();
        let hb = self.spec.hbar;
        Ok((0..z.len())
            .map(|i| {
                let zi = z[i];
                let sz: C64 = (0..z.len()).filter(|&k| k != i).map(|k| g(zi, z[k])).sum();
                let sm: C64 = mu.iter().map(|&u| g(zi, u)).sum();
                match self.spec.geometry {
                    Geometry::TwoN => {
                        let a = self.spec.xi - f64::from(p1) + f64::from(p2);
                        hb * (a / zi + (sz - sm) * s1)
                    }
                    Geometry::TwoNPlusOne => hb * s1 * (2.0 / zi + sz - sm),
                }
            })
            .collect())
    }

    fn canonicalize(&self, mu: &[C64]) -> Vec<C64> {
        sort_roots(mu.iter().map(|&u| mirror_representative(u)).collect())
    }

    fn admissible(&self, mu: &[C64], tol: f64) -> bool {
        let t = tol * scale_of(&self.spec.z);
        mu.iter().enumerate().all(|(l, a)| {
            a.is_finite()
                && a.norm() > t
                && self.spec.z.iter().all(|zk| (a - zk).norm() > t && (a + zk).norm() > t)
                && mu[l + 1..].iter().all(|b| (a - b).norm() > t && (a + b).norm() > t)
        })
    }

    fn exact_candidates(&self) -> Option<Vec<C64>> {
        if self.spec.tag == SuperalgebraTag::GL11 {
            gl11_roots_exact(&self.spec).ok()
        } else {
            None
        }
    }

    fn residual_mp(&self, mu: &[MpComplex]) -> Vec<MpComplex> {
        let spec = &self.spec;
        let (s1, s2) = spec.tag.signs();
        let s1f = Float::with_val(PREC, s1);
        let cc = Float::with_val(PREC, s1 + s2);
        let z: Vec<MpComplex> = spec.z.iter().map(|x| MpComplex::from_c64(*x)).collect();
        let xi2 = MpComplex::from_c64(spec.xi * 2.0);
        (0..mu.len())
            .map(|l| {
                let a = &mu[l];
                let sz = mp_sum(z.iter().map(|zk| mp_g(a, zk)));
                let sm = mp_sum((0..mu.len()).filter(|&k| k != l).map(|k| mp_g(a, &mu[k])));
                let master = match spec.geometry {
                    Geometry::TwoN => {
                        let t = &(&xi2 / a) + &sz.scale(&s1f);
                        &t - &(&a.recip() + &sm).scale(&cc)
                    }
                    Geometry::TwoNPlusOne => &sz.scale(&s1f) - &sm.scale(&cc),
                };
                master.scale(&s1f)
            })
            .collect()
    }

    fn eigenvalues_mp(&self, mu: &[MpComplex]) -> Vec<MpComplex> {
        let spec = &self.spec;
        let (s1, _) = spec.tag.signs();
        let (p1, p2) = spec.tag.parities();
        let s1f = Float::with_val(PREC, s1);
        let hb = MpComplex::from_c64(spec.hbar);
        let z: Vec<MpComplex> = spec.z.iter().map(|x| MpComplex::from_c64(*x)).collect();
        (0..z.len())
            .map(|i| {
                let zi = &z[i];
                let sz = mp_sum((0..z.len()).filter(|&k| k != i).map(|k| mp_g(zi, &z[k])));
                let sm = mp_sum(mu.iter().map(|u| mp_g(zi, u)));
                let inner = match spec.geometry {
                    Geometry::TwoN => {
                        let a = &MpComplex::from_c64(spec.xi) - &MpComplex::from_f64(f64::from(p1 - p2), 0.0);
                        &(&a / zi) + &(&sz - &sm).scale(&s1f)
                    }
                    Geometry::TwoNPlusOne => {
                        let two = MpComplex::from_f64(2.0, 0.0);
                        (&(&(&two / zi) + &sz) - &sm).scale(&s1f)
                    }
                };
                &hb * &inner
            })
            .collect()
    }
}

/// Equations of the periodic (type A) Gaudin model with twist `ω`.
#[derive(Debug, Clone)]
pub struct ATypeSystem {
    pub z: Vec<C64>,
    pub omega: C64,
    pub hbar: C64,
    pub excitations: usize,
}

impl ATypeSystem {
    pub fn new(z: Vec<C64>, omega: C64, hbar: C64, excitations: usize) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::InvalidSpec("at least one marked point is required".into()));
        }
        let tol = 1e-12 * scale_of(&z).max(1.0);
        for (i, a) in z.iter().enumerate() {
            if z[i + 1..].iter().any(|b| (a - b).norm() <= tol) {
                return Err(Error::Pole("coincident marked points".into()));
            }
        }
        if hbar.norm() == 0.0 {
            return Err(Error::InvalidSpec("hbar must be nonzero".into()));
        }
        if excitations > z.len() {
            return Err(Error::InvalidSpec("excitation number exceeds N".into()));
        }
        Ok(Self {
            z,
            omega,
            hbar,
            excitations,
        })
    }

    fn check_poles(&self, mu: &[C64]) -> Result<()> {
        let tol = 1e-14 * scale_of(&self.z);
        for (l, a) in mu.iter().enumerate() {
            if !a.is_finite() || self.z.iter().any(|zk| (a - zk).norm() <= tol) {
                return Err(Error::Pole(format!("mu_{} = z", l + 1)));
            }
            if mu[l + 1..].iter().any(|b| (a - b).norm() <= tol) {
                return Err(Error::Pole(format!("coincident mu_{}", l + 1)));
            }
        }
        Ok(())
    }
}

impl BetheSystem for ATypeSystem {
    fn name(&self) -> String {
        "periodic-gl2".into()
    }

    fn excitations(&self) -> usize {
        self.excitations
    }

    fn points(&self) -> &[C64] {
        &self.z
    }

    fn residual(&self, mu: &[C64]) -> Result<Vec<C64>> {
        self.check_poles(mu)?;
        let hb = self.hbar;
        Ok(mu
            .iter()
            .enumerate()
            .map(|(a, &x)| {
                let sz: C64 = self.z.iter().map(|&zk| ONE / (x - zk)).sum();
                let sm: C64 = mu
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| *b != a)
                    .map(|(_, &y)| ONE / (x - y))
                    .sum();
                self.omega * 2.0 + hb * sz - hb * sm * 2.0
            })
            .collect())
    }

    fn jacobian(&self, mu: &[C64]) -> Result<CMat> {
        self.check_poles(mu)?;
        let hb = self.hbar;
        let m = mu.len();
        let mut j = CMat::zeros(m, m);
        for a in 0..m {
            let x = mu[a];
            let dz: C64 = self.z.iter().map(|&zk| ONE / ((x - zk) * (x - zk))).sum();
            let mut diag = -hb * dz;
            for b in 0..m {
                if b != a {
                    let d = ONE / ((x - mu[b]) * (x - mu[b]));
                    diag += hb * d * 2.0;
                    j[(a, b)] = -hb * d * 2.0;
                }
            }
            j[(a, a)] = diag;
        }
        Ok(j)
    }

    fn eigenvalues(&self, mu: &[C64]) -> Result<Vec<C64>> {
        self.check_poles(mu)?;
        let hb = self.hbar;
        Ok((0..self.z.len())
            .map(|i| {
                let zi = self.z[i];
                let sz: C64 = (0..self.z.len())
                    .filter(|&k| k != i)
                    .map(|k| hb / (zi - self.z[k]))
                    .sum();
                let sm: C64 = mu.iter().map(|&u| hb / (u - zi)).sum();
                self.omega + sz + sm
            })
            .collect())
    }

    fn canonicalize(&self, mu: &[C64]) -> Vec<C64> {
        sort_roots(mu.to_vec())
    }

    fn admissible(&self, mu: &[C64], tol: f64) -> bool {
        let t = tol * scale_of(&self.z);
        mu.iter().enumerate().all(|(l, a)| {
            a.is_finite()
                && self.z.iter().all(|zk| (a - zk).norm() > t)
                && mu[l + 1..].iter().all(|b| (a - b).norm() > t)
        })
    }

    fn residual_mp(&self, mu: &[MpComplex]) -> Vec<MpComplex> {
        let hb = MpComplex::from_c64(self.hbar);
        let om2 = MpComplex::from_c64(self.omega * 2.0);
        let two = Float::with_val(PREC, 2);
        let z: Vec<MpComplex> = self.z.iter().map(|x| MpComplex::from_c64(*x)).collect();
        (0..mu.len())
            .map(|a| {
                let x = &mu[a];
                let sz = mp_sum(z.iter().map(|zk| (x - zk).recip()));
                let sm = mp_sum((0..mu.len()).filter(|&b| b != a).map(|b| (x - &mu[b]).recip()));
                let t = &om2 + &(&hb * &sz);
                &t - &(&hb * &sm).scale(&two)
            })
            .collect()
    }

    fn eigenvalues_mp(&self, mu: &[MpComplex]) -> Vec<MpComplex> {
        let hb = MpComplex::from_c64(self.hbar);
        let om = MpComplex::from_c64(self.omega);
        let z: Vec<MpComplex> = self.z.iter().map(|x| MpComplex::from_c64(*x)).collect();
        (0..z.len())
            .map(|i| {
                let zi = &z[i];
                let sz = mp_sum((0..z.len()).filter(|&k| k != i).map(|k| (zi - &z[k]).recip()));
                let sm = mp_sum(mu.iter().map(|u| (u - zi).recip()));
                &om + &(&hb * &(&sz + &sm))
            })
            .collect()
    }
}

/// Residual vector of the boundary Bethe equations for `spec`.
pub fn bethe_residual(spec: &GaudinSpec, mu: &[C64]) -> Result<Vec<C64>> {
    BoundarySystem::new(spec.clone())?.residual(mu)
}

/// Gaudin eigenvalues `H_1..H_N` for `spec` and roots `mu`.
pub fn gaudin_eigenvalues(spec: &GaudinSpec, mu: &[C64]) -> Result<Vec<C64>> {
    BoundarySystem::new(spec.clone())?.eigenvalues(mu)
}

/// Polynomial helpers on ascending coefficient vectors.
fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &mut Vec<C64>, b: &[C64], scale: C64) {
    if a.len() < b.len() {
        a.resize(b.len(), ZERO);
    }
    for (i, y) in b.iter().enumerate() {
        a[i] += y * scale;
    }
}

/// All admissible single roots of the decoupled gl(1|1) equation.
///
/// Clearing denominators leaves a polynomial in `w = μ²`; its roots come from
/// a companion matrix and are mapped to the canonical branch of `√w`.
pub fn gl11_roots_exact(spec: &GaudinSpec) -> Result<Vec<C64>> {
    if spec.tag != SuperalgebraTag::GL11 {
        return Err(Error::Unsupported("exact roots exist only for gl(1|1)".into()));
    }
    spec.validate()?;
    let w: Vec<C64> = spec.z.iter().map(|z| z * z).collect();
    let n = w.len();
    // Σ_k Π_{j≠k} (w - z_j²)
    let mut sum_k = vec![ZERO];
    for k in 0..n {
        let mut prod = vec![ONE];
        for (j, wj) in w.iter().enumerate() {
            if j != k {
                prod = poly_mul(&prod, &[-wj, ONE]);
            }
        }
        poly_add(&mut sum_k, &prod, ONE);
    }
    let poly = match spec.geometry {
        Geometry::TwoN => {
            // ξ Π_j (w - z_j²) + w Σ_k Π_{j≠k} (w - z_j²)
            let mut full = vec![ONE];
            for wj in &w {
                full = poly_mul(&full, &[-wj, ONE]);
            }
            let mut p: Vec<C64> = full.iter().map(|c| c * spec.xi).collect();
            let shifted = poly_mul(&sum_k, &[ZERO, ONE]);
            poly_add(&mut p, &shifted, ONE);
            p
        }
        Geometry::TwoNPlusOne => sum_k,
    };
    let cmax = poly.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    let lead = *poly.last().expect("nonempty");
    if lead.norm() <= 1e-12 * cmax.max(1.0) {
        return Err(Error::Degenerate(format!(
            "leading coefficient of the gl(1|1) root polynomial vanishes (xi = {})",
            spec.xi
        )));
    }
    let sys = BoundarySystem::new(GaudinSpec {
        excitations: 1,
        ..spec.clone()
    })?;
    let mut out: Vec<C64> = Vec::new();
    for wr in companion_roots(&poly)? {
        let mu = mirror_representative(wr.sqrt());
        if sys.admissible(&[mu], ADMISSIBLE_TOL) && !out.iter().any(|x| (x - mu).norm() < DEDUP_TOL) {
            out.push(mu);
        }
    }
    Ok(sort_roots(out))
}

/// Produces starting points for the Newton solver.
pub trait SeedStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn seeds(&self, system: &dyn BetheSystem, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>>;
}

fn jitter(rng: &mut ChaCha8Rng, scale: f64) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (0.05 * scale)
}

/// Perturbed midpoints `(z_i + z_j)/2` and half-points `±z_i/2`.
pub struct Midpoints;

impl SeedStrategy for Midpoints {
    fn name(&self) -> &'static str {
        "midpoints"
    }

    fn seeds(&self, system: &dyn BetheSystem, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
        let z = system.points();
        let m = system.excitations();
        let scale = scale_of(z);
        let mut pool: Vec<C64> = Vec::new();
        for (i, a) in z.iter().enumerate() {
            pool.push(a * 0.5);
            pool.push(-a * 0.5);
            pool.push(a * 1.5);
            for b in &z[i + 1..] {
                pool.push((a + b) * 0.5);
                pool.push((a - b) * 0.5);
            }
        }
        (0..count)
            .map(|_| {
                let mut idx: Vec<usize> = (0..pool.len()).collect();
                (0..m)
                    .map(|_| {
                        let pick = if idx.is_empty() {
                            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
                        } else {
                            pool[idx.swap_remove(rng.gen_range(0..idx.len()))]
                        };
                        pick + jitter(rng, scale)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Uniform points in the disc of radius `2 max |z_i|`.
pub struct RandomDisc;

impl SeedStrategy for RandomDisc {
    fn name(&self) -> &'static str {
        "random-disc"
    }

    fn seeds(&self, system: &dyn BetheSystem, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
        let radius = 2.0 * scale_of(system.points());
        (0..count)
            .map(|_| {
                (0..system.excitations())
                    .map(|_| {
                        let r = radius * rng.gen::<f64>().sqrt();
                        C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Subsets of the exact decoupled roots (gl(1|1) only), slightly perturbed.
pub struct Companion;

impl SeedStrategy for Companion {
    fn name(&self) -> &'static str {
        "companion"
    }

    fn seeds(&self, system: &dyn BetheSystem, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
        let Some(cands) = system.exact_candidates() else {
            return Vec::new();
        };
        let m = system.excitations();
        let scale = scale_of(system.points());
        subsets(cands.len(), m)
            .into_iter()
            .take(count)
            .map(|s| s.into_iter().map(|i| cands[i] + jitter(rng, 1e-3 * scale)).collect())
            .collect()
    }
}

/// All three strategies in turn: exact candidates first, then a third of the
/// budget on midpoints and the rest on the disc.
pub struct Mixed;

impl SeedStrategy for Mixed {
    fn name(&self) -> &'static str {
        "mixed"
    }

    fn seeds(&self, system: &dyn BetheSystem, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
        let mut out = Companion.seeds(system, count, rng);
        let mid = count / 3;
        out.extend(Midpoints.seeds(system, mid, rng));
        out.extend(RandomDisc.seeds(system, count - mid, rng));
        out
    }
}

/// Names accepted by [`seed_strategy`].
pub const SEED_STRATEGIES: [&str; 4] = ["mixed", "midpoints", "random-disc", "companion"];

pub fn seed_strategy(name: &str) -> Option<Box<dyn SeedStrategy>> {
    match name {
        "mixed" => Some(Box::new(Mixed)),
        "midpoints" => Some(Box::new(Midpoints)),
        "random-disc" => Some(Box::new(RandomDisc)),
        "companion" => Some(Box::new(Companion)),
        _ => None,
    }
}

/// `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Newton solver settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveOptions {
    pub seeds: usize,
    pub rng_seed: u64,
    pub max_iter: usize,
    pub max_halvings: usize,
    /// Stop once the residual max-norm drops below this.
    pub converge_tol: f64,
    /// Accept a root set only below this residual.
    pub gate: f64,
    /// Require convergence of extended-precision Newton.
    pub refine: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            seeds: 64,
            rng_seed: 0,
            max_iter: 200,
            max_halvings: 20,
            converge_tol: 1e-12,
            gate: 1e-10,
            refine: true,
        }
    }
}

fn max_norm(v: &[C64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.norm()))
}

/// `max |μ_l F_l|`. Each equation decays like `1/μ`, so a sequence running
/// off to infinity drives `|F|` to zero but not this.
fn scaled_norm(mu: &[C64], f: &[C64]) -> f64 {
    mu.iter().zip(f).fold(0.0_f64, |m, (u, x)| m.max((u * x).norm()))
}

/// Both the plain and the root-scaled residual lie under `gate`.
fn passes_gate(mu: &[C64], f: &[C64], gate: f64) -> bool {
    max_norm(f) < gate && scaled_norm(mu, f) < gate
}

/// `log10` residual an extended-precision polish must reach for a root set
/// to count as a solution rather than a slow drift toward infinity.
pub const REFINED_LOG10: f64 = -100.0;

/// Whether extended-precision Newton converges from `mu`.
pub fn refines(system: &dyn BetheSystem, mu: &[C64]) -> bool {
    polish_roots(system, mu).is_ok_and(|p| p.log10_residual < REFINED_LOG10)
}

/// Damped Newton from one seed. `None` if it hits a pole, a singular
/// Jacobian, or escapes to infinity.
pub fn newton(system: &dyn BetheSystem, seed: &[C64], opts: &SolveOptions) -> Option<BetheRoots> {
    let bound = 1e4 * scale_of(system.points()).max(1.0);
    let mut mu = seed.to_vec();
    let mut f = system.residual(&mu).ok()?;
    let mut fn_ = max_norm(&f);
    for _ in 0..opts.max_iter {
        if fn_ < opts.converge_tol {
            break;
        }
        let j = system.jacobian(&mu).ok()?;
        let rhs = nalgebra::DVector::from_iterator(f.len(), f.iter().map(|x| -x));
        let step = j.lu().solve(&rhs)?;
        if step.iter().any(|x| !x.is_finite()) {
            return None;
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<C64> = mu.iter().zip(step.iter()).map(|(a, d)| a + d * t).collect();
            if let Ok(ft) = system.residual(&trial) {
                let n = max_norm(&ft);
                if n.is_finite() && n < fn_ {
                    mu = trial;
                    f = ft;
                    fn_ = n;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted || mu.iter().any(|x| x.norm() > bound) {
            break;
        }
    }
    if mu.iter().any(|x| x.norm() > bound) {
        return None;
    }
    Some(BetheRoots {
        admissible: system.admissible(&mu, ADMISSIBLE_TOL),
        mu,
        residual: fn_,
    })
}

/// Multi-start solve. Returns canonical, deduplicated, admissible root sets
/// with both `max |F|` and `max |μ F|` under `opts.gate`, sorted lexicographically.
pub fn solve_bethe(system: &dyn BetheSystem, strategy: &dyn SeedStrategy, opts: &SolveOptions) -> Vec<BetheRoots> {
    if system.excitations() == 0 {
        return vec![BetheRoots {
            mu: Vec::new(),
            residual: 0.0,
            admissible: true,
        }];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let mut found: Vec<BetheRoots> = Vec::new();
    for seed in strategy.seeds(system, opts.seeds, &mut rng) {
        let Some(sol) = newton(system, &seed, opts) else {
            continue;
        };
        if !sol.admissible || sol.residual >= opts.gate {
            continue;
        }
        let mu = system.canonicalize(&sol.mu);
        let Ok(res) = system.residual(&mu) else {
            continue;
        };
        let residual = max_norm(&res);
        if !passes_gate(&mu, &res, opts.gate) {
            continue;
        }
        if found
            .iter()
            .any(|r| multiset_distance(&r.mu, &mu).is_some_and(|d| d < DEDUP_TOL))
        {
            continue;
        }
        if opts.refine && !refines(system, &mu) {
            continue;
        }
        found.push(BetheRoots {
            mu,
            residual,
            admissible: true,
        });
    }
    found.sort_by(|a, b| {
        for (x, y) in a.mu.iter().zip(&b.mu) {
            let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
            if o.is_ne() {
                return o;
            }
        }
        std::cmp::Ordering::Equal
    });
    found
}

/// Re-check a stored root set against the equations.
pub fn validate_roots(system: &dyn BetheSystem, mu: &[C64], gate: f64) -> Option<BetheRoots> {
    if mu.len() != system.excitations() {
        return None;
    }
    let res = system.residual(mu).ok()?;
    let residual = max_norm(&res);
    let admissible = system.admissible(mu, ADMISSIBLE_TOL);
    (passes_gate(mu, &res, gate) && admissible && refines(system, mu)).then(|| BetheRoots {
        mu: mu.to_vec(),
        residual,
        admissible,
    })
}

/// Largest `|F|` over the equations; `∞` at a pole.
pub fn residual_norm(system: &dyn BetheSystem, mu: &[C64]) -> f64 {
    system.residual(mu).map(|f| max_norm(&f)).unwrap_or(f64::INFINITY)
}

#[doc(hidden)]
pub fn jacobian_fd(system: &dyn BetheSystem, mu: &[C64], h: f64) -> Result<CMat> {
    let m = mu.len();
    let mut j = CMat::zeros(m, m);
    for k in 0..m {
        let mut p = mu.to_vec();
        let mut q = mu.to_vec();
        p[k] += h;
        q[k] -= h;
        let fp = system.residual(&p)?;
        let fq = system.residual(&q)?;
        for l in 0..m {
            j[(l, k)] = (fp[l] - fq[l]) / (2.0 * h);
        }
    }
    Ok(j)
}
