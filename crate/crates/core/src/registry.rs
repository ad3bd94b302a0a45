//! Named randomized checks selectable at runtime.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calogero::{
    factorized_lax, factorized_lax_a, free_velocities, frobenius, lax_matrix, vandermonde, Couplings, PhaseState,
    RootKind, RootSystem, SQRT2,
};
use crate::chain::{check_reflection, check_ybe, BoundaryParams};
use crate::duality::{
    b_chain, check_a_identity, check_determinant_identity, check_frobenius_reduction, check_g4_evenness, gl02_chain,
    gl11_chain,
};
use crate::error::Result;
use crate::graded::{graded_permutation, graded_tensor, super_transpose, GradedOperator, Grading};
use crate::linalg::{self, c, identity, max_abs, max_abs_diff, CMat, C64, ZERO};
use crate::model::{random_in_disc, random_points, GaudinSpec, SuperalgebraTag};

/// A randomized numerical check with a fixed acceptance gate.
pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn gate(&self) -> f64;
    /// Worst residual over `draws` random instances.
    fn run(&self, draws: usize, rng: &mut ChaCha8Rng) -> Result<f64>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub residual: f64,
    pub gate: f64,
    pub draws: usize,
    pub passed: bool,
    pub error: Option<String>,
}

pub fn run_check(check: &dyn Check, draws: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (residual, error) = match check.run(draws, &mut rng) {
        Ok(r) => (r, None),
        Err(e) => (f64::INFINITY, Some(e.to_string())),
    };
    CheckOutcome {
        name: check.name().to_string(),
        residual,
        gate: check.gate(),
        draws,
        passed: error.is_none() && residual < check.gate(),
        error,
    }
}

const GRADINGS: [(usize, usize); 3] = [(2, 0), (1, 1), (0, 2)];

fn gradings() -> impl Iterator<Item = Grading> {
    GRADINGS.iter().map(|&(m, n)| Grading::new(m, n).expect("valid grading"))
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    CMat::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn worst(acc: f64, x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        acc.max(x)
    }
}

pub struct YangBaxter;

impl Check for YangBaxter {
    fn name(&self) -> &'static str {
        "ybe"
    }
    fn gate(&self) -> f64 {
        1e-12
    }
    fn run(&self, draws: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
        let mut w = 0.0;
        for g in gradings() {
            for _ in 0..draws {
                let u = random_points(rng, 3, 2.0);
                let eta = random_in_disc(rng, 0.5);
                w = worst(w, check_ybe(u[0], u[1], u[2], eta, g)?);
            }
        }
        Ok(w)
    }
}

pub struct Reflection;

impl Check for Reflection {
    fn name(&self) -> &'static str {
        "reflection"
    }
    fn gate(&self) -> f64 {
        1e-12
    }
    fn run(&self, draws: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
        let mut w = 0.0;
        for g in gradings() {
            for _ in 0..draws {
                let u = random_points(rng, 2, 2.0);
                let p = BoundaryParams {
                    alpha: random_in_disc(rng, 1.5),
                    beta: random_in_disc(rng, 1.5),
                    eta: random_in_disc(rng, 0.5),
                };
                let (a, b) = check_reflection(u[0], u[1], &p, g)?;
                w = worst(w, a.max(b));
            }
        }
        Ok(w)
    }
}

pub struct PermutationSquare;

impl Check for PermutationSquare {
    fn name(&self) -> &'static str {
        "permutation-square"
    }
    fn gate(&self) -> f64 {
        1e-15
    }
    fn run(&self, _draws: usize, _rng: &mut ChaCha8Rng) -> Result<f64> {
        let mut w = 0.0;
        for (m, n) in [(2, 0), (1, 1), (0, 2), (2, 1), (1, 2), (3, 0)] {
            let p = graded_permutation(Grading::new(m, n)?).mat;
            let d = p.nrows();
            w = worst(w, max_abs_diff(&(&p * &p), &identity(d)));
        }
        Ok(w)
    }
}

/// `str(A ⊗ B) = str A · str B`, `str_1(A ⊗ B) = str A · B`,
/// `str(Aˢᵗ) = str A` and `str(AB) = str(BA)` for even `A, B`.
pub struct Supertrace;

impl Check for Supertrace {
    fn name(&self) -> &'static str {
        "supertrace"
    }
    fn gate(&self) -> f64 {
        1e-12
    }
    fn run(&self, draws: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
        let mut w = 0.0;
        for (m, n) in [(2, 0), (1, 1), (0, 2), (2, 1)] {
            let g = Grading::new(m, n)?;
            let d = g.dim();
            for _ in 0..draws {
                let a = GradedOperator::new(g, 1, random_matrix(rng, d))?;
                let b = GradedOperator::new(g, 1, random_matrix(rng, d))?;
                let ab = graded_tensor(&a, &b)?;
                w = worst(w, (ab.supertrace() - a.supertrace() * b.supertrace()).norm());
                let reduced = ab.partial_supertrace(1)?;
                w = worst(w, max_abs_diff(&reduced.mat, &(&b.mat * a.supertrace())));
                w = worst(w, (super_transpose(&a)?.supertrace() - a.supertrace()).norm());
                let (ae, _) = a.split_parity();
                let (be, _) = b.split_parity();
                let ae = GradedOperator::new(g, 1, ae)?;
                let be = GradedOperator::new(g, 1, be)?;
                let lhs = ae.compose(&be)?.supertrace();
                let rhs = be.compose(&ae)?.supertrace();
                w = worst(w, (lhs - rhs).norm());
            }
        }
        Ok(w)
    }
}

/// `V J V⁻¹ = diag(x)` for the Frobenius matrix of `Π(t - x_i)`.
pub struct VandermondeDiagonalization;

impl Check for VandermondeDiagonalization {
    fn name(&self) -> &'static str {
        "vandermonde-diagonalization"
    }
    fn gate(&self) -> f64 {
        1e-10
    }
    fn run(&self, draws: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
        let mut w = 0.0;
        for _ in 0..draws {
            let r = rng.gen_range(1..=8);
            let x = random_points(rng, r, 1.5);
            let (j, jinv) = frobenius(&x)?;
            let v = vandermonde(&x);
            let vjv = &v * &j * linalg::inverse(&v)?;
            let scale = x.iter().fold(1.0_f64, |m, y| m.max(y.norm()));
            w = worst(w, max_abs_diff(&vjv, &linalg::diag(&x)) / scale);
            w = worst(w, max_abs_diff(&(&j * &jinv), &identity(r)));
        }
        Ok(w)
    }
}

pub struct G4Evenness;

impl Check for G4Evenness {
    fn name(&self) -> &'static str {
        "g4-evenness"
    }
    fn gate(&self) -> f64 {
        1e-11
    }
    fn run(&self, draws: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
        let mut w = 0.0;
        for _ in 0..draws {
            let n = rng.gen_range(1..=4);
            let q = random_points(rng, n, 2.0);
            let v = (0..n).map(|_| random_in_disc(rng, 2.0)).collect();
            let state = PhaseState::new(q, v)?;
            let rep = check_g4_evenness(&state, random_in_disc(rng, 1.0), random_in_disc(rng, 1.5))?;
            w = worst(w, rep.evenness.max(rep.reduction));
        }
        Ok(w)
    }
}

/// Factorized against direct Lax matrices at the free velocities, plus the
/// char-poly defect of the shifted matrix, for sizes up to 9.
pub struct Factorization;

impl Check for Factorization {
    fn name(&self) -> &'static str {
        "factorization"
    }
    fn gate(&self) -> f64 {
        1e-10
    }
    fn run(&self, draws: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
        let mut w = 0.0;
        for _ in 0..draws {
            let hb = random_in_disc(rng, 1.0) + c(0.3, 0.0);
            // A, r ≤ 9
            let n = rng.gen_range(1..=9);
            let q = random_points(rng, n, 2.0);
            let omega = random_in_disc(rng, 1.0);
            let v = (0..n)
                .map(|i| omega + (0..n).filter(|&k| k != i).map(|k| hb / (q[i] - q[k])).sum::<C64>())
                .collect();
            let direct = lax_matrix(
                RootSystem::new(RootKind::A, n),
                &PhaseState::new(q.clone(), v)?,
                &Couplings { g1: ZERO, g2: hb, g4: ZERO },
            )?;
            let f = factorized_lax_a(&q, omega, hb)?;
            w = worst(w, rel_diff(&f.mat, &direct));
            let shifted = &direct - identity(n) * omega;
            w = worst(w, nilpotency(&shifted) * 10.0);

            // B, C, D with N ≤ 4
            let n = rng.gen_range(1..=4);
            let q = random_points(rng, n, 2.0);
            let xi = random_in_disc(rng, 1.0);
            for kind in [RootKind::B, RootKind::C, RootKind::D] {
                let rs = RootSystem::new(kind, n);
                let (x, v, cpl) = match kind {
                    RootKind::B => (
                        rs.extended_coordinates(&q),
                        free_velocities(&q, c(2.0, 0.0), hb),
                        Couplings { g1: hb * SQRT2, g2: hb, g4: ZERO },
                    ),
                    RootKind::C => (
                        rs.extended_coordinates(&q),
                        free_velocities(&q, xi, hb),
                        Couplings { g1: ZERO, g2: hb, g4: hb * SQRT2 * xi },
                    ),
                    _ => (
                        rs.extended_coordinates(&q),
                        free_velocities(&q, ZERO, hb),
                        Couplings { g1: ZERO, g2: hb, g4: ZERO },
                    ),
                };
                let fxi = if kind == RootKind::D { ZERO } else { xi };
                let direct = lax_matrix(rs, &PhaseState::new(q.clone(), v)?, &cpl)?;
                let f = factorized_lax(kind, &x, fxi, hb)?;
                w = worst(w, rel_diff(&f.mat, &direct));
                w = worst(w, nilpotency(&direct) * 10.0);
            }
        }
        Ok(w)
    }
}

fn rel_diff(a: &CMat, b: &CMat) -> f64 {
    max_abs_diff(a, b) / linalg::scale_or_one(max_abs(a).max(max_abs(b)))
}

/// Char-poly defect relative to the spectral norm.
fn nilpotency(l: &CMat) -> f64 {
    linalg::charpoly_defect(&linalg::charpoly(l), linalg::norm2(l))
}

/// A-type off-shell determinant identity.
pub struct IdentityA;

impl Check for IdentityA {
    fn name(&self) -> &'static str {
        "identity-a"
    }
    fn gate(&self) -> f64 {
        1e-9
    }
    fn run(&self, draws: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
        let mut w = 0.0;
        for _ in 0..draws {
            let n = rng.gen_range(1..=5);
            let m = rng.gen_range(0..=n);
            let pts = random_points(rng, n + m, 2.0);
            let (z, mu) = pts.split_at(n);
            let r = check_a_identity(z, mu, random_in_disc(rng, 1.5), random_in_disc(rng, 1.0) + c(0.3, 0.0))?;
            w = worst(w, r.max());
        }
        Ok(w)
    }
}

/// Boundary off-shell determinant identities for every root system and tag.
pub struct IdentityBcd;

impl Check for IdentityBcd {
    fn name(&self) -> &'static str {
        "identity-bcd"
    }
    fn gate(&self) -> f64 {
        1e-9
    }
    fn run(&self, draws: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
        let mut w = 0.0;
        for _ in 0..draws {
            let n = rng.gen_range(1..=4);
            let m = rng.gen_range(0..=n);
            let pts = random_points(rng, n + m, 2.0);
            let (z, mu) = pts.split_at(n);
            let hb = random_in_disc(rng, 1.0) + c(0.3, 0.0);
            let xi = random_in_disc(rng, 1.5);
            for tag in SuperalgebraTag::ALL {
                let (p1, p2) = tag.parities();
                let specs = [
                    (RootKind::C, GaudinSpec::two_n(tag, z.to_vec(), xi, hb, m)?),
                    (
                        RootKind::D,
                        GaudinSpec::two_n(tag, z.to_vec(), c(f64::from(p1 - p2), 0.0), hb, m)?,
                    ),
                    (RootKind::B, GaudinSpec::two_n_plus_one(tag, z.to_vec(), hb, m)?),
                ];
                for (kind, spec) in specs {
                    w = worst(w, check_determinant_identity(kind, &spec, mu)?.max());
                }
            }
        }
        Ok(w)
    }
}

pub struct FrobeniusReduction;

impl Check for FrobeniusReduction {
    fn name(&self) -> &'static str {
        "frobenius-reduction"
    }
    fn gate(&self) -> f64 {
        1e-10
    }
    fn run(&self, draws: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
        let mut w = 0.0;
        for _ in 0..draws {
            let m = rng.gen_range(1..=3);
            let mu = random_points(rng, m, 2.0);
            let rep = check_frobenius_reduction(&mu, random_in_disc(rng, 1.5), random_in_disc(rng, 1.0) + c(0.3, 0.0))?;
            w = worst(w, rep.max());
        }
        Ok(w)
    }
}

/// Step-by-step replay of the gl(1|1), gl(0|2) and `2N+1` reductions.
pub struct ProofChains;

impl Check for ProofChains {
    fn name(&self) -> &'static str {
        "proof-chains"
    }
    fn gate(&self) -> f64 {
        1e-10
    }
    fn run(&self, draws: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
        let mut w = 0.0;
        for _ in 0..draws {
            let n = rng.gen_range(1..=4);
            let m = rng.gen_range(0..=n);
            let pts = random_points(rng, n + m, 2.0);
            let (z, mu) = pts.split_at(n);
            let hb = random_in_disc(rng, 1.0) + c(0.3, 0.0);
            let xi = random_in_disc(rng, 1.5);
            let mut steps = gl11_chain(z, mu, xi, hb)?;
            steps.extend(gl02_chain(z, mu, xi, hb)?);
            for tag in SuperalgebraTag::ALL {
                steps.extend(b_chain(tag, z, mu, hb)?);
            }
            w = steps.iter().fold(w, |acc, s| worst(acc, s.residual));
        }
        Ok(w)
    }
}

/// Checks of the quantum and classical building blocks.
pub const STRUCTURAL: [&str; 6] = [
    "ybe",
    "reflection",
    "permutation-square",
    "supertrace",
    "vandermonde-diagonalization",
    "g4-evenness",
];

/// Off-shell identities and their derivations.
pub const IDENTITIES: [&str; 5] = [
    "identity-a",
    "identity-bcd",
    "frobenius-reduction",
    "proof-chains",
    "factorization",
];

pub fn check(name: &str) -> Option<Box<dyn Check>> {
    Some(match name {
        "ybe" => Box::new(YangBaxter),
        "reflection" => Box::new(Reflection),
        "permutation-square" => Box::new(PermutationSquare),
        "supertrace" => Box::new(Supertrace),
        "vandermonde-diagonalization" => Box::new(VandermondeDiagonalization),
        "g4-evenness" => Box::new(G4Evenness),
        "identity-a" => Box::new(IdentityA),
        "identity-bcd" => Box::new(IdentityBcd),
        "frobenius-reduction" => Box::new(FrobeniusReduction),
        "proof-chains" => Box::new(ProofChains),
        "factorization" => Box::new(Factorization),
        _ => return None,
    })
}

pub fn all_checks() -> Vec<Box<dyn Check>> {
    STRUCTURAL
        .iter()
        .chain(IDENTITIES.iter())
        .map(|n| check(n).expect("registered"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_round_trip() {
        for c in all_checks() {
            assert_eq!(check(c.name()).unwrap().name(), c.name());
        }
        assert!(check("nope").is_none());
    }

    #[test]
    fn every_check_passes_small_batch() {
        for c in all_checks() {
            let out = run_check(c.as_ref(), 5, 3);
            assert!(out.passed, "{out:?}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = run_check(&IdentityBcd, 3, 17);
        let b = run_check(&IdentityBcd, 3, 17);
        assert_eq!(a, b);
    }
}
