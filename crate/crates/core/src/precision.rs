//! Extended-precision certification of nilpotent and near-degenerate spectra.
//!
//! Eigenvalues of a nilpotent `r × r` matrix move by `O(δ^{1/r})` under an
//! entry perturbation `δ`, so a double-precision eigensolver cannot resolve
//! them. Here the Bethe roots are polished at 512 bits, the Lax matrix and its
//! characteristic polynomial are rebuilt at that precision, and a Rouché
//! argument turns the tiny coefficients into a rigorous radius for the roots
//! of that polynomial.

use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::Float;

use crate::bethe::{ATypeSystem, BetheSystem, BoundarySystem};
use crate::calogero::RootKind;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::model::SuperalgebraTag;

/// Working precision in bits.
pub const PREC: u32 = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct MpComplex {
    pub re: Float,
    pub im: Float,
}

impl MpComplex {
    pub fn zero() -> Self {
        Self::from_f64(0.0, 0.0)
    }

    pub fn one() -> Self {
        Self::from_f64(1.0, 0.0)
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        Self {
            re: Float::with_val(PREC, re),
            im: Float::with_val(PREC, im),
        }
    }

    pub fn from_c64(z: C64) -> Self {
        Self::from_f64(z.re, z.im)
    }

    pub fn real(x: Float) -> Self {
        Self {
            re: x,
            im: Float::with_val(PREC, 0),
        }
    }

    pub fn to_c64(&self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn scale(&self, s: &Float) -> Self {
        Self {
            re: Float::with_val(PREC, &self.re * s),
            im: Float::with_val(PREC, &self.im * s),
        }
    }

    pub fn abs(&self) -> Float {
        Float::with_val(PREC, self.re.hypot_ref(&self.im))
    }

    /// `ln |z|` as a double; `-∞` for zero.
    pub fn ln_abs(&self) -> f64 {
        let a = self.abs();
        if a.is_zero() {
            f64::NEG_INFINITY
        } else {
            a.ln().to_f64()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn recip(&self) -> Self {
        &Self::one() / self
    }
}

impl<'a> Add<&'a MpComplex> for &'a MpComplex {
    type Output = MpComplex;
    fn add(self, o: &MpComplex) -> MpComplex {
        MpComplex {
            re: Float::with_val(PREC, &self.re + &o.re),
            im: Float::with_val(PREC, &self.im + &o.im),
        }
    }
}

impl<'a> Sub<&'a MpComplex> for &'a MpComplex {
    type Output = MpComplex;
    fn sub(self, o: &MpComplex) -> MpComplex {
        MpComplex {
            re: Float::with_val(PREC, &self.re - &o.re),
            im: Float::with_val(PREC, &self.im - &o.im),
        }
    }
}

impl<'a> Mul<&'a MpComplex> for &'a MpComplex {
    type Output = MpComplex;
    fn mul(self, o: &MpComplex) -> MpComplex {
        let ac = Float::with_val(PREC, &self.re * &o.re);
        let bd = Float::with_val(PREC, &self.im * &o.im);
        let ad = Float::with_val(PREC, &self.re * &o.im);
        let bc = Float::with_val(PREC, &self.im * &o.re);
        MpComplex {
            re: ac - bd,
            im: ad + bc,
        }
    }
}

impl<'a> Div<&'a MpComplex> for &'a MpComplex {
    type Output = MpComplex;
    fn div(self, o: &MpComplex) -> MpComplex {
        let den = Float::with_val(PREC, o.re.square_ref()) + Float::with_val(PREC, o.im.square_ref());
        let ac = Float::with_val(PREC, &self.re * &o.re);
        let bd = Float::with_val(PREC, &self.im * &o.im);
        let bc = Float::with_val(PREC, &self.im * &o.re);
        let ad = Float::with_val(PREC, &self.re * &o.im);
        MpComplex {
            re: Float::with_val(PREC, (ac + bd) / &den),
            im: Float::with_val(PREC, (bc - ad) / &den),
        }
    }
}

impl Neg for &MpComplex {
    type Output = MpComplex;
    fn neg(self) -> MpComplex {
        MpComplex {
            re: Float::with_val(PREC, -&self.re),
            im: Float::with_val(PREC, -&self.im),
        }
    }
}

fn sqrt2() -> Float {
    Float::with_val(PREC, 2).sqrt()
}

pub(crate) fn mp_sum(items: impl IntoIterator<Item = MpComplex>) -> MpComplex {
    items.into_iter().fold(MpComplex::zero(), |acc, x| &acc + &x)
}

/// `1/(a-b) + 1/(a+b)`.
pub(crate) fn mp_g(a: &MpComplex, b: &MpComplex) -> MpComplex {
    &(a - b).recip() + &(a + b).recip()
}

fn max_ln_abs(v: &[MpComplex]) -> f64 {
    v.iter().map(MpComplex::ln_abs).fold(f64::NEG_INFINITY, f64::max)
}







/// Roots refined at [`PREC`] bits.
#[derive(Debug, Clone)]
pub struct PolishedRoots {
    pub mu: Vec<MpComplex>,
    /// `log10` of the final residual max-norm.
    pub log10_residual: f64,
}

/// Newton refinement with the double-precision Jacobian: each step gains
/// roughly as many digits as that Jacobian is accurate.
pub fn polish_roots(system: &dyn BetheSystem, mu: &[C64]) -> Result<PolishedRoots> {
    let mut x: Vec<MpComplex> = mu.iter().map(|m| MpComplex::from_c64(*m)).collect();
    let target = -(f64::from(PREC) - 40.0) * std::f64::consts::LN_2;
    let mut last = f64::INFINITY;
    for _ in 0..60 {
        let f = system.residual_mp(&x);
        let lf = max_ln_abs(&f);
        if lf < target || f.is_empty() {
            last = lf;
            break;
        }
        if lf >= last - 0.5 {
            // no further progress
            last = last.min(lf);
            break;
        }
        last = lf;
        let xf: Vec<C64> = x.iter().map(MpComplex::to_c64).collect();
        let j = system.jacobian(&xf)?;
        let rhs = nalgebra::DVector::from_iterator(f.len(), f.iter().map(|v| -v.to_c64()));
        let step = j
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Singular("Jacobian at the Bethe roots".into()))?;
        for (xi, d) in x.iter_mut().zip(step.iter()) {
            *xi = &*xi + &MpComplex::from_c64(*d);
        }
    }
    Ok(PolishedRoots {
        mu: x,
        log10_residual: last / std::f64::consts::LN_10,
    })
}

pub type MpMatrix = Vec<Vec<MpComplex>>;

fn mp_zeros(r: usize) -> MpMatrix {
    vec![vec![MpComplex::zero(); r]; r]
}

fn mp_matmul(a: &MpMatrix, b: &MpMatrix) -> MpMatrix {
    let r = a.len();
    let mut out = mp_zeros(r);
    for i in 0..r {
        for k in 0..r {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..r {
                let p = &a[i][k] * &b[k][j];
                out[i][j] = &out[i][j] + &p;
            }
        }
    }
    out
}

/// Couplings `(g1, g2, g4)` at extended precision.
#[derive(Debug, Clone)]
pub struct MpCouplings {
    pub g1: MpComplex,
    pub g2: MpComplex,
    pub g4: MpComplex,
}

impl MpCouplings {
    /// Preset couplings for a boundary root system; the parity shift of `ξ`
    /// is applied at full precision.
    pub fn preset(kind: RootKind, tag: SuperalgebraTag, xi: C64, hbar: C64) -> Self {
        let hb = MpComplex::from_c64(hbar);
        let s2h = hb.scale(&sqrt2());
        let (p1, p2) = tag.parities();
        match kind {
            RootKind::B => Self {
                g1: s2h,
                g2: hb,
                g4: MpComplex::zero(),
            },
            RootKind::A => Self {
                g1: MpComplex::zero(),
                g2: hb,
                g4: MpComplex::zero(),
            },
            RootKind::C | RootKind::D => {
                let shift = &MpComplex::from_c64(xi) - &MpComplex::from_f64(f64::from(p1 - p2), 0.0);
                Self {
                    g1: MpComplex::zero(),
                    g2: hb,
                    g4: &s2h * &shift,
                }
            }
        }
    }
}

/// Lax matrix in the same layout as [`crate::calogero::lax_matrix`].
pub fn lax_matrix_mp(kind: RootKind, q: &[MpComplex], qdot: &[MpComplex], c: &MpCouplings) -> MpMatrix {
    let n = q.len();
    if kind == RootKind::A {
        let mut l = mp_zeros(n);
        for i in 0..n {
            for j in 0..n {
                l[i][j] = if i == j { qdot[i].clone() } else { &c.g2 / &(&q[i] - &q[j]) };
            }
        }
        return l;
    }
    let r = if kind == RootKind::B { 2 * n + 1 } else { 2 * n };
    let mut l = mp_zeros(r);
    let half_sqrt2 = Float::with_val(PREC, sqrt2() / 2);
    for a in 0..n {
        for b in 0..n {
            let pa = if a == b { qdot[a].clone() } else { &c.g2 / &(&q[a] - &q[b]) };
            let bb = if a == b {
                (&c.g4 / &q[a]).scale(&half_sqrt2)
            } else {
                &c.g2 / &(&q[a] + &q[b])
            };
            l[n + a][n + b] = -&pa;
            l[a][b] = pa;
            l[n + a][b] = -&bb;
            l[a][n + b] = bb;
        }
    }
    if kind == RootKind::B {
        for a in 0..n {
            let ca = &c.g1 / &q[a];
            l[a][2 * n] = ca.clone();
            l[n + a][2 * n] = -&ca;
            l[2 * n][a] = -&ca;
            l[2 * n][n + a] = ca;
        }
    }
    l
}

/// Monic `det(λI - A) = Σ c_k λ^{r-k}` by Faddeev–LeVerrier.
pub fn charpoly_mp(a: &MpMatrix) -> Vec<MpComplex> {
    let r = a.len();
    let mut coeffs = vec![MpComplex::one()];
    let mut m = mp_zeros(r);
    for k in 1..=r {
        m = mp_matmul(a, &m);
        for i in 0..r {
            m[i][i] = &m[i][i] + &coeffs[k - 1];
        }
        let am = mp_matmul(a, &m);
        let tr = mp_sum((0..r).map(|i| am[i][i].clone()));
        let kf = Float::with_val(PREC, -(k as f64));
        coeffs.push(MpComplex {
            re: Float::with_val(PREC, &tr.re / &kf),
            im: Float::with_val(PREC, &tr.im / &kf),
        });
    }
    coeffs
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Smallest `ρ` with `Σ_{k≥1} |c_k| ρ^{r-k} < ρ^r`: every root of the monic
/// polynomial lies in `|λ| < ρ`. Inputs are `ln |c_k|` for `k = 1..r`.
pub fn rouche_radius_origin(ln_abs: &[f64]) -> f64 {
    let f = |lr: f64| {
        let t: Vec<f64> = ln_abs.iter().enumerate().map(|(i, l)| l - (i + 1) as f64 * lr).collect();
        log_sum_exp(&t)
    };
    if ln_abs.iter().all(|l| *l == f64::NEG_INFINITY) {
        return 0.0;
    }
    let (mut lo, mut hi) = (-2000.0_f64, 2000.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi.exp()
}

/// Certificate for a spectrum that should collapse to zero.
#[derive(Debug, Clone)]
pub struct NilpotencyCertificate {
    /// All eigenvalues of the extended-precision matrix lie in `|λ| < bound`.
    pub bound: f64,
    pub log10_bethe_residual: f64,
    /// `ln |c_k|`, `k = 1..r`.
    pub ln_coeffs: Vec<f64>,
}

/// Certify the BCD collapse for one root set: polish, rebuild, bound.
pub fn certify_nilpotent(
    system: &BoundarySystem,
    kind: RootKind,
    mu: &[C64],
    couplings: &MpCouplings,
) -> Result<NilpotencyCertificate> {
    let polished = polish_roots(system, mu)?;
    let q: Vec<MpComplex> = system.spec.z.iter().map(|x| MpComplex::from_c64(*x)).collect();
    let v = system.eigenvalues_mp(&polished.mu);
    let l = lax_matrix_mp(kind, &q, &v, couplings);
    let cp = charpoly_mp(&l);
    let ln_coeffs: Vec<f64> = cp[1..].iter().map(MpComplex::ln_abs).collect();
    Ok(NilpotencyCertificate {
        bound: rouche_radius_origin(&ln_coeffs),
        log10_bethe_residual: polished.log10_residual,
        ln_coeffs,
    })
}

/// Certificate that the A-type spectrum is `{ω × (N-M), -ω × M}`.
#[derive(Debug, Clone)]
pub struct TwoPointCertificate {
    /// Exactly `N-M` eigenvalues lie within `radius` of `ω` and `M` within
    /// `radius` of `-ω`; `∞` if no radius below `|ω|/2` works.
    pub radius: f64,
    pub log10_bethe_residual: f64,
}

fn binomial_expand(omega: &MpComplex, n_plus: usize, n_minus: usize) -> Vec<MpComplex> {
    // descending coefficients of (λ-ω)^{n_plus} (λ+ω)^{n_minus}
    let mut p = vec![MpComplex::one()];
    let mut mul_linear = |root: &MpComplex| {
        let mut out = vec![MpComplex::zero(); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            out[i] = &out[i] + c;
            let t = c * root;
            out[i + 1] = &out[i + 1] - &t;
        }
        p = out;
    };
    for _ in 0..n_plus {
        mul_linear(omega);
    }
    let neg = -omega;
    for _ in 0..n_minus {
        mul_linear(&neg);
    }
    p
}

pub fn certify_two_point(system: &ATypeSystem, mu: &[C64]) -> Result<TwoPointCertificate> {
    let n = system.z.len();
    let m = mu.len();
    let polished = polish_roots(system, mu)?;
    let q: Vec<MpComplex> = system.z.iter().map(|x| MpComplex::from_c64(*x)).collect();
    let v = system.eigenvalues_mp(&polished.mu);
    let c = MpCouplings::preset(RootKind::A, SuperalgebraTag::GL20, C64::new(0.0, 0.0), system.hbar);
    let cp = charpoly_mp(&lax_matrix_mp(RootKind::A, &q, &v, &c));
    let om = MpComplex::from_c64(system.omega);
    let target = binomial_expand(&om, n - m, m);
    let ln_delta: Vec<f64> = cp.iter().zip(&target).map(|(a, b)| (a - b).ln_abs()).collect();
    let w = system.omega.norm();
    if w == 0.0 {
        return Err(Error::Degenerate("ω = 0 merges the two eigenvalue clusters".into()));
    }
    // |δ(λ)| ≤ Σ |δ_k| (|ω|+ρ)^{r-k}; |q(λ)| ≥ ρ^{a} (2|ω|-ρ)^{b} on |λ ∓ ω| = ρ
    let works = |rho: f64| {
        let lb = (w + rho).ln();
        let d = log_sum_exp(
            &ln_delta
                .iter()
                .enumerate()
                .map(|(k, l)| l + (n - k) as f64 * lb)
                .collect::<Vec<_>>(),
        );
        let far = (2.0 * w - rho).ln();
        let plus = (n - m) as f64 * rho.ln() + m as f64 * far;
        let minus = m as f64 * rho.ln() + (n - m) as f64 * far;
        d < plus && (m == 0 || d < minus)
    };
    let mut radius = f64::INFINITY;
    let mut lr = (1e-300_f64).ln();
    let stop = (0.5 * w).ln();
    while lr < stop {
        if works(lr.exp()) {
            radius = lr.exp();
            break;
        }
        lr += 0.05;
    }
    Ok(TwoPointCertificate {
        radius,
        log10_bethe_residual: polished.log10_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe::{solve_bethe, Mixed, SolveOptions};
    use crate::linalg::{c, r};
    use crate::model::GaudinSpec;

    #[test]
    fn arithmetic_round_trip() {
        let a = MpComplex::from_f64(1.5, -2.0);
        let b = MpComplex::from_f64(0.25, 3.0);
        let q = &(&a * &b) / &b;
        assert!((q.to_c64() - a.to_c64()).norm() < 1e-300);
        assert_eq!((&a - &a).ln_abs(), f64::NEG_INFINITY);
        let s = sqrt2();
        let two = Float::with_val(PREC, &s * &s);
        assert!((two - 2.0_f64).abs() < 1e-150);
    }

    #[test]
    fn rouche_radius_of_monomial_shift() {
        // λ² - ε: roots ±√ε
        let eps = 1e-40_f64;
        let rho = rouche_radius_origin(&[f64::NEG_INFINITY, eps.ln()]);
        assert!((rho / eps.sqrt() - 1.0).abs() < 1e-6);
        assert_eq!(rouche_radius_origin(&[f64::NEG_INFINITY; 3]), 0.0);
    }

    #[test]
    fn polished_closed_form_root() {
        let spec = GaudinSpec::two_n(SuperalgebraTag::GL11, vec![r(1.0)], r(1.0), r(1.0), 1).unwrap();
        let sys = BoundarySystem::new(spec).unwrap();
        let p = polish_roots(&sys, &[r(0.7071)]).unwrap();
        assert!(p.log10_residual < -140.0);
        let exact = Float::with_val(PREC, 0.5).sqrt();
        let err = Float::with_val(PREC, &p.mu[0].re - &exact).abs().to_f64();
        assert!(err < 1e-140);
    }

    #[test]
    fn certified_collapse_for_solved_sector() {
        let z = vec![c(1.0, 0.2), r(1.7), c(-0.6, 1.1)];
        let hb = c(0.8, 0.1);
        let xi = c(0.37, -0.2);
        let spec = GaudinSpec::two_n(SuperalgebraTag::GL20, z, xi, hb, 2).unwrap();
        let sys = BoundarySystem::new(spec).unwrap();
        let roots = solve_bethe(&sys, &Mixed, &SolveOptions::default());
        assert!(!roots.is_empty());
        let cpl = MpCouplings::preset(RootKind::C, SuperalgebraTag::GL20, xi, hb);
        for rt in roots {
            let cert = certify_nilpotent(&sys, RootKind::C, &rt.mu, &cpl).unwrap();
            assert!(cert.bound < 1e-15, "{}", cert.bound);
        }
    }

    #[test]
    fn certified_a_type_spectrum() {
        let sys = ATypeSystem::new(vec![r(1.0), c(-0.3, 0.8), r(2.1), c(0.4, -1.2)], c(0.6, 0.2), r(0.9), 2).unwrap();
        let roots = solve_bethe(&sys, &Mixed, &SolveOptions::default());
        assert!(!roots.is_empty());
        for rt in roots {
            let cert = certify_two_point(&sys, &rt.mu).unwrap();
            assert!(cert.radius < 1e-20, "{}", cert.radius);
        }
    }
}
