//! Classical Calogero–Moser side: Lax matrices for A, B, C, D root systems and
//! the Vandermonde / companion-matrix factorization toolkit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, inverse_with_cond, CMat, C64, COND_WARN, ONE, ZERO};

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RootKind {
    A,
    B,
    C,
    D,
}

impl fmt::Display for RootKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A => "A",
            Self::B => "B",
            Self::C => "C",
            Self::D => "D",
        })
    }
}

impl FromStr for RootKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Self::A),
            "B" => Ok(Self::B),
            "C" => Ok(Self::C),
            "D" => Ok(Self::D),
            _ => Err(Error::InvalidSpec(format!("unknown root system `{s}`"))),
        }
    }
}

/// Root system with `n` particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootSystem {
    pub kind: RootKind,
    pub n: usize,
}

impl RootSystem {
    pub fn new(kind: RootKind, n: usize) -> Self {
        Self { kind, n }
    }

    /// Lax matrix size.
    pub fn size(&self) -> usize {
        match self.kind {
            RootKind::A => self.n,
            RootKind::C | RootKind::D => 2 * self.n,
            RootKind::B => 2 * self.n + 1,
        }
    }

    /// `(q, -q)` for C/D, `(q, -q, 0)` for B, `q` for A.
    pub fn extended_coordinates(&self, q: &[C64]) -> Vec<C64> {
        match self.kind {
            RootKind::A => q.to_vec(),
            RootKind::C | RootKind::D => q.iter().copied().chain(q.iter().map(|x| -x)).collect(),
            RootKind::B => q
                .iter()
                .copied()
                .chain(q.iter().map(|x| -x))
                .chain(std::iter::once(ZERO))
                .collect(),
        }
    }

    /// `tr L^k / (2k)` for BCD, `tr L^k / k` for A.
    fn power_trace_norm(&self, k: usize) -> f64 {
        match self.kind {
            RootKind::A => k as f64,
            _ => 2.0 * k as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub g1: C64,
    pub g2: C64,
    pub g4: C64,
}

/// Positions and velocities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub q: Vec<C64>,
    pub qdot: Vec<C64>,
}

impl PhaseState {
    pub fn new(q: Vec<C64>, qdot: Vec<C64>) -> Result<Self> {
        if q.len() != qdot.len() {
            return Err(Error::Dimension(format!(
                "{} positions but {} velocities",
                q.len(),
                qdot.len()
            )));
        }
        Ok(Self { q, qdot })
    }
}

/// `|g1 (g1² - 2 g2² + √2 g2 g4)|` and whether it vanishes.
pub fn check_constraint(c: &Couplings) -> (bool, f64) {
    let defect = (c.g1 * (c.g1 * c.g1 - c.g2 * c.g2 * 2.0 + c.g2 * c.g4 * SQRT2)).norm();
    let scale = [c.g1, c.g2, c.g4].iter().fold(1.0_f64, |m, g| m.max(g.norm()));
    (defect < 1e-12 * scale.powi(3), defect)
}

fn check_positions(q: &[C64], mirror: bool) -> Result<()> {
    let scale = q.iter().fold(1.0_f64, |m, x| m.max(x.norm()));
    let tol = 1e-14 * scale;
    for (a, x) in q.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::InvalidSpec(format!("q_{} is not finite", a + 1)));
        }
        if mirror && x.norm() <= tol {
            return Err(Error::Pole(format!("q_{} = 0", a + 1)));
        }
        for (b, y) in q.iter().enumerate().skip(a + 1) {
            if (x - y).norm() <= tol || (mirror && (x + y).norm() <= tol) {
                return Err(Error::Pole(format!("q_{} collides with q_{}", a + 1, b + 1)));
            }
        }
    }
    Ok(())
}

/// Lax matrix of the given root system.
///
/// BCD layout: `[[P+A, B, C], [-B, -P-A, -C], [-Cᵀ, Cᵀ, 0]]`, the last row and
/// column present only for B. The A-type matrix uses `g2` as its coupling.
pub fn lax_matrix(rs: RootSystem, state: &PhaseState, c: &Couplings) -> Result<CMat> {
    let n = state.q.len();
    if n != rs.n || state.qdot.len() != n {
        return Err(Error::Dimension(format!("root system expects {} particles, got {n}", rs.n)));
    }
    let q = &state.q;
    match rs.kind {
        RootKind::A => {
            check_positions(q, false)?;
            return Ok(CMat::from_fn(n, n, |i, j| {
                if i == j {
                    state.qdot[i]
                } else {
                    c.g2 / (q[i] - q[j])
                }
            }));
        }
        RootKind::C | RootKind::D if c.g1 != ZERO => {
            return Err(Error::InvalidSpec(format!("{} Lax matrix needs g1 = 0", rs.kind)));
        }
        _ => {}
    }
    check_positions(q, true)?;
    let (ok, defect) = check_constraint(c);
    if !ok {
        return Err(Error::Constraint(defect));
    }
    let r = rs.size();
    let mut l = CMat::zeros(r, r);
    for a in 0..n {
        for b in 0..n {
            let pa = if a == b { state.qdot[a] } else { c.g2 / (q[a] - q[b]) };
            let bb = if a == b {
                c.g4 * SQRT2 / (q[a] * 2.0)
            } else {
                c.g2 / (q[a] + q[b])
            };
            l[(a, b)] = pa;
            l[(n + a, n + b)] = -pa;
            l[(a, n + b)] = bb;
            l[(n + a, b)] = -bb;
        }
    }
    if rs.kind == RootKind::B {
        for a in 0..n {
            let ca = c.g1 / q[a];
            l[(a, 2 * n)] = ca;
            l[(n + a, 2 * n)] = -ca;
            l[(2 * n, a)] = -ca;
            l[(2 * n, n + a)] = ca;
        }
    }
    Ok(l)
}

/// `H_1..H_kmax` as normalized power traces.
pub fn hamiltonians(l: &CMat, kmax: usize, rs: RootSystem) -> Vec<C64> {
    let mut out = Vec::with_capacity(kmax);
    let mut pow = CMat::identity(l.nrows(), l.ncols());
    for k in 1..=kmax {
        pow = &pow * l;
        out.push(linalg::trace(&pow) / rs.power_trace_norm(k));
    }
    out
}

/// `V_ij = x_i^{j-1}`.
pub fn vandermonde(x: &[C64]) -> CMat {
    let r = x.len();
    CMat::from_fn(r, r, |i, j| x[i].powu(j as u32))
}

/// `D⁰_ii = Π_{k≠i} (x_i - x_k)`, with the last entry scaled by `√2` for B.
pub fn d0_matrix(x: &[C64], kind: RootKind) -> Result<CMat> {
    let r = x.len();
    let mut d = Vec::with_capacity(r);
    for i in 0..r {
        let p: C64 = (0..r).filter(|&k| k != i).map(|k| x[i] - x[k]).product();
        if p == ZERO {
            return Err(Error::Singular(format!("coincident coordinate x_{}", i + 1)));
        }
        d.push(p);
    }
    if kind == RootKind::B && r > 0 {
        d[r - 1] *= SQRT2;
    }
    Ok(linalg::diag(&d))
}

/// `(C₀, C̃)`: superdiagonals `i` and `(1 + (-1)^j)/2` (1-based row `i`,
/// column `j = i + 1`).
pub fn c0_ctilde(r: usize) -> (CMat, CMat) {
    let mut c0 = CMat::zeros(r, r);
    let mut ct = CMat::zeros(r, r);
    for i in 0..r.saturating_sub(1) {
        c0[(i, i + 1)] = C64::new((i + 1) as f64, 0.0);
        // column j = i + 2 in 1-based terms
        if (i + 2) % 2 == 0 {
            ct[(i, i + 1)] = ONE;
        }
    }
    (c0, ct)
}

/// `e_k(x)` by the one-variable-at-a-time recurrence.
pub fn elementary_symmetric(x: &[C64], k: usize) -> Result<C64> {
    if k > x.len() {
        return Err(Error::Dimension(format!("e_{k} of {} variables", x.len())));
    }
    Ok(elementary_all(x)[k])
}

/// `[e_0, ..., e_r]`.
pub fn elementary_all(x: &[C64]) -> Vec<C64> {
    let mut e = vec![ZERO; x.len() + 1];
    e[0] = ONE;
    for (j, xj) in x.iter().enumerate() {
        for k in (1..=j + 1).rev() {
            let prev = e[k - 1];
            e[k] += xj * prev;
        }
    }
    e
}

/// Companion matrix `J` of `Π (z - x_k)` (subdiagonal ones, last column
/// `-c_k`) and its inverse (first column `-c_{i+1}/c_0`, superdiagonal ones).
pub fn frobenius(x: &[C64]) -> Result<(CMat, CMat)> {
    let r = x.len();
    if r == 0 {
        return Err(Error::Dimension("empty coordinate list".into()));
    }
    let e = elementary_all(x);
    // c_k = (-1)^{r-k} e_{r-k}
    let coef = |k: usize| -> C64 {
        let s = if (r - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        e[r - k] * s
    };
    let mut j = CMat::zeros(r, r);
    for i in 0..r {
        if i + 1 < r {
            j[(i + 1, i)] = ONE;
        }
        j[(i, r - 1)] = -coef(i);
    }
    if x.contains(&ZERO) {
        return Err(Error::Singular("companion matrix of a polynomial with a zero root".into()));
    }
    // -c_k / c_0 = (-1)^{k+1} e_k(1/x)
    let inv: Vec<C64> = x.iter().map(|v| ONE / v).collect();
    let ei = elementary_all(&inv);
    let mut jinv = CMat::zeros(r, r);
    for i in 0..r {
        let k = i + 1;
        let s = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
        jinv[(i, 0)] = ei[k] * s;
        if i + 1 < r {
            jinv[(i, i + 1)] = ONE;
        }
    }
    Ok((j, jinv))
}

/// Roots of `Σ a_k z^k` (ascending coefficients) from the companion matrix.
pub fn companion_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let mut a = coeffs.to_vec();
    while a.last().is_some_and(|c| *c == ZERO) {
        a.pop();
    }
    if a.is_empty() {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    let deg = a.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = a[deg];
    let mut j = CMat::zeros(deg, deg);
    for i in 0..deg {
        if i + 1 < deg {
            j[(i + 1, i)] = ONE;
        }
        j[(i, deg - 1)] = -a[i] / lead;
    }
    linalg::eigenvalues(&j)
}

/// A factorized Lax matrix with the condition number of the similarity.
#[derive(Debug, Clone)]
pub struct Factorized {
    pub mat: CMat,
    /// `cond₁(V) · cond₁(D⁰)`.
    pub condition: f64,
}

impl Factorized {
    pub fn ill_conditioned(&self) -> bool {
        self.condition > COND_WARN
    }
}

/// `(D⁰)⁻¹ V X V⁻¹ D⁰`.
pub fn conjugate_by_vandermonde(x: &[C64], kind: RootKind, inner: &CMat) -> Result<Factorized> {
    let v = vandermonde(x);
    let d = d0_matrix(x, kind)?;
    let (vinv, cv) = inverse_with_cond(&v)?;
    let (dinv, cd) = inverse_with_cond(&d)?;
    Ok(Factorized {
        mat: dinv * &v * inner * vinv * d,
        condition: cv * cd,
    })
}

/// Factorized on-shell Lax matrix for `M = 0`:
/// C/D `ħ(D⁰)⁻¹V(C₀ - (1-2ξ)C̃)V⁻¹D⁰`, B `ħ(D⁰)⁻¹V(C₀ + C̃)V⁻¹D⁰`.
/// `x` is the extended coordinate vector.
pub fn factorized_lax(kind: RootKind, x: &[C64], xi: C64, hbar: C64) -> Result<Factorized> {
    let r = x.len();
    let (c0, ct) = c0_ctilde(r);
    let inner = match kind {
        RootKind::C | RootKind::D => c0 - ct * (ONE - xi * 2.0),
        RootKind::B => c0 + ct,
        RootKind::A => {
            return Err(Error::Unsupported("use factorized_lax_a for the A-type matrix".into()));
        }
    };
    let mut f = conjugate_by_vandermonde(x, kind, &inner)?;
    f.mat *= hbar;
    Ok(f)
}

/// `ωI + ħ(D⁰)⁻¹V C₀ V⁻¹D⁰`.
pub fn factorized_lax_a(q: &[C64], omega: C64, hbar: C64) -> Result<Factorized> {
    let (c0, _) = c0_ctilde(q.len());
    let mut f = conjugate_by_vandermonde(q, RootKind::A, &c0)?;
    f.mat *= hbar;
    for i in 0..q.len() {
        f.mat[(i, i)] += omega;
    }
    Ok(f)
}

/// `ħ(ξ/q_i + Σ_{k≠i} (1/(q_i - q_k) + 1/(q_i + q_k)))`: velocities of the
/// empty sector that make the BCD Lax matrix factorize.
pub fn free_velocities(q: &[C64], xi: C64, hbar: C64) -> Vec<C64> {
    (0..q.len())
        .map(|i| {
            let s: C64 = (0..q.len())
                .filter(|&k| k != i)
                .map(|k| ONE / (q[i] - q[k]) + ONE / (q[i] + q[k]))
                .sum();
            hbar * (xi / q[i] + s)
        })
        .collect()
}
