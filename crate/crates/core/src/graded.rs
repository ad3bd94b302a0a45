//! ℤ₂-graded linear algebra on ℂ^{m|n} and its tensor powers.
//!
//! Operators on several sites are stored as plain dense matrices in the
//! lexicographic basis (site 1 slowest). The graded tensor product is realized
//! by a parity string: an abstract `A ⊗ B` is the matrix `A·Z^{p(B)} ⊗ B`,
//! where `Z = diag((-1)^{p(i)})` acts on every site of `A`. With this choice
//! `(A⊗B)(C⊗D) = (-1)^{p(B)p(C)} (AC)⊗(BD)` holds as a matrix identity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, CMat, C64, ONE, ZERO};

/// Numbers of even (`m`) and odd (`n`) basis vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grading {
    pub m: usize,
    pub n: usize,
}

impl Grading {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m + n == 0 {
            return Err(Error::InvalidGrading { m, n });
        }
        Ok(Self { m, n })
    }

    pub fn dim(&self) -> usize {
        self.m + self.n
    }

    /// Parity of the 1-based basis index `i`.
    pub fn parity(&self, i: usize) -> Result<u8> {
        if i == 0 || i > self.dim() {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: self.dim(),
            });
        }
        Ok(if i <= self.m { 0 } else { 1 })
    }

    /// Parity of the 0-based local index.
    #[inline]
    pub(crate) fn p0(&self, i: usize) -> u8 {
        u8::from(i >= self.m)
    }

    /// Local digits of a multi-site basis index, site 1 first.
    pub(crate) fn digits(&self, mut index: usize, sites: usize) -> Vec<usize> {
        let d = self.dim();
        let mut out = vec![0; sites];
        for s in (0..sites).rev() {
            out[s] = index % d;
            index /= d;
        }
        out
    }

    pub(crate) fn undigits(&self, digits: &[usize]) -> usize {
        let d = self.dim();
        digits.iter().fold(0, |acc, x| acc * d + x)
    }

    /// Total parity of a multi-site basis index.
    pub(crate) fn index_parity(&self, index: usize, sites: usize) -> u8 {
        self.digits(index, sites)
            .iter()
            .fold(0u8, |acc, &x| acc ^ self.p0(x))
    }

    pub fn space_dim(&self, sites: usize) -> usize {
        self.dim().pow(sites as u32)
    }
}

/// Dense operator on `sites` copies of ℂ^{m|n}.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedOperator {
    pub grading: Grading,
    pub sites: usize,
    pub mat: CMat,
}

impl GradedOperator {
    pub fn new(grading: Grading, sites: usize, mat: CMat) -> Result<Self> {
        let dim = grading.space_dim(sites);
        if sites == 0 || mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::Dimension(format!(
                "expected {dim}x{dim} for {sites} site(s) of ({}|{}), got {}x{}",
                grading.m,
                grading.n,
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self {
            grading,
            sites,
            mat,
        })
    }

    pub fn identity(grading: Grading, sites: usize) -> Self {
        let d = grading.space_dim(sites);
        Self {
            grading,
            sites,
            mat: CMat::identity(d, d),
        }
    }

    /// Single-site matrix unit `E_ij` (1-based).
    pub fn unit(grading: Grading, i: usize, j: usize) -> Result<Self> {
        grading.parity(i)?;
        grading.parity(j)?;
        let d = grading.dim();
        let mut mat = CMat::zeros(d, d);
        mat[(i - 1, j - 1)] = ONE;
        Ok(Self {
            grading,
            sites: 1,
            mat,
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Parity operator `Z^{⊗sites}`: `(-1)^{p(i)}` on the diagonal.
    pub fn parity_operator(grading: Grading, sites: usize) -> Self {
        let d = grading.space_dim(sites);
        let mut mat = CMat::zeros(d, d);
        for i in 0..d {
            mat[(i, i)] = if grading.index_parity(i, sites) == 1 {
                -ONE
            } else {
                ONE
            };
        }
        Self {
            grading,
            sites,
            mat,
        }
    }

    /// Split into even and odd parts with respect to the total index parity.
    pub fn split_parity(&self) -> (CMat, CMat) {
        let d = self.dim();
        let mut even = CMat::zeros(d, d);
        let mut odd = CMat::zeros(d, d);
        let par: Vec<u8> = (0..d)
            .map(|i| self.grading.index_parity(i, self.sites))
            .collect();
        for i in 0..d {
            for j in 0..d {
                if par[i] == par[j] {
                    even[(i, j)] = self.mat[(i, j)];
                } else {
                    odd[(i, j)] = self.mat[(i, j)];
                }
            }
        }
        (even, odd)
    }

    /// `Some(0|1)` if the operator is homogeneous, `None` otherwise. Zero is even.
    pub fn parity(&self) -> Option<u8> {
        let (even, odd) = self.split_parity();
        match (max_abs(&even) > 0.0, max_abs(&odd) > 0.0) {
            (_, false) => Some(0),
            (false, true) => Some(1),
            (true, true) => None,
        }
    }

    fn same_grading(&self, other: &Self) -> Result<()> {
        if self.grading != other.grading {
            return Err(Error::GradingMismatch(
                self.grading.m,
                self.grading.n,
                other.grading.m,
                other.grading.n,
            ));
        }
        Ok(())
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_grading(other)?;
        if self.sites != other.sites {
            return Err(Error::Dimension("site counts differ".into()));
        }
        Ok(Self {
            grading: self.grading,
            sites: self.sites,
            mat: &self.mat * &other.mat,
        })
    }

    /// Full supertrace `Σ (-1)^{p(i)} a_ii`.
    pub fn supertrace(&self) -> C64 {
        (0..self.dim())
            .map(|i| {
                let s = if self.grading.index_parity(i, self.sites) == 1 {
                    -1.0
                } else {
                    1.0
                };
                self.mat[(i, i)] * s
            })
            .sum()
    }

    /// Supertrace over the 1-based `site`, leaving an operator on the rest.
    pub fn partial_supertrace(&self, site: usize) -> Result<Self> {
        if site == 0 || site > self.sites {
            return Err(Error::SiteOutOfRange {
                site,
                sites: self.sites,
            });
        }
        if self.sites == 1 {
            return Err(Error::Dimension(
                "partial supertrace of a single-site operator; use supertrace()".into(),
            ));
        }
        let g = self.grading;
        let s = site - 1;
        let rest = self.sites - 1;
        let rd = g.space_dim(rest);
        let mut out = CMat::zeros(rd, rd);
        for row in 0..rd {
            let rdig = g.digits(row, rest);
            for col in 0..rd {
                let cdig = g.digits(col, rest);
                // parity carried by the legs after the traced site
                let tail = rdig[s..]
                    .iter()
                    .chain(cdig[s..].iter())
                    .fold(0u8, |acc, &x| acc ^ g.p0(x));
                let mut acc = ZERO;
                for a in 0..g.dim() {
                    let mut rfull = rdig.clone();
                    rfull.insert(s, a);
                    let mut cfull = cdig.clone();
                    cfull.insert(s, a);
                    let pa = g.p0(a);
                    let sign = if (pa ^ (pa & tail)) == 1 { -1.0 } else { 1.0 };
                    acc += self.mat[(g.undigits(&rfull), g.undigits(&cfull))] * sign;
                }
                out[(row, col)] = acc;
            }
        }
        Ok(Self {
            grading: g,
            sites: rest,
            mat: out,
        })
    }
}

/// `(-1)^{p(i)}` for 1-based `i`.
pub fn parity(i: usize, g: Grading) -> Result<u8> {
    g.parity(i)
}

/// Graded permutation `P = Σ (-1)^{p(j)} E_ij ⊗ E_ji` on two sites, realized
/// through its action `P(e_a ⊗ e_b) = (-1)^{p(a)p(b)} e_b ⊗ e_a`.
pub fn graded_permutation(g: Grading) -> GradedOperator {
    let d = g.dim();
    let mut mat = CMat::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            let sign = if g.p0(a) & g.p0(b) == 1 { -1.0 } else { 1.0 };
            mat[(b * d + a, a * d + b)] = C64::new(sign, 0.0);
        }
    }
    GradedOperator {
        grading: g,
        sites: 2,
        mat,
    }
}

/// Graded tensor product `a ⊗ b` (sites of `a` first).
///
/// Realized as `a ⊗ b_even + a·Z ⊗ b_odd`, which is linear in `b` and so needs
/// no homogeneity assumption.
pub fn graded_tensor(a: &GradedOperator, b: &GradedOperator) -> Result<GradedOperator> {
    a.same_grading(b)?;
    let (b_even, b_odd) = b.split_parity();
    let z = GradedOperator::parity_operator(a.grading, a.sites);
    let az = &a.mat * &z.mat;
    let mat = a.mat.kronecker(&b_even) + az.kronecker(&b_odd);
    Ok(GradedOperator {
        grading: a.grading,
        sites: a.sites + b.sites,
        mat,
    })
}

/// Super-transpose of a single-site operator:
/// `(A^t)_{ji} = (-1)^{p(j) + p(i)p(j)} A_{ij}`.
pub fn super_transpose(a: &GradedOperator) -> Result<GradedOperator> {
    if a.sites != 1 {
        return Err(Error::Unsupported(
            "super-transpose is implemented for single-site operators".into(),
        ));
    }
    let g = a.grading;
    let d = g.dim();
    let mut mat = CMat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let e = g.p0(j) + g.p0(i) * g.p0(j);
            let sign = if e % 2 == 1 { -1.0 } else { 1.0 };
            mat[(j, i)] = a.mat[(i, j)] * sign;
        }
    }
    Ok(GradedOperator {
        grading: g,
        sites: 1,
        mat,
    })
}

/// `sign` of the parity string `Π_{s < site} Z_s` on a basis vector, raised to
/// the parity of the operator component being moved through.
#[inline]
fn string_sign(g: Grading, digits: &[usize], site: usize, odd: bool) -> f64 {
    if !odd {
        return 1.0;
    }
    let p = digits[..site].iter().fold(0u8, |acc, &x| acc ^ g.p0(x));
    if p == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Place a single-site operator on the 1-based `site` of `sites`.
pub fn embed_one_site(op: &GradedOperator, site: usize, sites: usize) -> Result<GradedOperator> {
    if op.sites != 1 {
        return Err(Error::Dimension("embed_one_site expects a 1-site operator".into()));
    }
    if site == 0 || site > sites {
        return Err(Error::SiteOutOfRange { site, sites });
    }
    let g = op.grading;
    let d = g.dim();
    let dim = g.space_dim(sites);
    let s = site - 1;
    let mut mat = CMat::zeros(dim, dim);
    for col in 0..dim {
        let cd = g.digits(col, sites);
        let b = cd[s];
        for a in 0..d {
            let v = op.mat[(a, b)];
            if v == ZERO {
                continue;
            }
            let odd = g.p0(a) != g.p0(b);
            let mut nd = cd.clone();
            nd[s] = a;
            mat[(g.undigits(&nd), col)] += v * string_sign(g, &cd, s, odd);
        }
    }
    Ok(GradedOperator {
        grading: g,
        sites,
        mat,
    })
}

/// Place a two-site operator on sites `(i, k)` (1-based, first leg on `i`)
/// of an `n`-site chain, with Koszul signs from the sites in between.
pub fn embed_two_site(op: &GradedOperator, i: usize, k: usize, n: usize) -> Result<GradedOperator> {
    if op.sites != 2 {
        return Err(Error::Dimension("embed_two_site expects a 2-site operator".into()));
    }
    for site in [i, k] {
        if site == 0 || site > n {
            return Err(Error::SiteOutOfRange { site, sites: n });
        }
    }
    if i == k {
        return Err(Error::SiteCollision(i));
    }
    let g = op.grading;
    let d = g.dim();
    let dim = g.space_dim(n);
    let (si, sk) = (i - 1, k - 1);
    let mut mat = CMat::zeros(dim, dim);
    for col in 0..dim {
        let cd = g.digits(col, n);
        let (b, dd) = (cd[si], cd[sk]);
        for a in 0..d {
            for cc in 0..d {
                let v = op.mat[(a * d + cc, b * d + dd)];
                if v == ZERO {
                    continue;
                }
                // abstract coefficient of E_ab ⊗ E_{c d}
                let odd_ab = g.p0(a) != g.p0(b);
                let odd_cd = g.p0(cc) != g.p0(dd);
                let rho = if g.p0(b) == 1 && odd_cd { -1.0 } else { 1.0 };
                // apply E_cd on site k first, then E_ab on site i
                let s1 = string_sign(g, &cd, sk, odd_cd);
                let mut mid = cd.clone();
                mid[sk] = cc;
                let s2 = string_sign(g, &mid, si, odd_ab);
                let mut nd = mid;
                nd[si] = a;
                mat[(g.undigits(&nd), col)] += v * (rho * s1 * s2);
            }
        }
    }
    Ok(GradedOperator {
        grading: g,
        sites: n,
        mat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff};

    fn gl(m: usize, n: usize) -> Grading {
        Grading::new(m, n).unwrap()
    }

    fn basis(g: Grading, idx: &[usize]) -> nalgebra::DVector<C64> {
        let mut v = nalgebra::DVector::zeros(g.space_dim(idx.len()));
        v[g.undigits(idx)] = ONE;
        v
    }

    #[test]
    fn parity_examples() {
        assert_eq!(parity(1, gl(1, 1)).unwrap(), 0);
        assert_eq!(parity(2, gl(1, 1)).unwrap(), 1);
        assert_eq!(parity(3, gl(2, 2)).unwrap(), 1);
        assert!(parity(0, gl(1, 1)).is_err());
        assert!(parity(3, gl(1, 1)).is_err());
        assert!(Grading::new(0, 0).is_err());
    }

    #[test]
    fn permutation_action_in_gl11() {
        let g = gl(1, 1);
        let p = graded_permutation(g);
        let v12 = &p.mat * basis(g, &[0, 1]);
        assert_eq!(v12, basis(g, &[1, 0]));
        let v22 = &p.mat * basis(g, &[1, 1]);
        assert_eq!(v22, -basis(g, &[1, 1]));
    }

    #[test]
    fn permutation_is_plain_swap_for_gl20() {
        let p = graded_permutation(gl(2, 0));
        let mut swap = CMat::zeros(4, 4);
        for (a, b) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap[(a, b)] = ONE;
        }
        assert_eq!(p.mat, swap);
    }

    #[test]
    fn permutation_matches_defining_sum() {
        for (m, n) in [(2, 0), (1, 1), (0, 2), (2, 1)] {
            let g = gl(m, n);
            let d = g.dim();
            let mut sum = CMat::zeros(d * d, d * d);
            for i in 1..=d {
                for j in 1..=d {
                    let t = graded_tensor(
                        &GradedOperator::unit(g, i, j).unwrap(),
                        &GradedOperator::unit(g, j, i).unwrap(),
                    )
                    .unwrap();
                    let s = if g.parity(j).unwrap() == 1 { -1.0 } else { 1.0 };
                    sum += t.mat * C64::new(s, 0.0);
                }
            }
            assert!(max_abs_diff(&sum, &graded_permutation(g).mat) < 1e-15, "({m}|{n})");
        }
    }

    #[test]
    fn permutation_squares_to_identity() {
        for (m, n) in [(2, 0), (1, 1), (0, 2), (1, 2)] {
            let p = graded_permutation(gl(m, n));
            let sq = &p.mat * &p.mat;
            assert!(max_abs_diff(&sq, &identity(sq.nrows())) < 1e-14);
        }
    }

    #[test]
    fn koszul_sign_on_matrix_units() {
        let g = gl(1, 1);
        let u = |i, j| GradedOperator::unit(g, i, j).unwrap();
        let lhs1 = graded_tensor(&u(1, 2), &u(2, 1)).unwrap();
        let lhs2 = graded_tensor(&u(2, 1), &u(1, 2)).unwrap();
        let prod = &lhs1.mat * &lhs2.mat;
        let expect = graded_tensor(&u(1, 1), &u(2, 2)).unwrap().mat * C64::new(-1.0, 0.0);
        assert!(max_abs_diff(&prod, &expect) < 1e-15);
    }

    #[test]
    fn tensor_with_identity_and_even_operands() {
        let g = gl(2, 0);
        let a = GradedOperator::new(g, 1, CMat::from_fn(2, 2, |i, j| C64::new((i + 2 * j) as f64, 1.0))).unwrap();
        let b = GradedOperator::new(g, 1, CMat::from_fn(2, 2, |i, j| C64::new(i as f64 - j as f64, 0.5))).unwrap();
        let t = graded_tensor(&a, &b).unwrap();
        assert!(max_abs_diff(&t.mat, &a.mat.kronecker(&b.mat)) < 1e-15);
        let id = GradedOperator::identity(g, 1);
        let ii = graded_tensor(&id, &id).unwrap();
        assert!(max_abs_diff(&(&ii.mat * &t.mat), &t.mat) < 1e-15);
    }

    #[test]
    fn tensor_grading_mismatch() {
        let a = GradedOperator::identity(gl(1, 1), 1);
        let b = GradedOperator::identity(gl(2, 0), 1);
        assert!(matches!(graded_tensor(&a, &b), Err(Error::GradingMismatch(..))));
    }

    #[test]
    fn tensor_associative_on_units() {
        let g = gl(1, 1);
        let units: Vec<_> = (1..=2)
            .flat_map(|i| (1..=2).map(move |j| (i, j)))
            .map(|(i, j)| GradedOperator::unit(g, i, j).unwrap())
            .collect();
        for a in &units {
            for b in &units {
                for c in &units {
                    let l = graded_tensor(&graded_tensor(a, b).unwrap(), c).unwrap();
                    let r = graded_tensor(a, &graded_tensor(b, c).unwrap()).unwrap();
                    assert!(max_abs_diff(&l.mat, &r.mat) < 1e-15);
                }
            }
        }
    }

    #[test]
    fn super_transpose_examples() {
        let g = gl(1, 1);
        let e12 = GradedOperator::unit(g, 1, 2).unwrap();
        let t = super_transpose(&e12).unwrap();
        let mut expect = CMat::zeros(2, 2);
        expect[(1, 0)] = -ONE;
        assert_eq!(t.mat, expect);
        let e11 = GradedOperator::unit(g, 1, 1).unwrap();
        assert_eq!(super_transpose(&e11).unwrap().mat, e11.mat);
    }

    #[test]
    fn supertrace_values() {
        assert_eq!(GradedOperator::identity(gl(1, 1), 1).supertrace(), ZERO);
        assert_eq!(GradedOperator::identity(gl(2, 0), 1).supertrace(), C64::new(2.0, 0.0));
        assert!(graded_permutation(gl(1, 1)).supertrace().norm() < 1e-15);
        // str⊗str of P in gl(2|0) is the plain trace of the swap: m = 2
        assert!((graded_permutation(gl(2, 0)).supertrace() - C64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn supertrace_of_super_transpose_on_units() {
        let g = gl(1, 1);
        for i in 1..=2 {
            for j in 1..=2 {
                let e = GradedOperator::unit(g, i, j).unwrap();
                let t = super_transpose(&e).unwrap();
                assert_eq!(e.supertrace(), t.supertrace());
            }
        }
    }

    #[test]
    fn supertrace_cyclicity_with_sign() {
        let g = gl(1, 1);
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            for (k, l) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
                let a = GradedOperator::unit(g, i, j).unwrap();
                let b = GradedOperator::unit(g, k, l).unwrap();
                let pa = a.parity().unwrap();
                let pb = b.parity().unwrap();
                let ab = a.compose(&b).unwrap().supertrace();
                let ba = b.compose(&a).unwrap().supertrace();
                let s = if pa & pb == 1 { -1.0 } else { 1.0 };
                assert!((ab - ba * s).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn partial_supertrace_of_tensor_product() {
        let g = gl(1, 1);
        let a = GradedOperator::new(g, 1, CMat::from_fn(2, 2, |i, j| C64::new((1 + i + 3 * j) as f64, 0.0))).unwrap();
        let b = GradedOperator::new(g, 1, CMat::from_fn(2, 2, |i, j| C64::new((2 * i + j) as f64, -1.0))).unwrap();
        // even parts only so the product is even
        let (ae, _) = a.split_parity();
        let (be, _) = b.split_parity();
        let a = GradedOperator::new(g, 1, ae).unwrap();
        let b = GradedOperator::new(g, 1, be).unwrap();
        let t = graded_tensor(&a, &b).unwrap();
        let tr1 = t.partial_supertrace(1).unwrap();
        assert!(max_abs_diff(&tr1.mat, &(b.mat.clone() * a.supertrace())) < 1e-14);
        let tr2 = t.partial_supertrace(2).unwrap();
        assert!(max_abs_diff(&tr2.mat, &(a.mat.clone() * b.supertrace())) < 1e-14);
        assert!(t.partial_supertrace(3).is_err());
    }

    #[test]
    fn embed_two_site_examples() {
        for (m, n) in [(2, 0), (1, 1), (0, 2)] {
            let g = gl(m, n);
            let p = graded_permutation(g);
            let e = embed_two_site(&p, 1, 2, 2).unwrap();
            assert!(max_abs_diff(&e.mat, &p.mat) < 1e-15);
            let id = GradedOperator::identity(g, 2);
            let ei = embed_two_site(&id, 3, 1, 3).unwrap();
            assert!(max_abs_diff(&ei.mat, &identity(8)) < 1e-15);
            let p13 = embed_two_site(&p, 1, 3, 3).unwrap();
            assert!(max_abs_diff(&(&p13.mat * &p13.mat), &identity(8)) < 1e-14);
            let p31 = embed_two_site(&p, 3, 1, 3).unwrap();
            assert!(max_abs_diff(&p13.mat, &p31.mat) < 1e-15);
        }
    }

    #[test]
    fn embedded_permutation_swaps_with_koszul_sign() {
        // P_13 on e_a ⊗ e_b ⊗ e_c = (-1)^{p(a)p(c) + (p(a)+p(c))p(b)} e_c ⊗ e_b ⊗ e_a
        let g = gl(1, 1);
        let p13 = embed_two_site(&graded_permutation(g), 1, 3, 3).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let (pa, pb, pc) = (a as u8, b as u8, c as u8);
                    let e = (pa & pc) ^ ((pa ^ pc) & pb);
                    let s = if e == 1 { -1.0 } else { 1.0 };
                    let got = &p13.mat * basis(g, &[a, b, c]);
                    assert_eq!(got, basis(g, &[c, b, a]) * C64::new(s, 0.0));
                }
            }
        }
    }

    #[test]
    fn embed_errors() {
        let g = gl(1, 1);
        let p = graded_permutation(g);
        assert!(matches!(embed_two_site(&p, 2, 2, 3), Err(Error::SiteCollision(2))));
        assert!(matches!(embed_two_site(&p, 1, 4, 3), Err(Error::SiteOutOfRange { .. })));
        let one = GradedOperator::identity(g, 1);
        assert!(embed_one_site(&one, 0, 2).is_err());
    }

    #[test]
    fn permutations_satisfy_braid_relation() {
        for (m, n) in [(2, 0), (1, 1), (0, 2)] {
            let g = gl(m, n);
            let p = graded_permutation(g);
            let p12 = embed_two_site(&p, 1, 2, 3).unwrap().mat;
            let p23 = embed_two_site(&p, 2, 3, 3).unwrap().mat;
            let p13 = embed_two_site(&p, 1, 3, 3).unwrap().mat;
            // P_13 = P_12 P_23 P_12
            assert!(max_abs_diff(&p13, &(&p12 * &p23 * &p12)) < 1e-14);
        }
    }
}
