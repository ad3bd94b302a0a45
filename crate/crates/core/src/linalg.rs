//! Dense complex linear algebra shared by every module: Kronecker products,
//! characteristic polynomials, Schur-based spectra and guarded inverses.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<Complex64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Condition number above which inverses are flagged.
pub const COND_WARN: f64 = 1e10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Largest entry magnitude.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).norm()))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Spectral norm (largest singular value).
pub fn norm2(a: &CMat) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |m, s| m.max(*s))
}

pub fn trace(a: &CMat) -> C64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

pub fn diag(values: &[C64]) -> CMat {
    let n = values.len();
    let mut m = CMat::zeros(n, n);
    for (i, v) in values.iter().enumerate() {
        m[(i, i)] = *v;
    }
    m
}

/// Coefficients `[1, c_1, ..., c_r]` of the monic `det(λI - A) = Σ c_k λ^{r-k}`
/// by the Faddeev–LeVerrier trace recursion.
pub fn charpoly(a: &CMat) -> Vec<C64> {
    let n = a.nrows();
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(ONE);
    let mut m = CMat::zeros(n, n);
    for k in 1..=n {
        m = a * &m;
        for i in 0..n {
            m[(i, i)] += coeffs[k - 1];
        }
        let am = a * &m;
        coeffs.push(-trace(&am) / (k as f64));
    }
    coeffs
}

/// `x` if positive, else 1.
pub fn scale_or_one(x: f64) -> f64 {
    if x > 0.0 && x.is_finite() {
        x
    } else {
        1.0
    }
}

/// Largest `|c_k| / scale^k` over the non-leading coefficients: zero for a
/// nilpotent matrix, scale-free otherwise.
pub fn charpoly_defect(coeffs: &[C64], scale: f64) -> f64 {
    let s = if scale > 0.0 { scale } else { 1.0 };
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .fold(0.0_f64, |m, (k, ck)| m.max(ck.norm() / s.powi(k as i32)))
}

/// Evaluate a polynomial given in descending powers.
pub fn polyval_desc(coeffs: &[C64], x: C64) -> C64 {
    coeffs.iter().fold(ZERO, |acc, ck| acc * x + ck)
}

/// Complex Schur decomposition `A = Q T Q*`.
pub fn schur(a: &CMat) -> Result<(CMat, CMat)> {
    if a.nrows() == 0 {
        return Ok((CMat::zeros(0, 0), CMat::zeros(0, 0)));
    }
    let s = a
        .clone()
        .try_schur(1e-15, 10_000)
        .ok_or_else(|| Error::Singular("Schur iteration did not converge".into()))?;
    Ok(s.unpack())
}

pub fn eigenvalues(a: &CMat) -> Result<Vec<C64>> {
    let (_, t) = schur(a)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Inverse through partial-pivot LU, returned with the 1-norm condition number.
pub fn inverse_with_cond(a: &CMat) -> Result<(CMat, f64)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((CMat::zeros(0, 0), 1.0));
    }
    let inv = a
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("{n}x{n} matrix has no LU inverse")))?;
    let cond = norm1(a) * norm1(&inv);
    if !cond.is_finite() {
        return Err(Error::Singular("non-finite inverse".into()));
    }
    Ok((inv, cond))
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    inverse_with_cond(a).map(|(inv, _)| inv)
}

/// Maximum absolute column sum.
pub fn norm1(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn det(a: &CMat) -> C64 {
    if a.nrows() == 0 {
        return ONE;
    }
    a.clone().lu().determinant()
}

/// `det(A - λI)`.
pub fn det_shifted(a: &CMat, lambda: C64) -> C64 {
    let n = a.nrows();
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] -= lambda;
    }
    det(&m)
}

/// `K` equally spaced points on the circle `|λ| = radius`, rotated by `phase`.
pub fn circle_samples(k: usize, radius: f64, phase: f64) -> Vec<C64> {
    (0..k)
        .map(|j| {
            let t = phase + 2.0 * std::f64::consts::PI * (j as f64) / (k as f64);
            C64::from_polar(radius, t)
        })
        .collect()
}

/// Ascending coefficients `a_j` of the polynomial of degree `< values.len()`
/// interpolating `values` on [`circle_samples`] (`radius`, phase 0).
pub fn interpolate_on_circle(values: &[C64], radius: f64) -> Vec<C64> {
    let k = values.len();
    (0..k)
        .map(|j| {
            let s: C64 = values
                .iter()
                .enumerate()
                .map(|(l, v)| {
                    let t = -2.0 * std::f64::consts::PI * ((j * l) as f64) / (k as f64);
                    v * C64::from_polar(1.0, t)
                })
                .sum();
            s / (k as f64) / radius.powi(j as i32)
        })
        .collect()
}

/// Greedy matching distance between two multisets of complex numbers.
///
/// Returns `None` if the sizes differ. Each element of `a` is paired with the
/// nearest unused element of `b`, processed in order of best available match.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut pending: Vec<usize> = (0..a.len()).collect();
    let mut worst = 0.0_f64;
    while !pending.is_empty() {
        let mut best = (f64::INFINITY, 0, 0);
        for (pi, &i) in pending.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if !used[j] {
                    let d = (a[i] - y).norm();
                    if d < best.0 {
                        best = (d, pi, j);
                    }
                }
            }
        }
        used[best.2] = true;
        pending.swap_remove(best.1);
        worst = worst.max(best.0);
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> CMat {
        let n = rows.len();
        CMat::from_fn(n, rows[0].len(), |i, j| r(rows[i][j]))
    }

    #[test]
    fn charpoly_of_companion_matches_roots() {
        // roots 1, 2 -> λ² - 3λ + 2
        let a = mat(&[&[0.0, -2.0], &[1.0, 3.0]]);
        let cp = charpoly(&a);
        assert!((cp[1] - r(-3.0)).norm() < 1e-14);
        assert!((cp[2] - r(2.0)).norm() < 1e-14);
    }

    #[test]
    fn charpoly_of_strictly_upper_is_monomial() {
        let a = mat(&[&[0.0, 5.0, 1.0], &[0.0, 0.0, 2.0], &[0.0, 0.0, 0.0]]);
        let cp = charpoly(&a);
        assert_eq!(cp.len(), 4);
        assert!(charpoly_defect(&cp, 1.0) < 1e-15);
    }

    #[test]
    fn charpoly_agrees_with_determinant() {
        let a = CMat::from_fn(4, 4, |i, j| c((i * 3 + j) as f64 * 0.1, (i as f64) - (j as f64) * 0.3));
        let cp = charpoly(&a);
        for lam in [c(0.3, 0.2), c(-1.1, 0.5)] {
            // det(λI - A) = (-1)^n det(A - λI)
            let lhs = polyval_desc(&cp, lam);
            let rhs = det_shifted(&a, lam);
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn schur_eigenvalues_of_triangular() {
        let a = mat(&[&[1.0, 2.0], &[0.0, -3.0]]);
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        assert!((ev[0] - r(-3.0)).norm() < 1e-12);
        assert!((ev[1] - r(1.0)).norm() < 1e-12);
    }

    #[test]
    fn circle_interpolation_recovers_coefficients() {
        let coeffs = [c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 3.0)];
        let radius = 1.7;
        let pts = circle_samples(8, radius, 0.0);
        let vals: Vec<C64> = pts
            .iter()
            .map(|x| coeffs[0] + coeffs[1] * x + coeffs[2] * x * x)
            .collect();
        let got = interpolate_on_circle(&vals, radius);
        for (j, cj) in coeffs.iter().enumerate() {
            assert!((got[j] - cj).norm() < 1e-13);
        }
        for g in &got[3..] {
            assert!(g.norm() < 1e-13);
        }
    }

    #[test]
    fn singular_inverse_is_reported() {
        let a = mat(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(inverse(&a).is_err());
    }

    #[test]
    fn multiset_distance_pairs_elements() {
        let a = [r(1.0), r(-1.0), r(1.0)];
        let b = [r(-1.0), r(1.0 + 1e-9), r(1.0)];
        assert!(multiset_distance(&a, &b).unwrap() < 2e-9);
        assert!(multiset_distance(&a, &b[..2]).is_none());
    }
}
