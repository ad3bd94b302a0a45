use gaudin_cm::bethe::{gaudin_eigenvalues, BetheSystem, BoundarySystem};
use gaudin_cm::calogero::{lax_matrix, Couplings, PhaseState, RootKind, RootSystem};
use gaudin_cm::chain::{check_reflection, check_ybe, BoundaryParams};
use gaudin_cm::duality::{check_a_identity, check_determinant_identity, check_g4_evenness};
use gaudin_cm::graded::{graded_permutation, graded_tensor, GradedOperator, Grading};
use gaudin_cm::linalg::{c, charpoly, det_shifted, identity, max_abs_diff, multiset_distance, polyval_desc, CMat, C64};
use gaudin_cm::model::random_points;
use gaudin_cm::precision::MpComplex;
use gaudin_cm::{GaudinSpec, SuperalgebraTag};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complex(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| c(a, b))
}

fn tag() -> impl Strategy<Value = SuperalgebraTag> {
    prop_oneof![
        Just(SuperalgebraTag::GL20),
        Just(SuperalgebraTag::GL11),
        Just(SuperalgebraTag::GL02)
    ]
}

fn points(n: usize, seed: u64) -> Vec<C64> {
    random_points(&mut ChaCha8Rng::seed_from_u64(seed), n, 2.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn permutation_is_an_involution(m in 0usize..3, n in 0usize..3) {
        prop_assume!(m + n > 0);
        let p = graded_permutation(Grading::new(m, n).unwrap()).mat;
        let d = p.nrows();
        prop_assert!(max_abs_diff(&(&p * &p), &identity(d)) == 0.0);
    }

    #[test]
    fn supertrace_is_multiplicative(seed in any::<u64>(), t in tag()) {
        let g = t.grading();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || CMat::from_fn(2, 2, |_, _| {
            use rand::Rng;
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let a = GradedOperator::new(g, 1, draw()).unwrap();
        let b = GradedOperator::new(g, 1, draw()).unwrap();
        let ab = graded_tensor(&a, &b).unwrap();
        prop_assert!((ab.supertrace() - a.supertrace() * b.supertrace()).norm() < 1e-13);
    }

    #[test]
    fn yang_baxter_and_reflection(seed in any::<u64>(), t in tag(), eta in complex(0.6), alpha in complex(1.5), beta in complex(1.5)) {
        let u = points(3, seed);
        let g = t.grading();
        prop_assert!(check_ybe(u[0], u[1], u[2], eta, g).unwrap() < 1e-12);
        let (a, b) = check_reflection(u[0], u[1], &BoundaryParams { alpha, beta, eta }, g).unwrap();
        prop_assert!(a < 1e-12 && b < 1e-12);
    }

    #[test]
    fn residual_is_odd_and_eigenvalues_even_in_roots(seed in any::<u64>(), t in tag(), xi in complex(1.5), n in 2usize..5) {
        let pts = points(n + 2, seed);
        let (z, mu) = pts.split_at(n);
        let spec = GaudinSpec::two_n(t, z.to_vec(), xi, c(0.9, 0.1), 2).unwrap();
        let sys = BoundarySystem::new(spec.clone()).unwrap();
        let f = sys.residual(mu).unwrap();
        let flipped = [-mu[0], mu[1]];
        let g = sys.residual(&flipped).unwrap();
        prop_assert!((f[0] + g[0]).norm() < 1e-10 * (1.0 + f[0].norm()));
        prop_assert!((f[1] - g[1]).norm() < 1e-10 * (1.0 + f[1].norm()));
        let e1 = gaudin_eigenvalues(&spec, mu).unwrap();
        let e2 = gaudin_eigenvalues(&spec, &[mu[1], -mu[0]]).unwrap();
        for (a, b) in e1.iter().zip(&e2) {
            prop_assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn canonical_form_is_idempotent(seed in any::<u64>(), t in tag()) {
        let pts = points(5, seed);
        let spec = GaudinSpec::two_n_plus_one(t, pts[..3].to_vec(), c(1.0, 0.0), 2).unwrap();
        let sys = BoundarySystem::new(spec).unwrap();
        let once = sys.canonicalize(&pts[3..]);
        prop_assert_eq!(sys.canonicalize(&once), once.clone());
        prop_assert!(once.iter().all(|x| x.re >= 0.0));
    }

    #[test]
    fn lax_transposition_and_evenness(seed in any::<u64>(), n in 1usize..5, g2 in complex(1.0), g4 in complex(1.5)) {
        let q = points(n, seed);
        let v = points(n, seed ^ 0xabc);
        let neg: Vec<C64> = v.iter().map(|x| -x).collect();
        let rs = RootSystem::new(RootKind::C, n);
        let cpl = Couplings { g1: c(0.0, 0.0), g2, g4 };
        let plus = lax_matrix(rs, &PhaseState::new(q.clone(), v.clone()).unwrap(), &cpl).unwrap();
        let minus = lax_matrix(rs, &PhaseState::new(q.clone(), neg).unwrap(), &cpl).unwrap();
        prop_assert!(max_abs_diff(&minus, &(-plus.transpose())) < 1e-12);
        let rep = check_g4_evenness(&PhaseState::new(q, v).unwrap(), g2, g4).unwrap();
        prop_assert!(rep.evenness < 1e-11 && rep.reduction < 1e-11);
    }

    #[test]
    fn off_shell_determinant_identities(seed in any::<u64>(), t in tag(), n in 1usize..5, m in 0usize..5, xi in complex(1.5), omega in complex(1.5)) {
        prop_assume!(m <= n);
        let pts = points(n + m, seed);
        let (z, mu) = pts.split_at(n);
        let hb = c(0.8, -0.2);
        let spec = GaudinSpec::two_n(t, z.to_vec(), xi, hb, m).unwrap();
        prop_assert!(check_determinant_identity(RootKind::C, &spec, mu).unwrap().max() < 1e-9);
        let spec = GaudinSpec::two_n_plus_one(t, z.to_vec(), hb, m).unwrap();
        prop_assert!(check_determinant_identity(RootKind::B, &spec, mu).unwrap().max() < 1e-9);
        prop_assert!(check_a_identity(z, mu, omega, hb).unwrap().max() < 1e-9);
    }

    #[test]
    fn charpoly_matches_determinant(seed in any::<u64>(), n in 1usize..7, lam in complex(3.0)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = CMat::from_fn(n, n, |_, _| {
            use rand::Rng;
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let p = polyval_desc(&charpoly(&a), lam);
        let d = det_shifted(&a, lam) * if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((p - d).norm() < 1e-10 * (1.0 + d.norm()));
    }

    #[test]
    fn random_points_are_separated(seed in any::<u64>(), n in 1usize..7, radius in 0.5f64..5.0) {
        let z = random_points(&mut ChaCha8Rng::seed_from_u64(seed), n, radius);
        let sep = 0.1 * radius;
        for (i, a) in z.iter().enumerate() {
            prop_assert!(a.norm() < radius && a.norm() >= sep);
            for b in &z[i + 1..] {
                prop_assert!((a - b).norm() >= sep && (a + b).norm() >= sep);
            }
        }
    }

    #[test]
    fn multiset_distance_ignores_order(seed in any::<u64>(), n in 1usize..6) {
        let a = points(n, seed);
        let mut b = a.clone();
        b.reverse();
        prop_assert_eq!(multiset_distance(&a, &b), Some(0.0));
        prop_assert_eq!(multiset_distance(&a, &b[1..]), None);
    }

    #[test]
    fn extended_arithmetic_agrees_with_double(x in complex(10.0), y in complex(10.0)) {
        prop_assume!(y.norm() > 1e-3);
        let (a, b) = (MpComplex::from_c64(x), MpComplex::from_c64(y));
        let tol = 1e-14 * (1.0 + x.norm() * y.norm() + x.norm() / y.norm());
        prop_assert!(((&a * &b).to_c64() - x * y).norm() < tol);
        prop_assert!(((&a / &b).to_c64() - x / y).norm() < tol);
        prop_assert!(((&a + &b).to_c64() - (x + y)).norm() < tol);
    }
}
