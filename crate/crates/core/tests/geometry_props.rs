use linhol::geometry::{divergence, BivectorField, VectorField, VolumeDensity, DEFAULT_RANK_TOL};
use linhol::linalg::min_norm_solve;
use linhol::presets;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shipped() -> Vec<BivectorField> {
    vec![
        presets::symplectic_r2(),
        presets::regular_r3(),
        presets::aff1().bivector(),
        presets::so3().bivector(),
        presets::sl2().bivector(),
        presets::h3().bivector(),
        presets::abelian(2).bivector(),
    ]
}

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

#[test]
fn shipped_structures_are_antisymmetric_polynomials() {
    for pi in shipped() {
        let n = pi.dim();
        for i in 0..n {
            assert!(pi.entry(i, i).is_zero());
            for j in 0..n {
                assert_eq!(pi.entry(i, j), &pi.entry(j, i).scale(-1.0));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn shipped_structures_satisfy_jacobi(x in point(3)) {
        for pi in shipped() {
            let d = pi.jacobi_defect(&x[..pi.dim()]).unwrap();
            prop_assert!(d <= 1e-10, "defect {d}");
        }
    }

    #[test]
    fn sharp_lands_in_the_leaf(x in point(3), a in point(3)) {
        for pi in shipped() {
            let n = pi.dim();
            let s = pi.leaf_splitting(&x[..n], DEFAULT_RANK_TOL).unwrap();
            let v = pi.sharp(&x[..n], &a[..n]).unwrap();
            // The leaf basis is symplectic, not orthonormal: project by least squares.
            let (_, rest) = min_norm_solve(&s.leaf_matrix(), &v, 1e-12);
            prop_assert!(rest <= 1e-8 * (1.0 + v.norm()), "residual {rest}");
        }
    }

    #[test]
    fn symplectic_basis_reproduces_the_bivector(x in point(3)) {
        for pi in shipped() {
            let n = pi.dim();
            let s = pi.leaf_splitting(&x[..n], DEFAULT_RANK_TOL).unwrap();
            let m = pi.eval(&x[..n]).unwrap();
            let err = (s.reconstruct_bivector() - &m).amax();
            prop_assert!(err <= 1e-8 * (1.0 + m.amax()), "error {err}");
        }
    }

    #[test]
    fn divergence_matches_central_differences(seed in any::<u64>(), x in point(3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 3;
        let v = VectorField::new((0..n).map(|_| linhol::poly::random_poly(n, 3, 6, &mut rng)).collect()).unwrap();
        let rho = VolumeDensity::new(linhol::poly::random_poly(n, 2, 4, &mut rng));
        let exact = divergence(&v, &rho, &x).unwrap();
        // div_rho v = (1/rho) sum_i d_i (rho v^i)
        let h = 1e-5;
        let flux = |y: &[f64], i: usize| rho.density(y) * v.eval(y)[i];
        let mut fd = 0.0;
        for i in 0..n {
            let mut p = x.clone();
            let mut m = x.clone();
            p[i] += h;
            m[i] -= h;
            fd += (flux(&p, i) - flux(&m, i)) / (2.0 * h);
        }
        fd /= rho.density(&x);
        prop_assert!((exact - fd).abs() <= 1e-6 * (1.0 + exact.abs()), "{exact} vs {fd}");
    }
}
